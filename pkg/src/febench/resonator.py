"""Lumped LC reflectometry circuit algebra and resonance/TLS fit engines.

Complex convention: time dependence exp(+j omega t), so a capacitance
increase pulls the reflection coefficient along -j. All frequencies are in
Hz unless a variable is explicitly angular.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import t as student_t

from .constants import K_B
from .errors import FitError, LinearizationWarning, ValidationError


@dataclass
class TankCircuit:
    """Parallel LC tank coupled through C_c to a line of impedance z_line."""

    inductance: float  # H
    capacitance: float  # F, parasitic + device after the coupling capacitor
    coupling_capacitance: float  # F
    resistance: float  # Ohm, distributed-loss equivalent
    z_line: float = 50.0

    def __post_init__(self):
        for name in ("inductance", "capacitance", "coupling_capacitance", "resistance", "z_line"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")

    @property
    def c_total(self):
        return self.capacitance + self.coupling_capacitance


@dataclass
class QualityFactors:
    q_int: float
    q_ext: float
    q_tot: float
    f0: float

    def __post_init__(self):
        if min(self.q_int, self.q_ext, self.q_tot, self.f0) <= 0:
            raise ValidationError("quality factors and f0 must be positive")
        combined = 1.0 / (1.0 / self.q_int + 1.0 / self.q_ext)
        if abs(combined - self.q_tot) > 1e-9 * self.q_tot:
            raise ValidationError("1/Q_tot must equal 1/Q_int + 1/Q_ext")


def quality_factors(tc):
    """Resonance frequency and Q_int/Q_ext/Q_tot of the tank circuit.

    f0 = 1/(2 pi sqrt(L C_t)), Q_int = omega0 C_t R,
    Q_ext = C_t / (Z_line omega0 C_c^2).
    """
    c_t = tc.c_total
    f0 = 1.0 / (2.0 * np.pi * np.sqrt(tc.inductance * c_t))
    w0 = 2.0 * np.pi * f0
    q_int = w0 * c_t * tc.resistance
    q_ext = c_t / (tc.z_line * w0 * tc.coupling_capacitance**2)
    q_tot = 1.0 / (1.0 / q_int + 1.0 / q_ext)
    return QualityFactors(q_int=q_int, q_ext=q_ext, q_tot=q_tot, f0=f0)


def reflection_coefficient(f, qf):
    """Gamma = 1 - (2 Q_tot/Q_ext) / (1 + 2j Q_tot (f/f0 - 1))."""
    f = np.asarray(f, dtype=float)
    x = 2.0 * qf.q_tot * (f / qf.f0 - 1.0)
    return 1.0 - (2.0 * qf.q_tot / qf.q_ext) / (1.0 + 1j * x)


def reflection_shift(delta_c, qf, tc):
    """Linearized on-resonance reflection change for a capacitance shift.

    dGamma = -j (2 Q_tot^2 / Q_ext) dC/C_t. Warns when |dC|/C_t > 1e-3,
    where the first-order expansion degrades.
    """
    ratio = delta_c / tc.c_total
    if abs(ratio) > 1e-3:
        warnings.warn(
            f"|dC|/C_t = {abs(ratio):.2e} beyond linear regime", LinearizationWarning
        )
    return -1j * (2.0 * qf.q_tot**2 / qf.q_ext) * ratio


def reflection_shift_exact(delta_c, qf, tc):
    """Exact recomputation of Gamma(f0; C_t + dC) - Gamma(f0; C_t).

    The -j direction of the linearized difference formula fixes the sign
    gauge of the detuning; the exact path mirrors it so both agree in
    phase, not only in magnitude.
    """
    shifted = TankCircuit(
        tc.inductance,
        tc.capacitance + delta_c,
        tc.coupling_capacitance,
        tc.resistance,
        tc.z_line,
    )
    qf2 = quality_factors(shifted)
    diff = reflection_coefficient(qf.f0, qf2) - reflection_coefficient(qf.f0, qf)
    return np.conj(diff)


def sideband_amplitude(v_rf, delta_c, qf, tc, gain):
    """Sideband voltage V_s = G (Q_tot^2/Q_ext) (|dC|/C_t) V_RF."""
    if v_rf < 0 or gain <= 0:
        raise ValidationError("drive voltage must be nonnegative and gain positive")
    return gain * qf.q_tot**2 / qf.q_ext * abs(delta_c) / tc.c_total * v_rf


def capacitance_sensitivity(v_rf, qf, tc, gain, v_noise, bandwidth):
    """S_c = Q_ext C_t V_n / (G Q_tot^2 sqrt(B) V_RF) in F/sqrt(Hz)."""
    if min(v_rf, v_noise, bandwidth) <= 0 or gain <= 0:
        raise ValidationError("inputs must be positive")
    return (
        qf.q_ext
        * tc.c_total
        * v_noise
        / (gain * qf.q_tot**2 * np.sqrt(bandwidth) * v_rf)
    )


@dataclass
class SingleElectronSignal:
    v_s: float  # V
    prefactor: float  # dimensionless G Q_int dq V_RF / (16 kB T)
    assumption: str = "critical coupling (Q_int = Q_ext)"


def single_electron_signal(delta_q, temperature, tc, qf, gain, v_rf):
    """Voltage signal of one electron at zero detuning, critical coupling.

    V_s = (G Q_int dq V_RF / (16 kB T)) (dq / C_t).
    """
    if delta_q <= 0 or temperature <= 0:
        raise ValidationError("charge and temperature must be positive")
    prefactor = gain * qf.q_int * delta_q * v_rf / (16.0 * K_B * temperature)
    return SingleElectronSignal(
        v_s=prefactor * delta_q / tc.c_total, prefactor=prefactor
    )


# ---------------------------------------------------------------------------
# resonance circle fit


@dataclass
class ResonanceFit:
    f0: float
    q_tot: float
    q_ext: float
    q_int: float
    amplitude: float
    phase_offset: float
    delay: float
    residual_rms: float
    ci95: dict = field(default_factory=dict)
    snr_warning: bool = False
    mode: str = "reflection"

    def model(self, f):
        env = self.amplitude * np.exp(
            1j * (self.phase_offset - 2.0 * np.pi * np.asarray(f) * self.delay)
        )
        depth = 2.0 if self.mode == "reflection" else 1.0
        x = 2.0 * self.q_tot * (np.asarray(f) / self.f0 - 1.0)
        return env * (1.0 - (depth * self.q_tot / self.q_ext) / (1.0 + 1j * x))


def _taubin_circle(x, y):
    # algebraic (Taubin) circle fit; returns xc, yc, r
    xm, ym = x.mean(), y.mean()
    u, v = x - xm, y - ym
    z = u * u + v * v
    zm = z.mean()
    z0 = (z - zm) / (2.0 * np.sqrt(zm))
    a_mat = np.column_stack([z0, u, v])
    _, _, vt = np.linalg.svd(a_mat, full_matrices=False)
    a, b, c = vt[2]
    a /= 2.0 * np.sqrt(zm)
    d = -zm * a
    xc = -b / (2.0 * a) + xm
    yc = -c / (2.0 * a) + ym
    r = np.sqrt(b * b + c * c - 4.0 * a * d) / (2.0 * abs(a))
    return xc, yc, r


def _resonance_model(params, f, depth):
    f0, q_tot, q_ext, amp, alpha, delay = params
    x = 2.0 * q_tot * (f / f0 - 1.0)
    return (
        amp
        * np.exp(1j * (alpha - 2.0 * np.pi * f * delay))
        * (1.0 - (depth * q_tot / q_ext) / (1.0 + 1j * x))
    )


def fit_resonance(freqs, s_data, mode="reflection"):
    """Extract (f0, Q_tot, Q_ext, Q_int) from complex scattering data.

    Circle-fit decomposition: complex background removal, algebraic circle
    fit, phase-vs-frequency fit, then a full least-squares refinement that
    provides the residual RMS and 95% confidence intervals.
    """
    f = np.asarray(freqs, dtype=float)
    z = np.asarray(s_data, dtype=complex)
    if mode not in ("reflection", "notch"):
        raise ValidationError(f"unknown mode {mode!r}")
    if f.size < 50:
        raise ValidationError("need at least 50 frequency points")
    depth = 2.0 if mode == "reflection" else 1.0

    mag = np.abs(z)
    edge = max(3, f.size // 10)
    baseline = np.median(np.concatenate([mag[:edge], mag[-edge:]]))
    dip = baseline - mag.min()
    noise_est = np.std(np.concatenate([mag[:edge], mag[-edge:]]))
    if dip < 5.0 * max(noise_est, 1e-12 * baseline) or dip < 0.01 * baseline:
        raise FitError("no resonance dip detected")

    # background removal: normalize amplitude and edge phase slope (delay).
    # Slopes are taken per edge because an origin-encircling resonance adds
    # an artificial 2 pi step between the two far-detuned clusters.
    phase = np.unwrap(np.angle(z))
    edge_idx = np.concatenate([np.arange(edge), np.arange(f.size - edge, f.size)])
    slope_l = np.polyfit(f[:edge], phase[:edge], 1)[0]
    slope_r = np.polyfit(f[-edge:], phase[-edge:], 1)[0]
    slope = 0.5 * (slope_l + slope_r)
    delay0 = -slope / (2.0 * np.pi)
    intercept = float(np.angle(np.mean(z[edge_idx] * np.exp(-1j * slope * f[edge_idx]))))
    z_norm = z / (baseline * np.exp(1j * (intercept + slope * f)))

    xc, yc, r = _taubin_circle(z_norm.real, z_norm.imag)
    # phase of the centered data follows theta0 + 2 atan(2 Q (1 - f/f0))
    centered = z_norm - (xc + 1j * yc)
    theta = np.unwrap(np.angle(centered))
    f0_seed = f[np.argmin(mag)]
    fwhm = f[mag < (baseline + mag.min()) / 2.0]
    q_seed = f0_seed / max(fwhm[-1] - fwhm[0], (f[1] - f[0]) * 3) if fwhm.size > 1 else 1e3

    def phase_resid(p):
        th0, q, f0 = p
        return theta - (th0 + 2.0 * np.arctan(2.0 * q * (1.0 - f / f0)))

    # full refinement on stacked re/im residuals; retry over seed spreads
    # because the phase fit can land in a local minimum for extreme Q
    def full_resid(p):
        model = _resonance_model(p, f, depth)
        d = model - z
        return np.concatenate([d.real, d.imag])

    res = None
    for scale in (1.0, 0.3, 3.0, 0.1, 10.0):
        pres = least_squares(
            phase_resid,
            [np.mean(theta), q_seed * scale, f0_seed],
            method="lm",
            max_nfev=20000,
        )
        _, q_tot0, f00 = pres.x
        q_tot0 = abs(q_tot0)
        q_ext0 = max(depth * q_tot0 / (2.0 * r), q_tot0 * (1.0 + 1e-6))
        p0 = [f00, q_tot0, q_ext0, baseline, intercept % (2 * np.pi), delay0]
        trial = least_squares(full_resid, p0, method="lm", max_nfev=50000)
        if res is None or np.sum(trial.fun**2) < np.sum(res.fun**2):
            res = trial
        if np.sqrt(np.mean(res.fun**2)) < 1e-6 * dip:
            break
    f0, q_tot, q_ext, amp, alpha, delay = res.x
    q_tot, q_ext = abs(q_tot), abs(q_ext)
    if q_ext <= q_tot:
        # numerically overcoupled beyond physical: clamp Q_int to huge
        q_ext = q_tot * (1.0 + 1e-12)
    q_int = 1.0 / (1.0 / q_tot - 1.0 / q_ext)

    dof = max(2 * f.size - res.x.size, 1)
    rms = float(np.sqrt(np.sum(res.fun**2) / (2 * f.size)))
    var = np.sum(res.fun**2) / dof
    try:
        cov = var * np.linalg.inv(res.jac.T @ res.jac)
        sigmas = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        sigmas = np.full(res.x.size, np.inf)
    tval = student_t.ppf(0.975, dof)
    names = ["f0", "q_tot", "q_ext", "amplitude", "phase_offset", "delay"]
    ci = {n: tval * s for n, s in zip(names, sigmas)}

    snr = dip / max(rms, 1e-300)
    snr_warning = snr < 10.0
    if snr_warning:
        warnings.warn("low SNR: confidence intervals widened", UserWarning)
        ci = {k: 2.0 * v for k, v in ci.items()}

    return ResonanceFit(
        f0=f0,
        q_tot=q_tot,
        q_ext=q_ext,
        q_int=q_int,
        amplitude=amp,
        phase_offset=alpha,
        delay=delay,
        residual_rms=rms,
        ci95=ci,
        snr_warning=snr_warning,
        mode=mode,
    )


def synth_resonance(freqs, f0, q_tot, q_ext, mode="reflection", amplitude=1.0,
                    phase_offset=0.0, delay=0.0, noise=0.0, seed=0):
    """Forward model with optional complex white Gaussian noise (seeded)."""
    depth = 2.0 if mode == "reflection" else 1.0
    f = np.asarray(freqs, dtype=float)
    z = _resonance_model([f0, q_tot, q_ext, amplitude, phase_offset, delay], f, depth)
    if noise > 0:
        rng = np.random.default_rng(seed)
        z = z + noise * (rng.normal(size=f.size) + 1j * rng.normal(size=f.size)) / np.sqrt(2)
    return z


# ---------------------------------------------------------------------------
# TLS power-dependence fit


@dataclass
class TlsFitParams:
    q_tls0_over_f: float
    n_sat: float
    beta: float
    q_other: float
    ci95: dict = field(default_factory=dict)
    q_other_unidentifiable: bool = False

    def model(self, n_ph):
        n = np.asarray(n_ph, dtype=float)
        return (
            1.0
            / (self.q_tls0_over_f * np.sqrt(1.0 + (n / self.n_sat) ** self.beta))
            + 1.0 / self.q_other
        )


def fit_tls(n_ph, q_int, weights=None, p0=None):
    """Weighted fit of the TLS loss model to Q_int versus photon number.

    1/Q_int = (F/Q_TLS0)/sqrt(1 + (n/n_sat)^beta) + 1/Q_other, with all
    parameters positive (log-parameterized damped Gauss-Newton).
    """
    n = np.asarray(n_ph, dtype=float)
    q = np.asarray(q_int, dtype=float)
    if n.size < 6:
        raise ValidationError("need at least 6 points")
    if np.log10(n.max() / n.min()) < 2.0:
        raise ValidationError("need at least 2 decades of photon number")
    w = np.ones_like(n) if weights is None else np.asarray(weights, dtype=float)
    w = w / w.mean()  # overall weight scale drops out
    delta = 1.0 / q

    if p0 is None:
        p0 = [q.min(), np.sqrt(n.min() * n.max()), 0.5, 100.0 * q.max()]

    def resid(logp):
        qt, ns, beta, qo = np.exp(logp)
        model = 1.0 / (qt * np.sqrt(1.0 + (n / ns) ** beta)) + 1.0 / qo
        return np.sqrt(w) * (model - delta) / delta

    res = least_squares(resid, np.log(p0), method="lm", max_nfev=50000)
    if not res.success and np.sum(res.fun**2) > 1e6:
        raise FitError("TLS fit did not converge")
    qt, ns, beta, qo = np.exp(res.x)

    dof = max(n.size - 4, 1)
    var = np.sum(res.fun**2) / dof
    try:
        cov = var * np.linalg.inv(res.jac.T @ res.jac)
        log_sigmas = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        log_sigmas = np.full(4, np.inf)
    tval = student_t.ppf(0.975, dof)
    names = ["q_tls0_over_f", "n_sat", "beta", "q_other"]
    vals = [qt, ns, beta, qo]
    # CI in natural units from the log-space covariance
    ci = {
        nm: (v * np.exp(tval * s) - v * np.exp(-tval * s)) / 2.0
        for nm, v, s in zip(names, vals, log_sigmas)
    }
    unident = not np.isfinite(log_sigmas[3]) or log_sigmas[3] * tval > np.log(10.0)
    return TlsFitParams(
        q_tls0_over_f=qt,
        n_sat=ns,
        beta=beta,
        q_other=qo,
        ci95=ci,
        q_other_unidentifiable=bool(unident),
    )


# ---------------------------------------------------------------------------
# data I/O helpers


def load_complex_csv(path):
    """Read (f, Re, Im) or magnitude/phase[rad] CSV into (f, z)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] == 3:
        header = open(path).readline().lower()
        if "mag" in header or "phase" in header:
            return data[:, 0], data[:, 1] * np.exp(1j * data[:, 2])
        return data[:, 0], data[:, 1] + 1j * data[:, 2]
    if data.shape[1] == 2:
        return data[:, 0], data[:, 1].astype(complex)
    raise ValidationError(f"expected 2 or 3 CSV columns, got {data.shape[1]}")


def fit_report_dict(fit):
    """JSON-ready report of a resonance fit."""
    return {
        "mode": fit.mode,
        "f0_hz": fit.f0,
        "q_tot": fit.q_tot,
        "q_ext": fit.q_ext,
        "q_int": fit.q_int,
        "residual_rms": fit.residual_rms,
        "ci95": {k: float(v) for k, v in fit.ci95.items()},
        "snr_warning": fit.snr_warning,
    }
