"""Time-domain simulation of the FM-microwave sideband readout.

The RF carrier is treated analytically through the reflection algebra;
only the modulation-frequency envelope is time-sampled (the optical-scale
carrier and the RF probe never need cosampling). Landau-Zener suppression
uses the single-passage model: electrons whose resonance is crossed by
the FM excursion keep (1 - P_LZ) of their capacitance contribution, and
thermal equilibrium is restored each period.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import t as student_t

from .errors import FitError, ValidationError
from .qcap import EnsembleCapacitance
from .resonator import reflection_coefficient

TWO_PI = 2.0 * np.pi


@dataclass
class FmParams:
    """Carrier, modulation amplitude and modulation frequency (Hz)."""

    carrier_hz: float
    amplitude_hz: float
    mod_freq_hz: float

    def __post_init__(self):
        if self.amplitude_hz < 0:
            raise ValidationError("modulation amplitude must be nonnegative")
        if self.mod_freq_hz <= 0:
            raise ValidationError("modulation frequency must be positive")

    def instantaneous(self, t):
        return self.carrier_hz + self.amplitude_hz * np.cos(TWO_PI * self.mod_freq_hz * t)


@dataclass
class LzParams:
    rabi_hz: float  # 2 t_c / h
    f_ma_hz: float
    f_mf_hz: float

    def __post_init__(self):
        if min(self.rabi_hz, self.f_ma_hz, self.f_mf_hz) <= 0:
            raise ValidationError("LZ parameters must be positive")


def lz_probability(params):
    """Single-passage probability P_LZ = exp(-2 pi delta).

    delta = (2t_c)^2 / (4 f_ma f_mf) with every rate in Hz. Returns
    (P_LZ, 1 - P_LZ); the second factor scales the surviving signal.
    """
    delta = params.rabi_hz**2 / (4.0 * params.f_ma_hz * params.f_mf_hz)
    p = float(np.exp(-TWO_PI * delta))
    return p, 1.0 - p


@dataclass
class SidebandResult:
    v_s: float  # V, mean of the two first-order sideband magnitudes
    v_s_upper: float
    v_s_lower: float
    carrier_amplitude: float
    offsets_hz: np.ndarray = field(repr=False)
    spectrum_v: np.ndarray = field(repr=False)
    p_lz: float = 0.0


def _envelope_spectrum(c_n_t, q_tot, q_ext, c_total, gain, v_rf, f0_gamma):
    env = (f0_gamma - 1j * (2.0 * q_tot**2 / q_ext) * (c_n_t / c_total)) * gain * v_rf
    return np.fft.fft(env) / env.size


def simulate_sidebands(dist, fm, drive, tank, qf, v_rf, gain, lz=False,
                       cycles=16, samples_per_cycle=256, table=None):
    """Sideband amplitudes at f_RF +/- f_mf for one FM carrier setting.

    Samples C_N over an integer number of modulation periods, forms the
    reflected-voltage envelope through the linearized reflection shift,
    and reads the +/- f_mf Fourier bins. Rectangular window with exact
    bin alignment; cycles must be an integer >= 8.
    """
    if int(cycles) != cycles or cycles < 8:
        raise ValidationError("cycles must be an integer >= 8 (leakage)")
    if samples_per_cycle < 64:
        raise ValidationError("need >= 64 samples per modulation period")
    cycles = int(cycles)
    n = cycles * int(samples_per_cycle)
    t = np.arange(n) / (samples_per_cycle * fm.mod_freq_hz)
    eps0_t = dist.f_ry_peak_hz - fm.instantaneous(t)

    tab = table if table is not None else EnsembleCapacitance(dist, drive)
    c_n_t = tab.at(eps0_t)
    p_lz = 0.0
    if lz and fm.amplitude_hz > 0:
        p_lz, _ = lz_probability(
            LzParams(drive.rabi_hz, fm.amplitude_hz, fm.mod_freq_hz)
        )
        crossers = np.abs(dist.f_ry_hz - fm.carrier_hz) <= fm.amplitude_hz
        if crossers.any():
            c_cross_t = tab.at(eps0_t, bins_mask=crossers)
            c_n_t = c_n_t - p_lz * c_cross_t

    gamma0 = complex(reflection_coefficient(qf.f0, qf))
    spec = _envelope_spectrum(
        c_n_t, qf.q_tot, qf.q_ext, tank.c_total, gain, v_rf, gamma0
    )
    k = cycles  # bin index of f_mf
    v_upper = float(np.abs(spec[k]))
    v_lower = float(np.abs(spec[-k]))
    offsets = np.fft.fftshift(np.fft.fftfreq(n, d=t[1] - t[0]))
    return SidebandResult(
        v_s=0.5 * (v_upper + v_lower),
        v_s_upper=v_upper,
        v_s_lower=v_lower,
        carrier_amplitude=float(np.abs(spec[0])),
        offsets_hz=offsets,
        spectrum_v=np.abs(np.fft.fftshift(spec)),
        p_lz=p_lz,
    )


def sweep_carrier(carriers_hz, dist, fm_amplitude_hz, fm_freq_hz, drive, tank, qf,
                  v_rf, gain, lz=False, cycles=16, samples_per_cycle=256,
                  noise_floor_v=None):
    """Sideband amplitude versus MW carrier frequency.

    Returns (v_s array, observable array); the observable applies the
    measurement noise floor when one is given.
    """
    carriers = np.asarray(carriers_hz, dtype=float)
    tab = EnsembleCapacitance(dist, drive)
    v_s = np.empty(carriers.size)
    for i, fc in enumerate(carriers):
        fm = FmParams(fc, fm_amplitude_hz, fm_freq_hz)
        v_s[i] = simulate_sidebands(
            dist, fm, drive, tank, qf, v_rf, gain, lz=lz,
            cycles=cycles, samples_per_cycle=samples_per_cycle, table=tab,
        ).v_s_upper
    observable = v_s if noise_floor_v is None else np.maximum(v_s, noise_floor_v)
    return v_s, observable


def lz_model(f_mf, a, rabi_hz, f_ma_hz):
    delta = rabi_hz**2 / (4.0 * f_ma_hz * f_mf)
    return a * (1.0 - np.exp(-TWO_PI * delta))


def fit_lz_rate(f_mf_values, amplitudes, f_ma_hz, domain_max_hz=None,
                noise_floor_v=0.0, confidence=0.99):
    """Fit a (1 - P_LZ) to sideband amplitude versus modulation frequency.

    Returns (rabi_hz, ci_hz) with the confidence interval at the 99% level
    by default. Points above domain_max_hz are excluded from the fit.
    """
    res = fit_lz_rate_joint(
        [(f_mf_values, amplitudes, f_ma_hz)], domain_max_hz, noise_floor_v, confidence
    )
    return res["rabi_hz"], res["rabi_ci_hz"]


def fit_lz_rate_joint(datasets, domain_max_hz=None, noise_floor_v=0.0,
                      confidence=0.99):
    """Joint fit over several modulation amplitudes with a shared rate.

    datasets is a list of (f_mf array, amplitude array, f_ma) tuples; each
    keeps its own prefactor a while 2t_c/h is common.
    """
    cleaned = []
    for f_mf, amp, f_ma in datasets:
        f_mf = np.asarray(f_mf, dtype=float)
        amp = np.asarray(amp, dtype=float)
        if domain_max_hz is not None:
            keep = f_mf <= domain_max_hz
            f_mf, amp = f_mf[keep], amp[keep]
        if f_mf.size < 4:
            raise ValidationError("need at least 4 points inside the fit domain")
        if np.all(amp <= noise_floor_v):
            raise FitError("all points below the noise floor")
        if np.max(amp) <= 0:
            raise FitError("degenerate fit: amplitudes vanish")
        cleaned.append((f_mf, amp, f_ma))

    a0 = [max(np.max(amp), 1e-12) for _, amp, _ in cleaned]
    rabi0 = np.sqrt(4.0 * cleaned[0][2] * np.median(cleaned[0][0]) / TWO_PI)

    def resid(p):
        rabi = p[0]
        out = []
        for (f_mf, amp, f_ma), a in zip(cleaned, p[1:]):
            out.append(lz_model(f_mf, a, rabi, f_ma) - amp)
        return np.concatenate(out)

    fit = least_squares(resid, [rabi0, *a0], method="lm", max_nfev=20000)
    rabi = abs(fit.x[0])
    n_pts = sum(f.size for f, _, _ in cleaned)
    dof = max(n_pts - fit.x.size, 1)
    var = np.sum(fit.fun**2) / dof
    try:
        cov = var * np.linalg.inv(fit.jac.T @ fit.jac)
        sigma = np.sqrt(abs(cov[0, 0]))
    except np.linalg.LinAlgError:
        raise FitError("singular fit: rate not identifiable")
    tval = student_t.ppf(0.5 + confidence / 2.0, dof)
    return {
        "rabi_hz": rabi,
        "rabi_ci_hz": tval * sigma,
        "amplitudes": [abs(v) for v in fit.x[1:]],
        "confidence": confidence,
    }


def parseval_check(c_n_t, q_tot, q_ext, c_total, gain, v_rf, gamma0):
    """Relative power mismatch between time samples and spectrum bins."""
    env = (gamma0 - 1j * (2.0 * q_tot**2 / q_ext) * (c_n_t / c_total)) * gain * v_rf
    spec = np.fft.fft(env) / env.size
    p_time = np.mean(np.abs(env) ** 2)
    p_freq = np.sum(np.abs(spec) ** 2)
    return abs(p_time - p_freq) / p_time
