"""Tunnel-diode oscillator circuit model and waveform analysis.

The oscillation frequency follows the linear LC resonance condition with
a bias-dependent diode capacitance; no limit-cycle dynamics are modeled.
Waveform analysis reproduces the measurement pipeline: brick-wall digital
bandpass, analytic-signal envelope, amplitude statistics, and zero-padded
DFT power spectra into a 50 Ohm system.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import least_squares

from .errors import FitError, ValidationError

SPECTRUM_FLOOR_DBM = -400.0


@dataclass
class TdoCircuit:
    """Spiral inductor plus varactor/parasitic and diode capacitances.

    The varactor+parasitic capacitance C(V_VD) interpolates the three
    measured anchor points with a monotone cubic; the diode follows the
    depletion-layer law with diffusion potential v_diffusion.
    """

    inductance: float = 95e-9
    diode_c0: float = 5.7e-12
    v_diffusion: float = 0.5
    varactor_v: tuple = (-1.5, 0.0, 5.0)
    varactor_c: tuple = (7.9e-12, 5.8e-12, 5.3e-12)

    def __post_init__(self):
        if self.inductance <= 0 or self.diode_c0 <= 0 or self.v_diffusion <= 0:
            raise ValidationError("inductance and capacitances must be positive")
        self._varactor = PchipInterpolator(self.varactor_v, self.varactor_c)

    def varactor_capacitance(self, v_vd):
        v = np.clip(v_vd, self.varactor_v[0], self.varactor_v[-1])
        return float(self._varactor(v)) if np.isscalar(v_vd) else self._varactor(v)


def diode_capacitance(v_td, c0, v_diffusion=0.5):
    """Depletion capacitance C0 (1 - V/V_d)^(-1/2); V must stay below V_d."""
    v = np.asarray(v_td, dtype=float)
    if np.any(v >= v_diffusion):
        raise ValidationError("diode bias must stay below the diffusion potential")
    return c0 / np.sqrt(1.0 - v / v_diffusion)


def oscillation_frequency(circuit, v_td, v_vd=0.0):
    """f = 1 / (2 pi sqrt(L (C(V_VD) + C_TD(V_TD))))."""
    c_td = diode_capacitance(v_td, circuit.diode_c0, circuit.v_diffusion)
    c = circuit.varactor_capacitance(v_vd)
    return 1.0 / (2.0 * np.pi * np.sqrt(circuit.inductance * (c + c_td)))


def fit_capacitances(v_td, freqs, inductance=95e-9, v_diffusion=0.5):
    """Two-parameter (C, C0) least squares of the frequency-bias curve.

    Raises FitError for flat data or a frequency trend inconsistent with
    a depletion capacitance that grows with bias.
    """
    v = np.asarray(v_td, dtype=float)
    f = np.asarray(freqs, dtype=float)
    if v.size < 5:
        raise ValidationError("need at least 5 bias points")
    if np.ptp(f) < 1e-9 * np.mean(f):
        raise FitError("flat frequency data: oscillator not tuning")

    def resid(logp):
        c, c0 = np.exp(logp)
        c_td = c0 / np.sqrt(1.0 - v / v_diffusion)
        model = 1.0 / (2.0 * np.pi * np.sqrt(inductance * (c + c_td)))
        return (model - f) / f

    f_mean = np.mean(f)
    c_tot = 1.0 / ((2 * np.pi * f_mean) ** 2 * inductance)
    res = least_squares(resid, np.log([c_tot / 2, c_tot / 2]), method="lm", max_nfev=20000)
    c, c0 = np.exp(res.x)
    rms = float(np.sqrt(np.mean(res.fun**2)))
    if rms > 0.02:
        raise FitError(
            f"capacitance model does not describe the data (rms {rms:.1%}); "
            "check the frequency-bias trend"
        )
    dof = max(v.size - 2, 1)
    var = np.sum(res.fun**2) / dof
    try:
        cov = var * np.linalg.inv(res.jac.T @ res.jac)
        sig = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        sig = np.full(2, np.inf)
    ci = {"c": 1.96 * sig[0] * c, "c0": 1.96 * sig[1] * c0}
    return c, c0, ci


@dataclass
class IvCurve:
    voltage: np.ndarray
    current: np.ndarray
    forward_sweep: bool = True

    def __post_init__(self):
        self.voltage = np.asarray(self.voltage, dtype=float)
        self.current = np.asarray(self.current, dtype=float)
        order = np.argsort(self.voltage)
        if not np.all(order == np.arange(order.size)) and not np.all(
            order == np.arange(order.size)[::-1]
        ):
            raise ValidationError("voltage sweep must be monotone")
        if self.voltage[0] > self.voltage[-1]:
            self.voltage = self.voltage[::-1]
            self.current = self.current[::-1]
            self.forward_sweep = False


@dataclass
class NdrResult:
    intervals: list  # [(v_lo, v_hi), ...]
    peak: tuple  # (V_p, I_p)
    valley: tuple  # (V_v, I_v)


def negative_resistance_region(iv, smooth_points=3):
    """Bias intervals where the smoothed differential conductance is negative.

    A monotone curve yields an empty result (not an error). Reports the
    peak and valley bracketing the widest interval.
    """
    if iv.voltage.size < 10:
        raise ValidationError("need at least 10 I-V points")
    i_s = iv.current
    if smooth_points > 1:
        k = np.ones(smooth_points) / smooth_points
        i_s = np.convolve(iv.current, k, mode="same")
        i_s[0], i_s[-1] = iv.current[0], iv.current[-1]
    didv = np.gradient(i_s, iv.voltage)
    neg = didv < 0
    intervals = []
    start = None
    for k in range(neg.size):
        if neg[k] and start is None:
            start = k
        elif not neg[k] and start is not None:
            intervals.append((iv.voltage[start], iv.voltage[k]))
            start = None
    if start is not None:
        intervals.append((iv.voltage[start], iv.voltage[-1]))
    if not intervals:
        return NdrResult(intervals=[], peak=None, valley=None)
    widest = max(intervals, key=lambda ab: ab[1] - ab[0])
    in_lo = np.searchsorted(iv.voltage, widest[0])
    in_hi = np.searchsorted(iv.voltage, widest[1], side="right") - 1
    k_peak = max(in_lo - 1, 0)
    k_val = min(in_hi + 1, iv.voltage.size - 1)
    return NdrResult(
        intervals=intervals,
        peak=(float(iv.voltage[k_peak]), float(iv.current[k_peak])),
        valley=(float(iv.voltage[k_val]), float(iv.current[k_val])),
    )


@dataclass
class WaveformRecord:
    samples: np.ndarray
    sample_rate: float  # Hz

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.size == 0:
            raise ValidationError("empty waveform")
        if self.sample_rate <= 0:
            raise ValidationError("sample rate must be positive")

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


@dataclass
class EnvelopeResult:
    envelope: np.ndarray
    mean: float
    std: float
    hist_counts: np.ndarray = field(repr=False)
    hist_edges: np.ndarray = field(repr=False)


def analyze_waveform(record, center_hz, bandwidth_hz, hist_bins=5000):
    """Brick-wall bandpass at the carrier, then analytic-signal envelope.

    The analytic signal doubles the positive-frequency half of the
    spectrum; envelope statistics use a 5000-bin histogram.
    """
    nyquist = record.sample_rate / 2.0
    lo = center_hz - bandwidth_hz / 2.0
    hi = center_hz + bandwidth_hz / 2.0
    if lo <= 0 or hi >= nyquist:
        raise ValidationError("band must lie strictly inside (0, Nyquist)")
    n = record.samples.size
    spec = np.fft.fft(record.samples)
    freqs = np.fft.fftfreq(n, d=1.0 / record.sample_rate)
    keep = (freqs >= lo) & (freqs <= hi)
    analytic_spec = np.zeros_like(spec)
    analytic_spec[keep] = 2.0 * spec[keep]
    envelope = np.abs(np.fft.ifft(analytic_spec))
    lo_e, hi_e = float(envelope.min()), float(envelope.max())
    pad = max((hi_e - lo_e) * 1e-9, abs(hi_e) * 1e-12, 1e-30)
    counts, edges = np.histogram(envelope, bins=hist_bins, range=(lo_e - pad, hi_e + pad))
    return EnvelopeResult(
        envelope=envelope,
        mean=float(np.mean(envelope)),
        std=float(np.std(envelope)),
        hist_counts=counts,
        hist_edges=edges,
    )


def power_spectrum(record, zero_pad_to=None):
    """Zero-padded DFT power spectrum in dBm into 50 Ohm.

    X_k is the plain DFT of the record padded to zero_pad_to samples; the
    rms amplitude is |X_k| / (sqrt(2) N/2) with N the original length, and
    P = 10 log10(rms^2 / (0.001 * 50)). Zero bins are floored instead of
    returning -inf.
    """
    n = record.samples.size
    n_pad = n if zero_pad_to is None else int(zero_pad_to)
    if n_pad < n:
        raise ValidationError("zero_pad_to must not truncate the record")
    x = np.fft.rfft(record.samples, n=n_pad)
    freqs = np.fft.rfftfreq(n_pad, d=1.0 / record.sample_rate)
    rms = np.abs(x) / (np.sqrt(2.0) * n / 2.0)
    p_mw = rms**2 / (0.001 * 50.0)
    floor = 10.0 ** (SPECTRUM_FLOOR_DBM / 10.0)
    return freqs, 10.0 * np.log10(np.maximum(p_mw, floor))


def quantize_8bit(samples, full_scale):
    """8-bit ADC model: rounds to 256 levels across +/- full_scale."""
    lsb = 2.0 * full_scale / 2**8
    return np.clip(np.round(np.asarray(samples) / lsb), -128, 127) * lsb


def load_waveform(path, sidecar=None):
    """Read a waveform from CSV (t, v) or raw little-endian float32 plus a
    JSON sidecar holding sample_rate_hz and optional scale."""
    import json
    from pathlib import Path

    path = Path(path)
    if path.suffix == ".csv":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        dt = data[1, 0] - data[0, 0]
        return WaveformRecord(samples=data[:, 1], sample_rate=1.0 / dt)
    meta = json.loads(Path(sidecar).read_text())
    raw = np.fromfile(path, dtype="<f4").astype(float)
    return WaveformRecord(
        samples=raw * meta.get("scale", 1.0), sample_rate=meta["sample_rate_hz"]
    )


def spectrum_csv(record, path, zero_pad_to=None):
    f, p = power_spectrum(record, zero_pad_to)
    np.savetxt(path, np.column_stack([f, p]), delimiter=",", header="f_hz,p_dbm", comments="")


def stats_dict(result):
    return {
        "mean_v": result.mean,
        "std_v": result.std,
        "relative_fluctuation": result.std / result.mean if result.mean else float("inf"),
    }
