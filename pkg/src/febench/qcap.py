"""Quantum/tunneling capacitance of microwave-driven two-level electrons.

All detunings cross module boundaries in Hz; conversion to joules happens
only inside the capacitance kernels. The single-electron kernel is much
narrower (MHz scale) than typical distribution bins (tens of MHz), so
ensemble sums integrate the kernel across each bin (counts are treated as
uniform densities over their bin width) rather than sampling bin centers.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import H, K_B
from .errors import CoverageWarning, LinearizationWarning, RangeError, ValidationError

LINEAR_FM_AMPLITUDE_HZ = 470e6  # onset of visible nonlinearity in the FM response


@dataclass
class TwoLevelDriveParams:
    """Drive/readout parameters of the two-level Rydberg electron."""

    rabi_hz: float  # 2 t_c / h
    temperature: float  # K
    delta_q: float  # C, induced-charge difference between the two states
    probe_freq_hz: float = 120.94e6
    relaxation_rate_hz: float = 1e6

    def __post_init__(self):
        if self.rabi_hz <= 0 or self.temperature <= 0 or self.delta_q <= 0:
            raise ValidationError("rabi, temperature and delta_q must be positive")


def population_difference(delta_e_hz, temperature):
    """Thermal population difference chi = tanh(h dE / 2 kB T)."""
    if temperature <= 0:
        raise ValidationError("temperature must be positive")
    return np.tanh(H * np.asarray(delta_e_hz) / (2.0 * K_B * temperature))


def single_electron_capacitance(eps_hz, params, include_tunneling=False):
    """Capacitance of one driven electron at detuning eps (Hz).

    Quantum term chi dq^2 (2t_c)^2 / (2 dE^3) with dE = sqrt(eps^2 + (2t_c)^2)
    in joules. The tunneling term carries the redistribution-rate rolloff
    1/(1 + (f_probe/relaxation)^2) and is excluded by default because the
    probe runs far above the relaxation rate.
    """
    eps = H * np.asarray(eps_hz, dtype=float)
    a = H * params.rabi_hz
    de = np.sqrt(eps**2 + a**2)
    chi = np.tanh(de / (2.0 * K_B * params.temperature))
    c = chi * params.delta_q**2 * a**2 / (2.0 * de**3)
    if include_tunneling:
        c = c + _tunneling_capacitance(eps, a, params)
    return c


def _tunneling_capacitance(eps_j, a_j, params):
    de = np.sqrt(eps_j**2 + a_j**2)
    x = de / (2.0 * K_B * params.temperature)
    dchi_deps = (1.0 / np.cosh(x)) ** 2 / (2.0 * K_B * params.temperature) * (eps_j / de)
    rolloff = 1.0 / (1.0 + (params.probe_freq_hz / params.relaxation_rate_hz) ** 2)
    return params.delta_q**2 * (eps_j / (2.0 * de)) * dchi_deps * rolloff


def kernel_cumulative(params, span_hz=None, include_tunneling=False):
    """Cumulative integral F(x) = int_-span^x C_1 de (de in Hz units).

    Returns (x_hz, F) on a composite grid: dense around the avoided
    crossing, geometric farther out to catch the thermal Lorentzian tail.
    """
    a = params.rabi_hz
    kt_hz = K_B * params.temperature / H
    if span_hz is None:
        span_hz = max(200.0 * a, 20.0 * kt_hz)
    inner = np.linspace(-32 * a, 32 * a, 1025)
    outer = np.geomspace(32 * a, span_hz, 160)
    x = np.unique(np.concatenate([-outer[::-1], inner, outer]))
    c = single_electron_capacitance(x, params, include_tunneling)
    f = np.concatenate([[0.0], np.cumsum(0.5 * (c[1:] + c[:-1]) * np.diff(x))])
    return x, f


def kernel_integral(params):
    """Total integral of C_1 over detuning in joule units, int C_1 d eps_J."""
    _, f = kernel_cumulative(params)
    return float(f[-1]) * H


class EnsembleCapacitance:
    """Precomputed C_N evaluator for one distribution and drive setting.

    Bin counts represent a piecewise-linear density (triangular window of
    half-width bin_hz around each center), so C_N stays C1-smooth even
    though the kernel is far narrower than a bin. The window integral
    comes from a double cumulative of the kernel, keeping evaluation exact
    and the total electron number conserved.
    """

    def __init__(self, dist, params, include_tunneling=False):
        self.dist = dist
        self.params = params
        self.bin_hz = dist.bin_hz
        self._include_tunneling = include_tunneling
        span = max(
            200.0 * params.rabi_hz,
            20.0 * K_B * params.temperature / H,
            4.0 * dist.bin_hz,
        )
        self._fx, f1 = kernel_cumulative(params, span, include_tunneling)
        self._f2 = np.concatenate(
            [[0.0], np.cumsum(0.5 * (f1[1:] + f1[:-1]) * np.diff(self._fx))]
        )
        # linear extension of the double cumulative beyond the table
        self._f2_slope_lo = f1[0]
        self._f2_slope_hi = f1[-1]
        self._span = span
        kernel_tail = 10.0 * params.rabi_hz
        spread = dist.eps_hz.max() - dist.eps_hz.min()
        if spread < kernel_tail:
            warnings.warn(
                "distribution narrower than 10x the drive rate: kernel tails "
                "are not covered",
                CoverageWarning,
            )

    def _f2_at(self, x):
        inside = np.interp(x, self._fx, self._f2)
        lo = x < self._fx[0]
        hi = x > self._fx[-1]
        if np.any(lo):
            inside = np.where(lo, self._f2[0] + self._f2_slope_lo * (x - self._fx[0]), inside)
        if np.any(hi):
            inside = np.where(hi, self._f2[-1] + self._f2_slope_hi * (x - self._fx[-1]), inside)
        return inside

    def _bin_averaged(self, delta_hz):
        d = np.asarray(delta_hz, dtype=float)
        w = self.bin_hz
        if w <= self.params.rabi_hz / 4.0:
            # bins far narrower than the kernel: pointwise evaluation is
            # exact and the window average would under-resolve the table
            return single_electron_capacitance(d, self.params, self._include_tunneling)
        return (self._f2_at(d + w) - 2.0 * self._f2_at(d) + self._f2_at(d - w)) / w**2

    def at(self, eps0_hz, weights=None, bins_mask=None):
        """C_N at ensemble detuning eps0 = f_ry_peak - f_MW (Hz)."""
        eps0 = np.atleast_1d(np.asarray(eps0_hz, dtype=float))
        counts = self.dist.counts if weights is None else weights
        eps_bins = self.dist.eps_hz
        if bins_mask is not None:
            counts = counts[bins_mask]
            eps_bins = eps_bins[bins_mask]
        delta = eps0[:, None] - eps_bins[None, :]
        c = self._bin_averaged(delta.ravel()).reshape(delta.shape)
        out = c @ counts
        return out if np.ndim(eps0_hz) else float(out[0])

    def derivative(self, eps0_hz, step_hz=None):
        """dC_N/d eps0 in F/Hz by central difference over one bin."""
        h = self.bin_hz if step_hz is None else step_hz
        return (self.at(np.asarray(eps0_hz) + h / 2) - self.at(np.asarray(eps0_hz) - h / 2)) / h


def ensemble_capacitance(eps0_hz, dist, params, include_tunneling=False):
    """Convolution C_N(eps0) = sum_i C_1(eps0 - eps_i) n_i over the bins."""
    return EnsembleCapacitance(dist, params, include_tunneling).at(eps0_hz)


def modulation_depth(f_mw_carrier_hz, f_ma_hz, dist, params, table=None):
    """Static capacitance C_0 and FM modulation amplitude dC at a carrier.

    dC = -h f_ma dC_N/d eps evaluated at the carrier detuning (the h
    cancels against the Hz-domain derivative). f_ma beyond the linear
    bound only warns: the response there is explored deliberately.
    """
    if f_ma_hz < 0:
        raise ValidationError("modulation amplitude must be nonnegative")
    if f_ma_hz > LINEAR_FM_AMPLITUDE_HZ:
        warnings.warn(
            f"f_ma = {f_ma_hz:.3g} Hz beyond the linear-response bound",
            LinearizationWarning,
        )
    eps0 = dist.f_ry_peak_hz - f_mw_carrier_hz
    support = dist.eps_hz
    margin = 2.0 * dist.bin_hz
    if not (support.min() - margin <= eps0 <= support.max() + margin):
        raise RangeError(
            f"carrier detuning {eps0:.3g} Hz outside the distribution support"
        )
    tab = table if table is not None else EnsembleCapacitance(dist, params)
    c0 = tab.at(eps0)
    dc = -f_ma_hz * tab.derivative(eps0)
    return float(c0), float(dc)
