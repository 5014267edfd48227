"""Vertical-motion bound states of an electron above a cryogenic surface.

Solves the 1D Schroedinger problem for the image-charge potential with an
optional pressing field, producing level energies (stored as E/h in Hz),
wavefunctions, mean heights, the 1->2 transition frequency and its Stark
response, and the transition dipole matrix element z12.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .constants import E_CHARGE, EPS_0, H, HBAR, M_E, RYDBERG_HZ
from .errors import GridError, NumericError, ValidationError

EV = E_CHARGE  # 1 eV in joules


@dataclass
class SurfaceParams:
    """Substrate and field parameters for the vertical potential."""

    dielectric_constant: float
    z0: float  # m, spectroscopy-consistent offset of the image pole
    barrier_v0: float  # J; np.inf selects the hard-wall model
    e_perp: float = 0.0  # V/m, pressing field

    def __post_init__(self):
        if self.dielectric_constant <= 1.0:
            raise ValidationError("dielectric constant must exceed 1")
        if self.z0 < 0:
            raise ValidationError("z0 must be nonnegative")
        if self.e_perp < 0:
            raise ValidationError("pressing field must be nonnegative")

    @property
    def lambda_image(self):
        """Image-charge strength (eps_s - 1)/(eps_s + 1)."""
        eps = self.dielectric_constant
        return (eps - 1.0) / (eps + 1.0)

    def with_field(self, e_perp):
        return SurfaceParams(self.dielectric_constant, self.z0, self.barrier_v0, e_perp)


def helium(e_perp=0.0, barrier_v0=1.0 * EV):
    """Liquid helium-4 defaults: eps_s = 1.056, z0 = 0.1 nm, 1 eV barrier."""
    return SurfaceParams(1.056, 0.1e-9, barrier_v0, e_perp)


def neon(e_perp=0.0, barrier_v0=0.7 * EV):
    """Solid neon defaults: eps_s = 1.244, z0 = 0.23 nm, 0.7 eV barrier."""
    return SurfaceParams(1.244, 0.23e-9, barrier_v0, e_perp)


@dataclass
class Grid1D:
    """Uniform grid for the vertical coordinate.

    z_min < 0 includes the in-substrate region needed by the finite
    barrier; the hard-wall model clamps the wavefunction at z = 0 and
    ignores z_min.
    """

    z_max: float
    n_points: int = 4000
    z_min: float = -2e-9

    def __post_init__(self):
        if self.n_points < 200:
            raise GridError("n_points must be >= 200")
        if self.z_max <= 0:
            raise GridError("z_max must be positive")

    @property
    def spacing(self):
        return (self.z_max - self.z_min) / (self.n_points - 1)


def helium_grid(n_points=4000):
    return Grid1D(z_max=150e-9, n_points=n_points)


def neon_grid(n_points=4000):
    return Grid1D(z_max=40e-9, n_points=n_points)


def potential_profile(params, z):
    """Piecewise potential V(z) in joules on the given coordinates.

    V = V0 for z <= 0 and -(e^2/4 pi eps0)(Lambda/4)/(z + z0) + e z E_perp
    for z > 0.
    """
    z = np.asarray(z, dtype=float)
    if params.z0 == 0.0 and np.any(z == 0.0):
        raise NumericError(
            "grid point at z = 0 with z0 = 0: exclude z = 0 from the Coulomb branch"
        )
    coul = E_CHARGE**2 / (4.0 * np.pi * EPS_0) * params.lambda_image / 4.0
    v = np.empty_like(z)
    below = z <= 0.0
    v[below] = params.barrier_v0 if np.isfinite(params.barrier_v0) else 0.0
    zp = z[~below] + params.z0
    if np.any(zp <= 0.0):
        raise NumericError("singular image potential: grid point at z + z0 <= 0")
    v[~below] = -coul / zp + E_CHARGE * z[~below] * params.e_perp
    return v


@dataclass
class EnergySpectrum:
    """Eigenvalues (Hz), wavefunctions and derived matrix elements."""

    z: np.ndarray  # m
    levels_hz: np.ndarray  # E_n / h
    wavefunctions: np.ndarray  # shape (n_states, n_points), sum |psi|^2 dz = 1
    mean_heights: np.ndarray  # <z>_n in m
    f12_hz: float
    z12: float  # |<1|z|2>| in m

    @property
    def spacing(self):
        return float(self.z[1] - self.z[0])


def solve_spectrum(params, grid, n_states=2):
    """Diagonalize the three-point finite-difference Hamiltonian.

    Returns the lowest n_states levels. Hard wall (barrier_v0 = inf) solves
    on z > 0 with psi(0) = psi(z_max) = 0; the finite barrier includes the
    z <= 0 region at constant V0.
    """
    if n_states < 2:
        raise ValidationError("n_states must be >= 2")
    hard_wall = not np.isfinite(params.barrier_v0)
    if hard_wall:
        dz = grid.z_max / (grid.n_points + 1)
        z = dz * np.arange(1, grid.n_points + 1)
    else:
        # keep z = 0 exactly on a node so the barrier edge does not move
        # between refinements (otherwise convergence degrades to O(h))
        dz0 = (grid.z_max - grid.z_min) / (grid.n_points - 1)
        n_neg = max(1, round(-grid.z_min / dz0))
        dz = grid.z_max / (grid.n_points - 1 - n_neg)
        z = dz * np.arange(-n_neg, grid.n_points - n_neg)
    v = potential_profile(params, z)
    if not hard_wall:
        # second-order treatment of the barrier step: the z = 0 node takes
        # the mean of the one-sided limits
        i0 = int(np.argmin(np.abs(z)))
        if abs(z[i0]) < 1e-15 and params.z0 > 0:
            coul = E_CHARGE**2 / (4.0 * np.pi * EPS_0) * params.lambda_image / 4.0
            v[i0] = 0.5 * (params.barrier_v0 - coul / params.z0)
    kin = HBAR**2 / (2.0 * M_E * dz**2)
    diag = 2.0 * kin + v
    offdiag = np.full(z.size - 1, -kin)
    try:
        evals, evecs = eigh_tridiagonal(
            diag, offdiag, select="i", select_range=(0, n_states - 1)
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy internal
        raise NumericError(
            f"eigensolver failed on grid n={grid.n_points}, dz={dz:g} m"
        ) from exc
    psi = evecs.T / np.sqrt(dz)  # sum |psi|^2 dz = 1
    # fix sign convention: positive lobe near the surface
    for k in range(psi.shape[0]):
        j = np.argmax(np.abs(psi[k]) > 1e-3 * np.max(np.abs(psi[k])))
        if psi[k, j] < 0:
            psi[k] *= -1.0
    mean_z = psi**2 @ z * dz
    z12 = abs(float(np.sum(psi[0] * z * psi[1]) * dz))
    levels_hz = evals / H
    return EnergySpectrum(
        z=z,
        levels_hz=levels_hz,
        wavefunctions=psi,
        mean_heights=mean_z,
        f12_hz=float(levels_hz[1] - levels_hz[0]),
        z12=z12,
    )


def hydrogenic_levels(lambda_image, n_z):
    """Analytic limit E_n = -Ry (Lambda/4)^2 / n^2, returned as E/h in Hz."""
    if n_z < 1:
        raise ValidationError("n_z must be >= 1")
    return -RYDBERG_HZ * (lambda_image / 4.0) ** 2 / float(n_z) ** 2


@dataclass
class StarkCurve:
    """f12 versus pressing field, with the first-order estimate alongside."""

    e_perp: np.ndarray  # V/m
    f12_hz: np.ndarray
    f12_first_order_hz: np.ndarray
    mean_heights: np.ndarray = field(repr=False, default=None)  # (n_fields, 2)

    def f12_at(self, e_perp):
        """Interpolate f12 at arbitrary fields inside the solved range."""
        e = np.asarray(e_perp, dtype=float)
        if np.any(e < self.e_perp[0] - 1e-12) or np.any(e > self.e_perp[-1] + 1e-12):
            raise ValidationError("field outside the solved Stark-curve range")
        return np.interp(e, self.e_perp, self.f12_hz)


def stark_response(params, grid, e_perp_list, n_states=2):
    """Re-diagonalize per field point; also report the linear-shift estimate.

    The first-order curve is f12(0) + e E (<2|z|2> - <1|z|1>)/h evaluated
    with the zero-field wavefunctions.
    """
    e_perp_list = np.asarray(e_perp_list, dtype=float)
    if e_perp_list.size == 0:
        raise ValidationError("field list must be nonempty")
    if np.any(e_perp_list < 0):
        raise ValidationError("fields must be nonnegative")
    base = solve_spectrum(params.with_field(0.0), grid, n_states)
    slope_hz = E_CHARGE * (base.mean_heights[1] - base.mean_heights[0]) / H
    f12 = np.empty_like(e_perp_list)
    heights = np.empty((e_perp_list.size, 2))
    for i, e in enumerate(e_perp_list):
        spec = solve_spectrum(params.with_field(e), grid, n_states)
        if spec.mean_heights[1] > grid.z_max / 3.0:
            raise GridError(
                f"<z>_2 = {spec.mean_heights[1]:g} m exceeds z_max/3 at E = {e:g} V/m"
            )
        f12[i] = spec.f12_hz
        heights[i] = spec.mean_heights[:2]
    first_order = base.f12_hz + slope_hz * e_perp_list
    return StarkCurve(e_perp_list, f12, first_order, heights)


def rabi_from_field(e_drive, z12):
    """Rydberg drive rate 2t_c/h = e E z12 / h in Hz."""
    if e_drive < 0 or z12 <= 0:
        raise ValidationError("drive field and z12 must be positive")
    return E_CHARGE * e_drive * z12 / H


def field_from_rabi(rabi_hz, z12):
    """Inverse of rabi_from_field: drive field in V/m."""
    if rabi_hz < 0 or z12 <= 0:
        raise ValidationError("rate and z12 must be positive")
    return rabi_hz * H / (E_CHARGE * z12)


def count_nodes(psi, rel_floor=1e-6):
    """Interior sign changes of a wavefunction, ignoring numerical dust."""
    a = np.asarray(psi)
    a = a[np.abs(a) > rel_floor * np.max(np.abs(a))]
    return int(np.sum(np.sign(a[:-1]) * np.sign(a[1:]) < 0))


def export_csv(spectrum, params, path):
    """Write z[m], V[J], psi1, psi2 columns."""
    v = potential_profile(params, spectrum.z)
    data = np.column_stack([spectrum.z, v, spectrum.wavefunctions[0], spectrum.wavefunctions[1]])
    header = "z_m,V_J,psi1,psi2"
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def summary_dict(spectrum):
    """JSON-ready spectrum summary."""
    return {
        "levels_hz": [float(x) for x in spectrum.levels_hz],
        "f12_hz": spectrum.f12_hz,
        "z12_m": spectrum.z12,
        "mean_heights_m": [float(x) for x in spectrum.mean_heights],
    }
