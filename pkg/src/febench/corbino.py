"""Axisymmetric electrostatics of the parallel-plate Corbino cell.

Red-black SOR relaxation on an (r, z) grid gives the cell potential for
arbitrary ring-electrode biases and an optional electron sheet at the
midplane. The saturated electron pool is found by adding charge until the
vertical field just above the layer cancels; the resulting density and
pressing-field profiles map through a Stark curve into the distribution
of electrons per Rydberg detuning.
"""

from dataclasses import dataclass

import numba
import numpy as np

from .constants import E_CHARGE, EPS_0
from .errors import NumericError, ValidationError


@dataclass
class CorbinoGeometry:
    """Cell dimensions and grid. Ring-gap widths are documented defaults;
    only the plate spacing and electrode radii are quoted device values."""

    plate_gap: float = 2e-3  # m, vertical plate separation D
    outer_radius: float = 7.5e-3  # m
    center_electrode_radius: float = 4e-3  # m
    middle_electrode_outer_radius: float = 5.85e-3
    outer_electrode_inner_radius: float = 6.10e-3
    ring_gap: float = 0.25e-3  # m, between center and middle electrodes
    n_z: int = 200  # vertical segments (nodes = n_z + 1)
    n_r: int = 500  # radial segments (nodes = n_r + 1)
    electron_height: float = None  # m, defaults to plate_gap / 2

    def __post_init__(self):
        if self.plate_gap <= 0 or self.outer_radius <= 0:
            raise ValidationError("plate gap and outer radius must be positive")
        if self.n_z < 100 or self.n_r < 250:
            raise ValidationError("grid must be at least half the reference density")
        if self.electron_height is None:
            self.electron_height = self.plate_gap / 2.0
        i_e = self.electron_height / (self.plate_gap / self.n_z)
        if abs(i_e - round(i_e)) > 1e-9:
            raise ValidationError("electron plane must lie on a grid row")

    @property
    def dz(self):
        return self.plate_gap / self.n_z

    @property
    def dr(self):
        return self.outer_radius / self.n_r

    @property
    def electron_row(self):
        return round(self.electron_height / self.dz)

    @property
    def r_nodes(self):
        return self.dr * np.arange(self.n_r + 1)


@dataclass
class BiasConfig:
    """Electrode voltages; BG drives the middle and outer rings together."""

    v_bc: float = 12.0
    v_bg: float = -90.0
    v_top_center: float = 0.0
    v_top_middle: float = 0.0
    v_top_outer: float = 0.0

    def __post_init__(self):
        vals = [self.v_bc, self.v_bg, self.v_top_center, self.v_top_middle, self.v_top_outer]
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError("electrode voltages must be finite")


def _plate_profile(geo, v_center, v_middle, v_outer):
    """Electrode potentials along one plate, linear across the ring gaps."""
    r = geo.r_nodes
    v = np.empty_like(r)
    r1 = geo.center_electrode_radius
    r2a = r1 + geo.ring_gap
    r2b = geo.middle_electrode_outer_radius
    r3a = geo.outer_electrode_inner_radius
    v[r <= r1] = v_center
    m = (r > r1) & (r < r2a)
    v[m] = v_center + (v_middle - v_center) * (r[m] - r1) / (r2a - r1)
    v[(r >= r2a) & (r <= r2b)] = v_middle
    m = (r > r2b) & (r < r3a)
    v[m] = v_middle + (v_outer - v_middle) * (r[m] - r2b) / (r3a - r2b)
    v[r >= r3a] = v_outer
    return v


@numba.njit(cache=True)
def _sor_sweeps(phi, fixed, rhs, inv_dr2, inv_dz2, r_over_dr, omega, tol_v, max_iter):
    """Red-black SOR on the axisymmetric 5-point stencil.

    Outer radial boundary is reflective (Neumann); the axis uses the
    regularized stencil. Returns (iterations, residual); residual is the
    largest Jacobi increment in volts.
    """
    nz, nr = phi.shape
    res = 0.0
    for it in range(max_iter):
        res = 0.0
        for color in range(2):
            for i in range(1, nz - 1):
                jstart = (i + color) % 2
                for j in range(jstart, nr, 2):
                    if fixed[i, j]:
                        continue
                    if j == 0:
                        ce = 4.0 * inv_dr2
                        cw = 0.0
                        diag = 4.0 * inv_dr2 + 2.0 * inv_dz2
                        acc = ce * phi[i, 1]
                    elif j == nr - 1:
                        cw = inv_dr2 * (1.0 - 0.5 / r_over_dr[j])
                        ce = inv_dr2 * (1.0 + 0.5 / r_over_dr[j])
                        diag = cw + ce + 2.0 * inv_dz2
                        acc = (cw + ce) * phi[i, j - 1]
                    else:
                        cw = inv_dr2 * (1.0 - 0.5 / r_over_dr[j])
                        ce = inv_dr2 * (1.0 + 0.5 / r_over_dr[j])
                        diag = cw + ce + 2.0 * inv_dz2
                        acc = cw * phi[i, j - 1] + ce * phi[i, j + 1]
                    acc += inv_dz2 * (phi[i - 1, j] + phi[i + 1, j]) + rhs[i, j]
                    new = acc / diag
                    d = new - phi[i, j]
                    ad = d if d >= 0 else -d
                    if ad > res:
                        res = ad
                    phi[i, j] += omega * d
        if res < tol_v:
            return it + 1, res
    return max_iter, res


@dataclass
class CellSolution:
    """Converged potential with grid metadata."""

    phi: np.ndarray  # (n_z+1, n_r+1), volts
    geo: CorbinoGeometry
    iterations: int
    residual: float

    def e_z_at_row(self, i):
        """Central-difference vertical field -dphi/dz on row i."""
        return -(self.phi[i + 1] - self.phi[i - 1]) / (2.0 * self.geo.dz)

    def e_z_above_row(self, i):
        """One-sided field just above row i."""
        return -(self.phi[i + 1] - self.phi[i]) / self.geo.dz

    def plate_charge(self):
        """Total induced charge on both plates via Gauss's law (C)."""
        geo = self.geo
        r = geo.r_nodes
        w = 2.0 * np.pi * r * geo.dr
        w[0] = np.pi * (geo.dr / 2.0) ** 2
        w[-1] = np.pi * (r[-1] ** 2 - (r[-1] - geo.dr / 2.0) ** 2)
        # surface charge from the field entering the cell at each plate
        e_bot = -(self.phi[1] - self.phi[0]) / geo.dz
        e_top = (self.phi[-1] - self.phi[-2]) / geo.dz
        return float(EPS_0 * np.sum((e_bot + e_top) * w))


def solve_laplace(geo, bias, charge_plane=None, phi0=None, tol=1e-8, max_iter=200000):
    """Relaxation solve of the cell potential.

    charge_plane, when given, is the electron surface density n_s(r) in
    1/m^2 on the electron row (charge -e n_s). Residual converges below
    tol times the largest boundary voltage; non-convergence raises
    NumericError with the residual.
    """
    nz, nr = geo.n_z + 1, geo.n_r + 1
    phi = np.zeros((nz, nr)) if phi0 is None else phi0.copy()
    fixed = np.zeros((nz, nr), dtype=np.bool_)
    fixed[0, :] = fixed[-1, :] = True
    phi[0, :] = _plate_profile(geo, bias.v_bc, bias.v_bg, bias.v_bg)
    phi[-1, :] = _plate_profile(geo, bias.v_top_center, bias.v_top_middle, bias.v_top_outer)

    rhs = np.zeros((nz, nr))
    if charge_plane is not None:
        n_s = np.asarray(charge_plane, dtype=float)
        if n_s.shape != (nr,):
            raise ValidationError(f"charge plane must have {nr} radial nodes")
        rhs[geo.electron_row, :] = -E_CHARGE * n_s / (EPS_0 * geo.dz)

    v_scale = max(1.0, np.max(np.abs(phi[0])), np.max(np.abs(phi[-1])))
    omega = 2.0 / (1.0 + np.sin(np.pi / max(nz, nr)))
    r_over_dr = np.arange(nr, dtype=float)
    iters, res = _sor_sweeps(
        phi, fixed, rhs, 1.0 / geo.dr**2, 1.0 / geo.dz**2, r_over_dr,
        omega, tol * v_scale, max_iter,
    )
    if res >= tol * v_scale:
        raise NumericError(
            f"SOR did not converge: residual {res:.3e} V after {iters} sweeps"
        )
    return CellSolution(phi=phi, geo=geo, iterations=iters, residual=res)


@dataclass
class RadialProfile:
    """Saturated electron density and pressing field versus radius."""

    r: np.ndarray  # m
    n_s: np.ndarray  # 1/m^2
    e_z: np.ndarray  # V/m, field experienced at the electron plane
    empty: bool = False
    residual_field: float = 0.0  # V/m, worst |E_above| over occupied region

    def total_electrons(self, geo):
        w = annulus_areas(geo)
        return float(np.sum(self.n_s * w))


def annulus_areas(geo):
    r = geo.r_nodes
    w = 2.0 * np.pi * r * geo.dr
    w[0] = np.pi * (geo.dr / 2.0) ** 2
    w[-1] = np.pi * (r[-1] ** 2 - (r[-1] - geo.dr / 2.0) ** 2)
    return w


def saturated_density(geo, bias, eta=0.5, tol_rel=1e-3, max_outer=400):
    """Fill the cell with electrons until the field above the layer cancels.

    Fixed-point iteration n_s <- n_s + eta eps0 E_above / e with a
    non-negativity clamp. The reported e_z is the central-difference field
    at the plane (the pressing field the electrons experience); the
    saturation condition uses the one-sided field just above the layer,
    which must vanish over the occupied region.
    """
    i_e = geo.electron_row
    nr = geo.n_r + 1
    n_s = np.zeros(nr)
    target = abs(bias.v_bc) / geo.plate_gap
    if target == 0.0:
        sol = solve_laplace(geo, bias)
        return RadialProfile(geo.r_nodes, n_s, sol.e_z_at_row(i_e), empty=True)

    sol = solve_laplace(geo, bias, charge_plane=n_s)
    phi0 = sol.phi
    for _ in range(max_outer):
        e_above = sol.e_z_above_row(i_e)
        update = eta * EPS_0 * e_above / E_CHARGE
        n_s = np.maximum(n_s + update, 0.0)
        sol = solve_laplace(geo, bias, charge_plane=n_s, phi0=phi0)
        phi0 = sol.phi
        occupied = n_s > 0
        resid = np.max(np.abs(sol.e_z_above_row(i_e)[occupied])) if occupied.any() else 0.0
        if occupied.any() and resid < tol_rel * target:
            break
    else:
        raise NumericError(
            f"saturation iteration did not converge: residual field {resid:.3e} V/m"
        )
    if not (n_s > 0).any():
        return RadialProfile(geo.r_nodes, n_s, sol.e_z_at_row(i_e), empty=True)
    return RadialProfile(
        r=geo.r_nodes,
        n_s=n_s,
        e_z=sol.e_z_at_row(i_e),
        empty=False,
        residual_field=float(resid),
    )


@dataclass
class DetuningDistribution:
    """Electron count per Rydberg-frequency bin.

    f_ry_hz are bin centers of the absolute Rydberg transition frequency;
    eps_hz = f_ry_peak_hz - f_ry_hz gives each bin's detuning offset in
    the ensemble convention.
    """

    f_ry_hz: np.ndarray
    counts: np.ndarray
    total_electrons: float
    f_ry_peak_hz: float
    bin_hz: float
    gauss_width_hz: float = 0.0

    def __post_init__(self):
        if np.any(self.counts < -1e-9):
            raise ValidationError("bin counts must be nonnegative")
        total = float(np.sum(self.counts))
        if self.total_electrons > 0 and abs(total - self.total_electrons) > 1e-3 * self.total_electrons:
            raise ValidationError("bin counts do not sum to the electron total")

    @property
    def eps_hz(self):
        return self.f_ry_peak_hz - self.f_ry_hz


def _gauss_kernel(sigma_hz, bin_hz):
    half = max(1, int(np.ceil(5.0 * sigma_hz / bin_hz)))
    x = bin_hz * np.arange(-half, half + 1)
    k = np.exp(-0.5 * (x / sigma_hz) ** 2)
    return k / k.sum()


def detuning_distribution(profile, stark_curve, gauss_width_hz=1e9, bin_hz=50e6, geo=None):
    """Bin annulus electron counts by Stark-shifted transition frequency.

    Counts are convolved with a normalized Gaussian of width gauss_width_hz
    (standard deviation) for inhomogeneous broadening; normalization is
    preserved exactly because the bin grid is extended by the kernel size.
    """
    if geo is None:
        geo = CorbinoGeometry()
    occupied = profile.n_s > 0
    if not occupied.any():
        raise ValidationError("profile holds no electrons")
    weights = (profile.n_s * annulus_areas(geo))[occupied]
    f_ry = np.asarray(stark_curve.f12_at(profile.e_z[occupied]), dtype=float)

    lo = f_ry.min() - 2 * bin_hz
    hi = f_ry.max() + 2 * bin_hz
    edges = np.arange(lo, hi + bin_hz, bin_hz)
    hist, edges = np.histogram(f_ry, bins=edges, weights=weights)
    centers = 0.5 * (edges[:-1] + edges[1:])

    if gauss_width_hz > 0:
        kernel = _gauss_kernel(gauss_width_hz, bin_hz)
        hist = np.convolve(hist, kernel, mode="full")
        half = (kernel.size - 1) // 2
        centers = centers[0] + bin_hz * (np.arange(hist.size) - half)

    peak = float(centers[np.argmax(hist)])
    return DetuningDistribution(
        f_ry_hz=centers,
        counts=hist,
        total_electrons=float(np.sum(weights)),
        f_ry_peak_hz=peak,
        bin_hz=bin_hz,
        gauss_width_hz=gauss_width_hz,
    )


def ring_image_potential(q, a, z0, r, z, plate_gap, n_images=40):
    """Free-space image-charge series for a charged ring between grounded
    plates; oracle for the relaxation Green's function."""
    from scipy.special import ellipk

    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    phi = np.zeros(np.broadcast(r, z).shape)
    for n in range(-n_images, n_images + 1):
        for sign, zq in ((+1.0, 2 * n * plate_gap + z0), (-1.0, 2 * n * plate_gap - z0)):
            d2 = (r + a) ** 2 + (z - zq) ** 2
            m = np.clip(4.0 * r * a / d2, 0.0, 1.0 - 1e-15)
            phi = phi + sign * (2.0 / np.pi) * ellipk(m) / np.sqrt(d2)
    return q / (4.0 * np.pi * EPS_0) * phi


def export_profile_csv(profile, path):
    data = np.column_stack([profile.r, profile.n_s, profile.e_z])
    np.savetxt(path, data, delimiter=",", header="r_m,n_s_per_m2,E_z_V_per_m", comments="")


def export_distribution_csv(dist, path):
    data = np.column_stack([dist.eps_hz, dist.counts])
    np.savetxt(path, data, delimiter=",", header="epsilon_hz,count", comments="")
