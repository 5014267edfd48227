"""Charge-photon to spin-photon coupling chain and gate-fidelity estimates.

Frequencies enter in Hz and are converted to angular rates internally;
loss rates are angular (rad/s) as in the printed closed forms. Scenario
loss values are inputs: the numbers behind the thermal / natural-neon /
22Ne labels live in external measurement references, so the module ships
only documented example sets that reproduce the in-text chain.
"""

from dataclasses import dataclass

import numpy as np

from .constants import BOHR_MAGNETON, E_CHARGE, G_FACTOR, HBAR
from .errors import ValidationError

TWO_PI = 2.0 * np.pi


@dataclass
class SpinChargeParams:
    """Charge qubit, Zeeman and resonator frequencies (all Hz except the
    dimensionless lever arm)."""

    two_t_c_hz: float  # charge splitting 2 t_c / h
    b_par_hz: float  # Zeeman splitting b_par / 2 pi
    b_perp_hz: float  # gradient-induced transverse term / 2 pi
    lever_arm: float  # alpha
    zpf_hz: float  # e V_0 / h
    resonator_hz: float
    detuning_hz: float = 0.0  # charge detuning eps / h

    def __post_init__(self):
        if self.two_t_c_hz <= 0:
            raise ValidationError("2t_c must be positive")
        if self.b_par_hz < 0 or self.b_perp_hz < 0:
            raise ValidationError("Zeeman terms must be nonnegative")
        if not 0.0 < self.lever_arm < 1.0:
            raise ValidationError("lever arm must lie in (0, 1)")


@dataclass
class CouplingResult:
    g_c_rad: float
    lambda_mix: float
    g_s_rad: float
    phi_plus: float
    phi_minus: float

    @property
    def g_c_hz(self):
        return self.g_c_rad / TWO_PI

    @property
    def g_s_hz(self):
        return self.g_s_rad / TWO_PI


def couplings(p):
    """Charge-photon coupling, spin-charge mixing angle and spin-photon
    coupling.

    g_c = 2 pi alpha (e V0/h) cos(theta) with theta = arctan(eps/2t_c);
    phi_pm = arctan(b_perp / (2t_c +/- b_par)) (quadrant-correct, so scans
    may drive 2t_c - b_par negative); Lambda = sin((phi_+ + phi_-)/2).
    """
    theta = np.arctan2(p.detuning_hz, p.two_t_c_hz)
    g_c = TWO_PI * p.lever_arm * p.zpf_hz * np.cos(theta)
    phi_p = np.arctan2(p.b_perp_hz, p.two_t_c_hz + p.b_par_hz)
    phi_m = np.arctan2(p.b_perp_hz, p.two_t_c_hz - p.b_par_hz)
    lam = np.sin(0.5 * (phi_p + phi_m))
    return CouplingResult(
        g_c_rad=float(g_c),
        lambda_mix=float(lam),
        g_s_rad=float(lam * g_c),
        phi_plus=float(phi_p),
        phi_minus=float(phi_m),
    )


def spin_rabi_frequency(p, charge_rabi_hz):
    """EDSR spin Rabi rate f_R^s = Lambda f_R^c (Hz)."""
    return couplings(p).lambda_mix * charge_rabi_hz


@dataclass
class LossScenario:
    """High-frequency and quasistatic loss rates (rad/s) plus the bare
    resonator decay."""

    gamma_c: float
    gamma_s: float
    gamma_c_star: float
    gamma_s_star: float
    kappa: float
    label: str = ""

    def __post_init__(self):
        rates = [self.gamma_c, self.gamma_s, self.gamma_c_star, self.gamma_s_star, self.kappa]
        if any(r < 0 for r in rates):
            raise ValidationError("loss rates must be nonnegative")


def reference_scenario():
    """Charge loss back-solved so Lambda^2 gamma_c / 2 pi = 7 kHz at the
    reference operating point (Lambda = 0.1893), with kappa/2pi = 0.1 MHz."""
    lam2 = couplings(reference_operating_point()).lambda_mix ** 2
    return LossScenario(
        gamma_c=TWO_PI * 7e3 / lam2,
        gamma_s=0.0,
        gamma_c_star=0.0,
        gamma_s_star=0.0,
        kappa=TWO_PI * 0.1e6,
        label="reference",
    )


def natural_neon_scenario():
    """Adds the quoted 10 kHz nuclear-spin linewidth of natural neon on
    top of the back-solved charge loss."""
    base = reference_scenario()
    return LossScenario(
        gamma_c=base.gamma_c,
        gamma_s=TWO_PI * 10e3,
        gamma_c_star=0.0,
        gamma_s_star=TWO_PI * 10e3,
        kappa=base.kappa,
        label="natural-neon",
    )


def reference_operating_point():
    """2t_c/2pi = 8 GHz, b_par = resonator = 4.8 GHz, b_perp = 1 GHz,
    alpha = 0.05, eV0/h = 3 GHz, charge sweet spot."""
    return SpinChargeParams(
        two_t_c_hz=8e9,
        b_par_hz=4.8e9,
        b_perp_hz=1e9,
        lever_arm=0.05,
        zpf_hz=3e9,
        resonator_hz=4.81e9,
    )


@dataclass
class EffectiveLosses:
    gamma_s_eff: float  # rad/s
    gamma_s_star_eff: float  # rad/s
    kappa_eff: float  # rad/s
    delta_c: float  # rad/s, charge-resonator detuning


def effective_losses(p, scenario):
    """Dressed spin and resonator loss rates at the charge sweet spot.

    gamma_s' = Lambda^2 gamma_c + (1 - Lambda^2) gamma_s; the quasistatic
    rate combines in quadrature with the cos(phi_pm) average; kappa' adds
    the Purcell channel g_c^2 gamma_c / Delta_c^2.
    """
    if p.detuning_hz != 0.0:
        raise ValidationError("the dressed-loss forms hold at the sweet spot (eps = 0)")
    c = couplings(p)
    lam2 = c.lambda_mix**2
    gamma_s_eff = lam2 * scenario.gamma_c + (1.0 - lam2) * scenario.gamma_s
    b_par = TWO_PI * p.b_par_hz
    cos_avg = 0.5 * (np.cos(c.phi_plus) + np.cos(c.phi_minus))
    gamma_s_star_eff = np.sqrt(
        (lam2 * scenario.gamma_c_star / b_par) ** 2
        + (cos_avg * scenario.gamma_s_star) ** 2
    )
    delta_c = TWO_PI * (np.hypot(p.detuning_hz, p.two_t_c_hz) - p.resonator_hz)
    if delta_c == 0.0:
        raise ValidationError("charge state resonant with the cavity: kappa' diverges")
    kappa_eff = scenario.kappa + c.g_c_rad**2 * scenario.gamma_c / delta_c**2
    return EffectiveLosses(
        gamma_s_eff=float(gamma_s_eff),
        gamma_s_star_eff=float(gamma_s_star_eff),
        kappa_eff=float(kappa_eff),
        delta_c=float(delta_c),
    )


def cooperativity(p, scenario):
    """C = g_s^2 / (gamma_s' kappa')."""
    c = couplings(p)
    eff = effective_losses(p, scenario)
    if eff.gamma_s_eff == 0.0 or eff.kappa_eff == 0.0:
        return float("inf")
    return float(c.g_s_rad**2 / (eff.gamma_s_eff * eff.kappa_eff))


@dataclass
class GateConfig:
    charge_rabi_hz: float = 10e6  # f_R^c
    drive_detuning_rad: float = 0.0  # delta in F_1
    beta: float = 10.0  # dispersive ratio for the two-qubit gate

    def __post_init__(self):
        if self.charge_rabi_hz <= 0:
            raise ValidationError("charge Rabi frequency must be positive")


def single_qubit_fidelity(p, scenario, gate, delta_rad=None):
    """Average pi-gate fidelity F_1(delta) at fixed drive detuning."""
    eff = effective_losses(p, scenario)
    f_rs = spin_rabi_frequency(p, gate.charge_rabi_hz)
    if f_rs <= 0:
        raise ValidationError("spin Rabi rate vanishes: gate undefined")
    t_g = 1.0 / (2.0 * f_rs)
    delta = gate.drive_detuning_rad if delta_rad is None else delta_rad
    g = eff.gamma_s_eff
    return float(
        (3.0 + np.exp(-2.0 * t_g * g) + 2.0 * np.exp(-t_g * g) * np.cos(t_g * delta)) / 6.0
    )


def average_single_qubit_fidelity(p, scenario, gate):
    """F_1 averaged over Gaussian quasistatic detuning noise."""
    eff = effective_losses(p, scenario)
    f_rs = spin_rabi_frequency(p, gate.charge_rabi_hz)
    if f_rs <= 0:
        raise ValidationError("spin Rabi rate vanishes: gate undefined")
    t_g = 1.0 / (2.0 * f_rs)
    g = eff.gamma_s_eff
    gs = eff.gamma_s_star_eff
    return float(
        (3.0 + np.exp(-2.0 * t_g * g)
         + 2.0 * np.exp(-t_g * g) * np.exp(-((t_g * gs) ** 2) / 2.0)) / 6.0
    )


def two_qubit_fidelity(p, scenario, gate):
    """Dispersive iSWAP fidelity F_2 = 1 - (2 pi / 5 g_s)(2 gamma_s' beta + kappa/beta)."""
    if gate.beta <= 1.0:
        raise ValidationError("two-qubit mode needs beta > 1")
    c = couplings(p)
    if c.g_s_rad <= 0:
        raise ValidationError("spin-photon coupling vanishes")
    eff = effective_losses(p, scenario)
    return float(
        1.0 - TWO_PI / (5.0 * c.g_s_rad)
        * (2.0 * eff.gamma_s_eff * gate.beta + scenario.kappa / gate.beta)
    )


def optimal_beta(p, scenario):
    """Stationary point beta* = sqrt(kappa / 2 gamma_s') of the F_2 error."""
    eff = effective_losses(p, scenario)
    if eff.gamma_s_eff == 0:
        return float("inf")
    return float(np.sqrt(scenario.kappa / (2.0 * eff.gamma_s_eff)))


def lambda_scan(p, scenario, gate, b_perp_list_hz):
    """Gate errors versus the mixing angle, swept through b_perp.

    Returns (lambda values, 1 - F1_bar, 1 - F2) arrays for plotting the
    error-versus-mixing curves.
    """
    lams, err1, err2 = [], [], []
    for b_perp in np.asarray(b_perp_list_hz, dtype=float):
        q = SpinChargeParams(
            two_t_c_hz=p.two_t_c_hz,
            b_par_hz=p.b_par_hz,
            b_perp_hz=float(b_perp),
            lever_arm=p.lever_arm,
            zpf_hz=p.zpf_hz,
            resonator_hz=p.resonator_hz,
        )
        lams.append(couplings(q).lambda_mix)
        err1.append(1.0 - average_single_qubit_fidelity(q, scenario, gate))
        err2.append(1.0 - two_qubit_fidelity(q, scenario, gate))
    return np.array(lams), np.array(err1), np.array(err2)


# ---------------------------------------------------------------------------
# EDSR drive fields (harmonic-trap and double-well forms)


def edsr_drive_field(grad_t_per_m, e_ac, l0, omega0_rad, omega_l_rad):
    """Effective AC field B_AC = grad e E_ac l0^2 omega0 / (2 hbar (omega0^2 - omega_L^2))."""
    if omega0_rad == omega_l_rad:
        raise ValidationError("orbital and Larmor frequencies coincide: divergence")
    return (
        grad_t_per_m * E_CHARGE * e_ac * l0**2 * omega0_rad
        / (2.0 * HBAR * (omega0_rad**2 - omega_l_rad**2))
    )


def edsr_static_field(grad_t_per_m, e_0, d, splitting_minus_larmor_j):
    """Double-well form B_0 = grad e E_0 d^2 / (4 (2t - hbar omega_L))."""
    if splitting_minus_larmor_j == 0:
        raise ValidationError("2t equals the Larmor energy: divergence")
    return grad_t_per_m * E_CHARGE * e_0 * d**2 / (4.0 * splitting_minus_larmor_j)


def spin_coupling_from_static_field(b0_tesla, g_factor=G_FACTOR):
    """g_s = g mu_B B_0 / hbar in rad/s."""
    return g_factor * BOHR_MAGNETON * b0_tesla / HBAR


def drive_field_from_charge_coupling(g_c_rad, d):
    """Resonator field amplitude E_0 mapped from the charge coupling via
    e E_0 d = hbar g_c (the dipole-interaction normalization)."""
    return HBAR * g_c_rad / (E_CHARGE * d)


def scenario_report(p, scenario, gate):
    """JSON-ready chain report for one scenario."""
    c = couplings(p)
    eff = effective_losses(p, scenario)
    return {
        "label": scenario.label,
        "g_c_over_2pi_hz": c.g_c_hz,
        "lambda": c.lambda_mix,
        "g_s_over_2pi_hz": c.g_s_hz,
        "gamma_s_eff_over_2pi_hz": eff.gamma_s_eff / TWO_PI,
        "gamma_s_star_eff_over_2pi_hz": eff.gamma_s_star_eff / TWO_PI,
        "kappa_eff_over_2pi_hz": eff.kappa_eff / TWO_PI,
        "cooperativity": cooperativity(p, scenario),
        "f1_bar": average_single_qubit_fidelity(p, scenario, gate),
        "f2": two_qubit_fidelity(p, scenario, gate),
    }
