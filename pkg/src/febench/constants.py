"""Physical constants used throughout, in SI units."""

from scipy.constants import (
    Boltzmann as K_B,
    Planck as H,
    electron_mass as M_E,
    elementary_charge as E_CHARGE,
    epsilon_0 as EPS_0,
    hbar as HBAR,
    mu_0 as MU_0,
)

# Rydberg constant as an energy (J): m_e e^4 / (8 eps0^2 h^2)
RYDBERG_J = M_E * E_CHARGE**4 / (8.0 * EPS_0**2 * H**2)
RYDBERG_HZ = RYDBERG_J / H

# Free-electron g-factor (CODATA magnitude)
G_FACTOR = 2.00231930436
BOHR_MAGNETON = 9.2740100783e-24  # J/T

__all__ = [
    "K_B",
    "H",
    "HBAR",
    "M_E",
    "E_CHARGE",
    "EPS_0",
    "MU_0",
    "RYDBERG_J",
    "RYDBERG_HZ",
    "G_FACTOR",
    "BOHR_MAGNETON",
]
