"""Elementary qubit math: density matrices, Bloch vectors, fidelities,
exchange evolution, and the dispersive shift of a driven cavity.

Density matrices and unitaries are plain complex ndarrays; validation
helpers raise ValidationError on ill-formed inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RegimeError, ValidationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-12


def validate_density_matrix(rho):
    """Check Hermiticity, unit trace and positivity of a 2x2 density matrix.

    Returns the input as a complex ndarray. Raises ValidationError if any
    invariant is violated.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError(f"density matrix must be 2x2, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
        raise ValidationError("density matrix trace differs from 1")
    evals = np.linalg.eigvalsh(rho)
    if np.min(evals) < PSD_TOL:
        raise ValidationError(f"density matrix has negative eigenvalue {np.min(evals):g}")
    return rho


def bloch_map(rho):
    """Bloch vector r_i = Tr(rho sigma_i) of a valid density matrix."""
    rho = validate_density_matrix(rho)
    return np.array([np.trace(rho @ s).real for s in PAULIS])


def density_from_bloch(r):
    """Density matrix (I + r.sigma)/2 for a Bloch vector with |r| <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValidationError("Bloch vector must have 3 components")
    norm = np.linalg.norm(r)
    if norm > 1.0 + 1e-9:
        raise ValidationError(f"Bloch vector has |r| = {norm:g} > 1")
    rho = 0.5 * (np.eye(2, dtype=complex) + sum(r[i] * PAULIS[i] for i in range(3)))
    return rho


def _psd_sqrt(mat):
    # Hermitian eigendecomposition with eigenvalue clamping at zero;
    # robust for near-pure states where tiny negative eigenvalues appear.
    evals, evecs = np.linalg.eigh(mat)
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def state_fidelity(rho, sigma):
    """Fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)) between two states."""
    rho = validate_density_matrix(rho)
    sigma = validate_density_matrix(sigma)
    sqrt_rho = _psd_sqrt(rho)
    inner = sqrt_rho @ sigma @ sqrt_rho
    f = np.trace(_psd_sqrt(inner)).real
    return float(min(max(f, 0.0), 1.0))


def haar_random_state(rng):
    """Haar-uniform pure qubit state from a normalized complex Gaussian pair."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def average_gate_fidelity(channel, ideal, samples, seed=0):
    """Monte-Carlo average of <psi|U^dag E(|psi><psi|) U|psi> over Haar inputs.

    channel maps a 2x2 density matrix to a 2x2 density matrix; ideal is the
    target unitary. Returns (estimate, standard_error).
    """
    samples = int(samples)
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    ideal = np.asarray(ideal, dtype=complex)
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for k in range(samples):
        psi = haar_random_state(rng)
        rho_out = np.asarray(channel(np.outer(psi, psi.conj())), dtype=complex)
        target = ideal @ psi
        vals[k] = (target.conj() @ rho_out @ target).real
    est = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")
    return est, stderr


def exchange_evolution(g, t):
    """Two-qubit exchange-coupling propagator in basis |00>,|01>,|10>,|11>.

    Uses the gauge in which U(pi/2g) is the iSWAP with +i off-diagonal
    entries, so the excited-state amplitude transfers with phase +i.
    """
    if g <= 0:
        raise ValidationError("coupling g must be positive")
    if t < 0:
        raise ValidationError("time t must be nonnegative")
    c, s = np.cos(g * t), np.sin(g * t)
    u = np.eye(4, dtype=complex)
    u[1, 1] = u[2, 2] = c
    u[1, 2] = u[2, 1] = 1j * s
    return u


ISWAP = exchange_evolution(1.0, np.pi / 2.0).round(12)


@dataclass
class JcParams:
    """Resonator, qubit and coupling frequencies (rad/s) of a JC system."""

    resonator_freq: float
    qubit_freq: float
    coupling: float

    def __post_init__(self):
        if self.resonator_freq <= 0 or self.qubit_freq <= 0 or self.coupling < 0:
            raise ValidationError("JC frequencies must be positive, coupling nonnegative")

    @property
    def detuning(self):
        return self.qubit_freq - self.resonator_freq

    @property
    def dispersive(self):
        return abs(self.detuning) > 10.0 * self.coupling


def dispersive_shift(params):
    """Dispersive pull chi = g^2/(omega_q - omega_0) of the resonator (rad/s)."""
    if params.coupling == 0.0:
        return 0.0
    if not params.dispersive:
        raise RegimeError(
            "not in the dispersive regime: |omega_q - omega_0| must exceed 10 g"
        )
    return params.coupling**2 / params.detuning
