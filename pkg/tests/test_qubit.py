import numpy as np
import pytest

from febench import qubit
from febench.errors import RegimeError, ValidationError


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    return np.outer(v, v.conj())


class TestBlochMap:
    def test_ground_state_north_pole(self):
        r = qubit.bloch_map(np.diag([1.0, 0.0]))
        assert np.allclose(r, [0, 0, 1], atol=1e-12)

    def test_center_is_maximally_mixed(self):
        rho = qubit.density_from_bloch([0.0, 0.0, 0.0])
        assert np.allclose(rho, np.eye(2) / 2, atol=1e-12)

    def test_plus_state_x_axis(self):
        # direct trace evaluation for |+><+|
        rho = proj(ket(1, 1))
        assert np.allclose(qubit.bloch_map(rho), [1, 0, 0], atol=1e-12)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            r = rng.normal(size=3)
            r *= rng.uniform(0, 1) / np.linalg.norm(r)
            back = qubit.bloch_map(qubit.density_from_bloch(r))
            assert np.allclose(back, r, atol=1e-12)
            assert np.linalg.norm(back) <= 1 + 1e-12

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValidationError):
            qubit.bloch_map(np.array([[1.0, 0.5j], [0.5j, 0.0]]))  # non-Hermitian
        with pytest.raises(ValidationError):
            qubit.bloch_map(np.diag([0.7, 0.7]))  # trace != 1
        with pytest.raises(ValidationError):
            qubit.density_from_bloch([1.2, 0, 0])


class TestStateFidelity:
    def test_identical_states(self):
        rho = proj(ket(1, 1j))
        assert qubit.state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_states(self):
        assert qubit.state_fidelity(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(
            0.0, abs=1e-10
        )

    def test_pure_vs_mixed_closed_form(self):
        # F(|0><0|, I/2) = 1/sqrt(2)
        f = qubit.state_fidelity(np.diag([1.0, 0]), np.eye(2) / 2)
        assert f == pytest.approx(1 / np.sqrt(2), rel=1e-10)

    def test_symmetry_and_range_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            r1 = rng.normal(size=3)
            r1 *= rng.uniform(0, 1) / np.linalg.norm(r1)
            r2 = rng.normal(size=3)
            r2 *= rng.uniform(0, 1) / np.linalg.norm(r2)
            a = qubit.density_from_bloch(r1)
            b = qubit.density_from_bloch(r2)
            f_ab = qubit.state_fidelity(a, b)
            f_ba = qubit.state_fidelity(b, a)
            assert 0.0 <= f_ab <= 1.0
            assert f_ab == pytest.approx(f_ba, abs=1e-10)

    def test_rejects_non_psd(self):
        bad = np.array([[1.2, 0], [0, -0.2]], dtype=complex)
        with pytest.raises(ValidationError):
            qubit.state_fidelity(bad, np.eye(2) / 2)


class TestAverageGateFidelity:
    def test_perfect_gate(self):
        u = qubit.SIGMA_X
        est, err = qubit.average_gate_fidelity(lambda r: u @ r @ u.conj().T, u, 400, seed=1)
        assert est == pytest.approx(1.0, abs=5 * max(err, 1e-12) + 1e-9)

    def test_depolarizing_channel(self):
        # Haar average for the fully depolarizing channel is 1/2
        est, err = qubit.average_gate_fidelity(
            lambda r: np.eye(2, dtype=complex) / 2, np.eye(2), 4000, seed=2
        )
        assert est == pytest.approx(0.5, abs=5 * err)

    def test_identity_channel_against_x(self):
        # analytic Haar integral of |<psi|X|psi>|^2 is 1/3
        est, err = qubit.average_gate_fidelity(
            lambda r: r, qubit.SIGMA_X, 20000, seed=3
        )
        assert est == pytest.approx(1.0 / 3.0, abs=5 * err)

    def test_stderr_scales_as_sqrt_samples(self):
        chan = lambda r: np.eye(2, dtype=complex) / 2
        _, e1 = qubit.average_gate_fidelity(chan, np.eye(2), 500, seed=4)
        _, e2 = qubit.average_gate_fidelity(chan, np.eye(2), 8000, seed=4)
        assert e2 == pytest.approx(e1 / 4, rel=0.35)

    def test_zero_samples_rejected(self):
        with pytest.raises(ValidationError):
            qubit.average_gate_fidelity(lambda r: r, np.eye(2), 0)


class TestExchangeEvolution:
    def test_identity_at_t0(self):
        assert np.allclose(qubit.exchange_evolution(1e6, 0.0), np.eye(4), atol=1e-14)

    def test_iswap_at_quarter_period(self):
        g = 2 * np.pi * 5e6
        u = qubit.exchange_evolution(g, np.pi / (2 * g))
        iswap = np.eye(4, dtype=complex)
        iswap[1, 1] = iswap[2, 2] = 0.0
        iswap[1, 2] = iswap[2, 1] = 1j
        assert np.max(np.abs(u - iswap)) < 1e-10

    def test_excitation_transfer_picks_up_i(self):
        # (alpha|g> + beta|e>) x |up>  ->  |g> x (alpha|up> + i beta|down>)
        # in basis |00>,|01>,|10>,|11| with g/e -> 0/1 and up/down -> 0/1
        g = 1.0
        u = qubit.exchange_evolution(g, np.pi / (2 * g))
        alpha, beta = 0.6, 0.8j
        state = np.array([alpha, 0.0, beta, 0.0], dtype=complex)
        out = u @ state
        expected = np.array([alpha, 1j * beta, 0.0, 0.0], dtype=complex)
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_unitarity_and_periodicity(self):
        g = 2 * np.pi * 1e6
        rng = np.random.default_rng(5)
        for t in rng.uniform(0, 3e-6, size=20):
            u = qubit.exchange_evolution(g, t)
            assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-10
            u2 = qubit.exchange_evolution(g, t + 2 * np.pi / g)
            assert np.max(np.abs(u - u2)) < 1e-9

    def test_invalid_inputs(self):
        with pytest.raises(ValidationError):
            qubit.exchange_evolution(-1.0, 1.0)
        with pytest.raises(ValidationError):
            qubit.exchange_evolution(1.0, -1.0)


class TestDispersiveShift:
    def test_zero_coupling(self):
        p = qubit.JcParams(2 * np.pi * 4.8e9, 2 * np.pi * 8e9, 0.0)
        assert qubit.dispersive_shift(p) == 0.0

    def test_neon_style_parameters(self):
        # g/2pi = 150 MHz, detuning/2pi = 3.2 GHz -> chi/2pi = 7.03 MHz
        p = qubit.JcParams(
            2 * np.pi * 4.8e9, 2 * np.pi * 8.0e9, 2 * np.pi * 150e6
        )
        chi = qubit.dispersive_shift(p) / (2 * np.pi)
        assert chi == pytest.approx(150e6**2 / 3.2e9, rel=1e-12)
        assert chi == pytest.approx(7.03e6, rel=0.01)

    def test_sign_follows_detuning(self):
        up = qubit.JcParams(2 * np.pi * 4.8e9, 2 * np.pi * 8e9, 2 * np.pi * 100e6)
        dn = qubit.JcParams(2 * np.pi * 8e9, 2 * np.pi * 4.8e9, 2 * np.pi * 100e6)
        assert qubit.dispersive_shift(up) > 0 > qubit.dispersive_shift(dn)
        assert qubit.dispersive_shift(up) == pytest.approx(
            -qubit.dispersive_shift(dn), rel=1e-12
        )

    def test_regime_guard(self):
        p = qubit.JcParams(2 * np.pi * 4.8e9, 2 * np.pi * 5.0e9, 2 * np.pi * 150e6)
        with pytest.raises(RegimeError):
            qubit.dispersive_shift(p)
