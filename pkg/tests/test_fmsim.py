import warnings

import numpy as np
import pytest

from febench import fmsim, qcap, resonator as rs
from febench.constants import E_CHARGE
from febench.errors import FitError, ValidationError


def drive_params():
    return qcap.TwoLevelDriveParams(rabi_hz=0.83e6, temperature=0.16, delta_q=1e-5 * E_CHARGE)


def circuit():
    tc = rs.TankCircuit(708e-9, 2.131e-12, 0.315e-12, 321e3)
    qf = rs.QualityFactors(
        q_int=1.0 / (1.0 / 311 - 1.0 / 648), q_ext=648.0, q_tot=311.0, f0=120.946e6
    )
    return tc, qf


class TestLzProbability:
    def test_paper_parameters(self):
        p, keep = fmsim.lz_probability(fmsim.LzParams(0.83e6, 768e6, 1e3))
        delta = 0.83e6**2 / (4 * 768e6 * 1e3)
        assert delta == pytest.approx(0.224, abs=6e-4)
        assert p == pytest.approx(0.244, abs=1e-3)
        assert keep == pytest.approx(1 - p, rel=1e-12)

    def test_adiabatic_limit(self):
        p, _ = fmsim.lz_probability(fmsim.LzParams(0.83e6, 768e6, 1e-3))
        assert p < 1e-200 or p == 0.0

    def test_sudden_limit(self):
        p, keep = fmsim.lz_probability(fmsim.LzParams(1e-3, 768e6, 1e4))
        assert p == pytest.approx(1.0, abs=1e-12)
        assert keep == pytest.approx(0.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValidationError):
            fmsim.LzParams(0.0, 768e6, 1e3)


class TestSimulateSidebands:
    def test_signal_vanishes_at_distribution_peak(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        eps = np.linspace(-2e9, 2e9, 161)
        cn = tab.at(eps)
        f_peak = dist.f_ry_peak_hz - eps[np.argmax(cn)]
        at_peak = fmsim.simulate_sidebands(
            dist, fmsim.FmParams(f_peak, 768e6, 1e3), drive, tc, qf, 14e-6, 41.0, table=tab
        )
        at_side = fmsim.simulate_sidebands(
            dist, fmsim.FmParams(f_peak + 1e9, 768e6, 1e3), drive, tc, qf, 14e-6, 41.0, table=tab
        )
        assert at_peak.v_s_upper < 0.1 * at_side.v_s_upper

    def test_small_amplitude_matches_analytic(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        carrier = dist.f_ry_peak_hz + 1e9
        _, dc = qcap.modulation_depth(carrier, 50e6, dist, drive, table=tab)
        analytic = rs.sideband_amplitude(14e-6, dc, qf, tc, 41.0)
        sim = fmsim.simulate_sidebands(
            dist, fmsim.FmParams(carrier, 50e6, 1e3), drive, tc, qf, 14e-6, 41.0, table=tab
        )
        assert sim.v_s_upper == pytest.approx(analytic, rel=0.02)

    def test_lz_suppression_reduces_signal(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        fm = fmsim.FmParams(dist.f_ry_peak_hz + 1e9, 768e6, 4e3)
        free = fmsim.simulate_sidebands(dist, fm, drive, tc, qf, 14e-6, 41.0, table=tab)
        damped = fmsim.simulate_sidebands(dist, fm, drive, tc, qf, 14e-6, 41.0, lz=True, table=tab)
        assert damped.v_s_upper < free.v_s_upper
        assert damped.p_lz > 0.4

    def test_monotone_suppression_in_mod_freq(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        carrier = dist.f_ry_peak_hz + 1e9
        vs = []
        for f_mf in (0.5e3, 1e3, 2e3, 4e3, 8e3, 16e3):
            r = fmsim.simulate_sidebands(
                dist, fmsim.FmParams(carrier, 768e6, f_mf), drive, tc, qf,
                14e-6, 41.0, lz=True, table=tab,
            )
            vs.append(r.v_s_upper)
        assert all(a >= b * (1 - 1e-9) for a, b in zip(vs, vs[1:]))

    def test_doubling_cycles_stationary(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        fm = fmsim.FmParams(dist.f_ry_peak_hz + 1e9, 768e6, 1e3)
        a = fmsim.simulate_sidebands(dist, fm, drive, tc, qf, 14e-6, 41.0, cycles=16, table=tab)
        b = fmsim.simulate_sidebands(dist, fm, drive, tc, qf, 14e-6, 41.0, cycles=32, table=tab)
        assert abs(a.v_s_upper - b.v_s_upper) / b.v_s_upper < 1e-3

    def test_parseval(self, reference_distribution):
        dist = reference_distribution
        drive = drive_params()
        tc, qf = circuit()
        tab = qcap.EnsembleCapacitance(dist, drive)
        t = np.arange(2048) / (2048.0 * 1e3)
        eps0 = dist.f_ry_peak_hz - fmsim.FmParams(dist.f_ry_peak_hz + 1e9, 768e6, 1e3).instantaneous(t)
        c_n_t = tab.at(eps0)
        gamma0 = complex(rs.reflection_coefficient(qf.f0, qf))
        mismatch = fmsim.parseval_check(c_n_t, qf.q_tot, qf.q_ext, tc.c_total, 41.0, 14e-6, gamma0)
        assert mismatch < 1e-9

    def test_leakage_guard(self, reference_distribution):
        drive = drive_params()
        tc, qf = circuit()
        with pytest.raises(ValidationError):
            fmsim.simulate_sidebands(
                reference_distribution,
                fmsim.FmParams(165e9, 768e6, 1e3), drive, tc, qf, 14e-6, 41.0,
                cycles=10.5,
            )
        with pytest.raises(ValidationError):
            fmsim.simulate_sidebands(
                reference_distribution,
                fmsim.FmParams(165e9, 768e6, 1e3), drive, tc, qf, 14e-6, 41.0,
                samples_per_cycle=32,
            )


class TestSweep:
    def sweep(self, dist, v_rf, lz=False):
        drive = drive_params()
        tc, qf = circuit()
        carriers = dist.f_ry_peak_hz + np.linspace(-2.5e9, 2.5e9, 21)
        vs, obs = fmsim.sweep_carrier(
            carriers, dist, 768e6, 1e3, drive, tc, qf, v_rf, 41.0,
            lz=lz, noise_floor_v=12e-9,
        )
        return carriers, vs, obs

    def test_linear_in_drive_voltage(self, reference_distribution):
        _, v1, _ = self.sweep(reference_distribution, 14e-6)
        _, v2, _ = self.sweep(reference_distribution, 28e-6)
        assert np.allclose(v2, 2 * v1, rtol=1e-9)

    def test_reduced_density_scales_signal(self, reference_distribution):
        from febench import corbino

        d = reference_distribution
        d55 = corbino.DetuningDistribution(
            f_ry_hz=d.f_ry_hz, counts=0.55 * d.counts,
            total_electrons=0.55 * d.total_electrons,
            f_ry_peak_hz=d.f_ry_peak_hz, bin_hz=d.bin_hz,
        )
        _, v1, _ = self.sweep(reference_distribution, 14e-6)
        _, v55, _ = self.sweep(d55, 14e-6)
        assert np.allclose(v55, 0.55 * v1, rtol=1e-9)

    def test_zero_electrons_flat(self, reference_distribution):
        from febench import corbino

        d = reference_distribution
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            empty = corbino.DetuningDistribution(
                f_ry_hz=d.f_ry_hz, counts=0.0 * d.counts, total_electrons=0.0,
                f_ry_peak_hz=d.f_ry_peak_hz, bin_hz=d.bin_hz,
            )
            _, vs, obs = self.sweep(empty, 14e-6)
        assert np.all(vs < 1e-30)
        assert np.all(obs == 12e-9)  # noise floor only


class TestLzFit:
    def synth(self, rabi=0.83e6, f_ma=768e6, noise=0.05, seed=11, a=70e-9):
        f_mf = np.geomspace(0.4e3, 3e3, 10)
        rng = np.random.default_rng(seed)
        v = fmsim.lz_model(f_mf, a, rabi, f_ma)
        return f_mf, v * (1 + noise * rng.normal(size=f_mf.size))

    def test_round_trip_within_ci(self):
        f_mf, v = self.synth()
        rabi, ci = fmsim.fit_lz_rate(f_mf, v, 768e6)
        assert abs(rabi - 0.83e6) < ci
        assert ci < 0.5e6  # comparable to the quoted +/- 0.29 MHz

    def test_joint_fit_separates_domains(self):
        # effective rate drifts upward past the low-frequency domain, so the
        # two fit windows recover different rates
        rng = np.random.default_rng(5)
        f_mf = np.geomspace(0.4e3, 20e3, 24)
        rate_eff = np.where(f_mf <= 3e3, 0.83e6,
                            0.83e6 + (1.74e6 - 0.83e6) * np.minimum((f_mf - 3e3) / 7e3, 1.0))
        sets = []
        for f_ma, a in ((528e6, 50e-9), (768e6, 70e-9)):
            v = fmsim.lz_model(f_mf, a, rate_eff, f_ma)
            sets.append((f_mf, v * (1 + 0.03 * rng.normal(size=f_mf.size)), f_ma))
        low = fmsim.fit_lz_rate_joint(sets, domain_max_hz=3e3)
        wide = fmsim.fit_lz_rate_joint(sets, domain_max_hz=20e3)
        assert low["rabi_hz"] == pytest.approx(0.83e6, rel=0.2)
        assert wide["rabi_hz"] > low["rabi_hz"]

    def test_degenerate_amplitude_raises(self):
        f_mf = np.geomspace(0.4e3, 3e3, 8)
        with pytest.raises(FitError):
            fmsim.fit_lz_rate(f_mf, np.zeros_like(f_mf), 768e6)

    def test_noise_floor_rejection(self):
        f_mf, v = self.synth(a=1e-9)
        with pytest.raises(FitError):
            fmsim.fit_lz_rate(f_mf, v, 768e6, noise_floor_v=12e-9)

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            fmsim.fit_lz_rate([1e3, 2e3, 3e3], [1, 2, 3], 768e6)
