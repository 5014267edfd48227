"""Scenario registry: each entry reproduces one quantitative target of the
readout chain and writes machine-readable outputs.

Runners are deterministic for a fixed config and seed; CSV numbers use
'.' decimals, no thousands separators, and exponent notation outside
[1e-3, 1e6).
"""

import json

import numpy as np

from . import corbino, fmsim, micromagnet, neon_em, qcap, resonator, rydberg, spin_photon, tdo
from .constants import E_CHARGE, H
from .errors import ValidationError


def fmt_number(x):
    """Deterministic CSV/JSON number formatting."""
    x = float(x)
    if x == 0.0:
        return "0"
    if abs(x) < 1e-3 or abs(x) >= 1e6:
        return f"{x:.9e}"
    out = f"{x:.9f}".rstrip("0").rstrip(".")
    return out if out not in ("", "-") else "0"


def write_csv(path, header, columns):
    rows = zip(*columns)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt_number(v) for v in row) + "\n")
    return str(path)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def jsonable(payload):
    """Round-trip through JSON to shed numpy scalar types."""
    return json.loads(json.dumps(payload, default=_json_default))


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return str(path)


# --------------------------------------------------------------------------
# shared builders


def _tank(p):
    return resonator.TankCircuit(
        p["inductance_h"], p["capacitance_f"], p["coupling_capacitance_f"], p["resistance_ohm"]
    )


def _reference_distribution(p):
    geo = corbino.CorbinoGeometry(n_z=p["grid_n_z"], n_r=p["grid_n_r"])
    bias = corbino.BiasConfig(v_bc=p["v_bc_v"], v_bg=p["v_bg_v"])
    profile = corbino.saturated_density(geo, bias)
    curve = rydberg.stark_response(
        rydberg.helium(), rydberg.helium_grid(), np.linspace(0.0, 9e3, 19)
    )
    dist = corbino.detuning_distribution(
        profile, curve, gauss_width_hz=p["gauss_width_hz"], geo=geo
    )
    return geo, profile, dist


def _drive(p):
    return qcap.TwoLevelDriveParams(
        rabi_hz=p["rabi_hz"], temperature=p["temperature_k"],
        delta_q=p["delta_q_e"] * E_CHARGE,
    )


# --------------------------------------------------------------------------
# scenario runners; each returns a result summary dict and a list of files


def run_sensitivity(p, out, rng):
    tc = _tank(p)
    qf = resonator.quality_factors(tc)
    s_c = resonator.capacitance_sensitivity(
        p["v_rf_v"], qf, tc, p["gain"], p["v_noise_v"], p["bandwidth_hz"]
    )
    v_s = resonator.sideband_amplitude(p["v_rf_v"], p["delta_c_f"], qf, tc, p["gain"])
    payload = {
        "s_c_f_per_rthz": s_c,
        "s_c_af_per_rthz": s_c * 1e18,
        "v_s_v": v_s,
        "q_int": qf.q_int,
        "q_ext": qf.q_ext,
        "q_tot": qf.q_tot,
        "f0_hz": qf.f0,
    }
    return payload, [write_json(out / "sensitivity.json", payload)]


def run_resonance(p, out, rng):
    tc = _tank(p)
    qf = resonator.quality_factors(tc)
    f = np.linspace(qf.f0 * 0.97, qf.f0 * 1.03, 601)
    gamma = resonator.reflection_coefficient(f, qf)
    payload = {"f0_hz": qf.f0, "q_int": qf.q_int, "q_ext": qf.q_ext, "q_tot": qf.q_tot}
    files = [
        write_json(out / "resonance.json", payload),
        write_csv(out / "reflection.csv", "f_hz,re,im", [f, gamma.real, gamma.imag]),
    ]
    return payload, files


def run_population_difference(p, out, rng):
    chi = qcap.population_difference(p["rabi_hz"], p["temperature_k"])
    payload = {"chi": float(chi), "rabi_hz": p["rabi_hz"], "temperature_k": p["temperature_k"]}
    return payload, [write_json(out / "population_difference.json", payload)]


def run_lz_rate(p, out, rng):
    plz, keep = fmsim.lz_probability(
        fmsim.LzParams(p["rabi_hz"], p["f_ma_hz"], p["f_mf_hz"])
    )
    f_mf = np.geomspace(0.4e3, 3e3, 10)
    truth = p["rabi_hz"]
    v = fmsim.lz_model(f_mf, 70e-9, truth, p["f_ma_hz"])
    v_noisy = v * (1.0 + 0.05 * rng.normal(size=f_mf.size))
    rabi_fit, ci = fmsim.fit_lz_rate(f_mf, v_noisy, p["f_ma_hz"])
    payload = {
        "p_lz": plz,
        "signal_scale": keep,
        "fit_rabi_hz": rabi_fit,
        "fit_ci99_hz": ci,
        "true_rabi_hz": truth,
        "recovered_within_ci": bool(abs(rabi_fit - truth) < ci),
    }
    files = [
        write_json(out / "lz_rate.json", payload),
        write_csv(out / "lz_fit_data.csv", "f_mf_hz,v_s_v", [f_mf, v_noisy]),
    ]
    return payload, files


def run_fm_carrier_sweep(p, out, rng):
    geo, profile, dist = _reference_distribution(p)
    drive = _drive(p)
    tc = _tank(p)
    qf = resonator.quality_factors(tc)
    carriers = dist.f_ry_peak_hz + np.linspace(
        -p["sweep_span_hz"] / 2.0, p["sweep_span_hz"] / 2.0, p["sweep_points"]
    )
    v_s, observable = fmsim.sweep_carrier(
        carriers, dist, p["f_ma_hz"], p["f_mf_hz"], drive, tc, qf,
        p["v_rf_v"], p["gain"], lz=p["lz"], noise_floor_v=p["v_noise_v"],
    )
    k_peak = int(np.argmin(np.abs(carriers - dist.f_ry_peak_hz)))
    below = v_s[carriers < dist.f_ry_peak_hz]
    above = v_s[carriers > dist.f_ry_peak_hz]
    payload = {
        "f_ry_peak_hz": dist.f_ry_peak_hz,
        "v_s_at_peak_v": float(v_s[k_peak]),
        "v_s_max_v": float(v_s.max()),
        "lobe_below_v": float(below.max()),
        "lobe_above_v": float(above.max()),
        "lobe_above_offset_hz": float(
            carriers[carriers > dist.f_ry_peak_hz][np.argmax(above)] - dist.f_ry_peak_hz
        ),
        "lobe_below_offset_hz": float(
            carriers[carriers < dist.f_ry_peak_hz][np.argmax(below)] - dist.f_ry_peak_hz
        ),
    }
    files = [
        write_csv(out / "carrier_sweep.csv", "carrier_hz,v_s_v,observable_v",
                  [carriers, v_s, observable]),
        write_json(out / "fm_sweep_summary.json", payload),
    ]
    return payload, files


def run_rydberg_spectrum(p, out, rng):
    surface = rydberg.helium() if p["substrate"] == "helium" else rydberg.neon()
    grid = rydberg.helium_grid() if p["substrate"] == "helium" else rydberg.neon_grid()
    spec = rydberg.solve_spectrum(surface, grid, p["n_states"])
    payload = rydberg.summary_dict(spec)
    payload["hydrogenic_e1_hz"] = rydberg.hydrogenic_levels(surface.lambda_image, 1)
    files = [
        write_json(out / "spectrum.json", payload),
        str(out / "spectrum.csv"),
    ]
    rydberg.export_csv(spec, surface, out / "spectrum.csv")
    return payload, files


def run_neon_coupling_chain(p, out, rng):
    film = neon_em.FilmParams(p["penetration_depth_m"], p["film_thickness_m"])
    res = neon_em.film_properties(film, p["length_m"], p["width_m"], p["f_r_hz"])
    op = spin_photon.SpinChargeParams(
        two_t_c_hz=p["two_t_c_hz"], b_par_hz=p["b_par_hz"], b_perp_hz=p["b_perp_hz"],
        lever_arm=p["lever_arm"],
        zpf_hz=E_CHARGE * res.v_zpf / H,
        resonator_hz=p["f_r_hz"],
    )
    c = spin_photon.couplings(op)
    payload = {
        "l_square_h": film.inductance_per_square,
        "inductance_h": res.inductance,
        "z0_ohm": res.z0,
        "v_zpf_v": res.v_zpf,
        "ev0_over_h_hz": E_CHARGE * res.v_zpf / H,
        "g_c_over_2pi_hz": c.g_c_hz,
        "lambda": c.lambda_mix,
        "g_s_over_2pi_hz": c.g_s_hz,
    }
    return payload, [write_json(out / "coupling_chain.json", payload)]


def run_spin_gate_fidelity(p, out, rng):
    op = spin_photon.reference_operating_point()
    scenario = spin_photon.reference_scenario()
    gate = spin_photon.GateConfig(charge_rabi_hz=p["charge_rabi_hz"], beta=p["beta"])
    payload = spin_photon.scenario_report(op, scenario, gate)
    nat = spin_photon.natural_neon_scenario()
    lams, err1, err2 = spin_photon.lambda_scan(
        op, nat, gate, np.linspace(0.05e9, 12e9, p["scan_points"])
    )
    files = [
        write_json(out / "fidelity.json", payload),
        write_csv(out / "lambda_scan.csv", "lambda,err_single,err_two",
                  [lams, err1, err2]),
    ]
    return payload, files


def run_electron_loading(p, out, rng):
    omega = 2.0 * np.pi * p["f_r_hz"]
    template = neon_em.CrossSection(
        width=p["width_m"], neon_thickness=p["neon_thickness_m"],
        sheet=neon_em.SheetConductivityParams(
            density=1e13, scattering_time=p["scattering_time_s"]
        ),
    )
    payload = {}
    for model in ("drude", "thermal"):
        n = neon_em.density_for_shift(template, omega, p["target_shift"], model=model)
        sheet = neon_em.SheetConductivityParams(
            density=n, scattering_time=p["scattering_time_s"]
        )
        cs = neon_em.CrossSection(
            **{**template.__dict__, "sheet": sheet, "sheet_model": model}
        )
        r = neon_em.electron_loading_response(cs, omega)
        payload[model] = {
            "density_per_m2": n,
            "delta_f": r.delta_f,
            "inv_q_e": r.inv_q_e,
            "alpha_per_m": r.alpha,
        }
    payload["loss_ratio_drude_over_thermal"] = (
        payload["drude"]["inv_q_e"] / payload["thermal"]["inv_q_e"]
    )
    bare1 = neon_em.preset("resonator1")
    payload["thickness_for_r1_shift_m"] = neon_em.thickness_from_shift(
        bare1, -0.0094, t_max=800e-9
    )
    return payload, [write_json(out / "electron_loading.json", payload)]


def run_micromagnet(p, out, rng):
    dz = np.linspace(p["delta_z_min_m"], p["delta_z_max_m"], p["delta_z_points"])
    prof = micromagnet.assembly_gradient_profile(dz)
    asm = micromagnet.MagnetAssembly.flanking_pair(delta_z=prof.peak_delta_z)
    report = micromagnet.coupling_and_offsets(asm, target_b_par_hz=p["target_b_par_hz"])
    payload = micromagnet.coupling_report_dict(report)
    payload["peak_gradient_t_per_m"] = prof.peak_gradient
    payload["peak_delta_z_m"] = prof.peak_delta_z
    files = [
        str(out / "gradient.csv"),
        write_json(out / "micromagnet.json", payload),
    ]
    micromagnet.export_gradient_csv(prof, out / "gradient.csv")
    return payload, files


def run_tdo(p, out, rng):
    circuit = tdo.TdoCircuit(inductance=p["inductance_h"])
    f_osc = tdo.oscillation_frequency(circuit, p["v_td_v"], p["v_vd_v"])
    fs, n = 20e9, 2**17
    k = round(f_osc * n / fs)
    tone = k * fs / n
    t = np.arange(n) / fs
    rec = tdo.WaveformRecord(p["amplitude_v"] * np.sin(2 * np.pi * tone * t), fs)
    env = tdo.analyze_waveform(rec, tone, 50e6)
    freqs, spec = tdo.power_spectrum(rec)
    k_peak = int(np.argmax(spec))
    payload = {
        "c_td_0p08_f": tdo.diode_capacitance(0.08, circuit.diode_c0),
        "c_td_0p18_f": tdo.diode_capacitance(0.18, circuit.diode_c0),
        "f_oscillation_hz": f_osc,
        "envelope_mean_v": env.mean,
        "envelope_std_v": env.std,
        "spectrum_peak_dbm": float(spec[k_peak]),
        "spectrum_peak_hz": float(freqs[k_peak]),
    }
    files = [
        write_json(out / "tdo.json", payload),
        write_csv(out / "spectrum.csv", "f_hz,p_dbm",
                  [freqs[k_peak - 50: k_peak + 50], spec[k_peak - 50: k_peak + 50]]),
    ]
    return payload, files


def run_fit_engines(p, out, rng):
    f = np.linspace(118e6, 124e6, 801)
    z = resonator.synth_resonance(
        f, 120.946e6, 311.0, 648.0, "reflection", noise=p["noise"], seed=int(rng.integers(2**31))
    )
    fit = resonator.fit_resonance(f, z, "reflection")
    n_ph = np.logspace(0, 6, 13)
    truth = resonator.TlsFitParams(6.64e4, 3.0e2, 0.377, 1e7)
    q = 1.0 / truth.model(n_ph)
    q = q * (1.0 + 0.03 * rng.normal(size=n_ph.size))
    tls = resonator.fit_tls(n_ph, q, np.sqrt(n_ph / n_ph.min()))
    payload = {
        "resonance": resonator.fit_report_dict(fit),
        "tls": {
            "q_tls0_over_f": tls.q_tls0_over_f,
            "n_sat": tls.n_sat,
            "beta": tls.beta,
            "q_other": tls.q_other,
            "q_other_unidentifiable": tls.q_other_unidentifiable,
        },
    }
    return payload, [write_json(out / "fit_engines.json", payload)]


def run_corbino_profile(p, out, rng):
    geo, profile, dist = _reference_distribution(p)
    payload = {
        "total_electrons": profile.total_electrons(geo),
        "n_s_center_per_m2": float(profile.n_s[0]),
        "e_z_center_v_per_m": float(profile.e_z[0]),
        "f_ry_peak_hz": dist.f_ry_peak_hz,
        "residual_field_v_per_m": profile.residual_field,
    }
    files = [
        str(out / "profile.csv"),
        str(out / "distribution.csv"),
        write_json(out / "corbino.json", payload),
    ]
    corbino.export_profile_csv(profile, out / "profile.csv")
    corbino.export_distribution_csv(dist, out / "distribution.csv")
    return payload, files


def run_property_suite(p, out, rng):
    from . import qubit

    checks = {}
    u = qubit.exchange_evolution(2 * np.pi * 1e6, 0.3e-6)
    checks["exchange_unitarity"] = float(np.max(np.abs(u.conj().T @ u - np.eye(4))))
    spec = rydberg.solve_spectrum(rydberg.helium(), rydberg.helium_grid(1000), 2)
    checks["wavefunction_norm_error"] = float(
        abs(np.sum(spec.wavefunctions[0] ** 2) * spec.spacing - 1.0)
    )
    asm = micromagnet.MagnetAssembly.flanking_pair(delta_z=144e-9)
    b = np.linalg.norm(asm.field((0.1e-6, 0.2e-6, 0.0)))
    checks["div_b_relative"] = float(
        abs(micromagnet.divergence(asm, (0.1e-6, 0.2e-6, 0.0))) / (b / 1e-9)
    )
    x = rng.normal(size=4096)
    spec_fft = np.fft.fft(x)
    checks["parseval_relative"] = float(
        abs(np.sum(x**2) - np.sum(np.abs(spec_fft) ** 2) / x.size) / np.sum(x**2)
    )
    payload = {"checks": checks, "all_small": bool(all(v < 1e-6 for v in checks.values()))}
    return payload, [write_json(out / "properties.json", payload)]


# --------------------------------------------------------------------------
# registry: name -> (runner, target description, parameter schema)
# schema entries: key -> default (None marks a required key)

REGISTRY = {
    "sensitivity": (
        run_sensitivity,
        "capacitance sensitivity 0.34 aF/rtHz of the reference tank circuit",
        {
            "inductance_h": 708e-9, "capacitance_f": 2.131e-12,
            "coupling_capacitance_f": 0.315e-12, "resistance_ohm": 321e3,
            "v_rf_v": 14e-6, "gain": 41.0, "v_noise_v": 12e-9,
            "bandwidth_hz": 1.0, "delta_c_f": 2.1e-18,
        },
    ),
    "resonance": (
        run_resonance,
        "tank resonance 120.946 MHz and quality factors 311/648",
        {
            "inductance_h": 708e-9, "capacitance_f": 2.131e-12,
            "coupling_capacitance_f": 0.315e-12, "resistance_ohm": 321e3,
        },
    ),
    "population-difference": (
        run_population_difference,
        "thermal population difference 1.2e-4 at 0.83 MHz / 160 mK",
        {"rabi_hz": 0.83e6, "temperature_k": 0.16},
    ),
    "lz-rate": (
        run_lz_rate,
        "single-passage probability 0.244 and rate-fit round trip",
        {"rabi_hz": 0.83e6, "f_ma_hz": 768e6, "f_mf_hz": 1e3},
    ),
    "fm-carrier-sweep": (
        run_fm_carrier_sweep,
        "sideband lobes at +/-1 GHz with the larger lobe above the peak",
        {
            "grid_n_z": 200, "grid_n_r": 500, "v_bc_v": 12.0, "v_bg_v": -90.0,
            "gauss_width_hz": 1e9, "rabi_hz": 0.83e6, "temperature_k": 0.16,
            "delta_q_e": 1e-5, "inductance_h": 708e-9, "capacitance_f": 2.131e-12,
            "coupling_capacitance_f": 0.315e-12, "resistance_ohm": 321e3,
            "f_ma_hz": 768e6, "f_mf_hz": None, "v_rf_v": 14e-6, "gain": 41.0,
            "v_noise_v": 12e-9, "lz": True, "sweep_span_hz": 6e9, "sweep_points": 61,
        },
    ),
    "rydberg-spectrum": (
        run_rydberg_spectrum,
        "bound-state energies, 10.6 nm (He) / 2.5 nm (Ne) mean heights",
        {"substrate": "helium", "n_states": 4},
    ),
    "neon-coupling-chain": (
        run_neon_coupling_chain,
        "9.6 pH/sq, 139 nH, 1337 ohm, 12 uV ZPF, g_c 150 MHz, g_s 28.5 MHz",
        {
            "penetration_depth_m": 390e-9, "film_thickness_m": 20e-9,
            "length_m": 1.45e-3, "width_m": 100e-9, "f_r_hz": 4.81e9,
            "two_t_c_hz": 8e9, "b_par_hz": 4.8e9, "b_perp_hz": 1e9,
            "lever_arm": 0.05,
        },
    ),
    "spin-gate-fidelity": (
        run_spin_gate_fidelity,
        "cooperativity above 1e6, F2 = 0.9934 at beta 10, mixing-angle scan",
        {"charge_rabi_hz": 10e6, "beta": 10.0, "scan_points": 60},
    ),
    "electron-loading": (
        run_electron_loading,
        "Drude vs thermally averaged trap loss at the -0.9% matched shift",
        {
            "f_r_hz": 5.91e9, "width_m": 150e-9, "neon_thickness_m": 270e-9,
            "scattering_time_s": 1.9e-12, "target_shift": -0.009,
        },
    ),
    "micromagnet": (
        run_micromagnet,
        "peak gradient 0.36 mT/nm near 146 nm offset, 1 GHz spin-charge rate",
        {
            "delta_z_min_m": 40e-9, "delta_z_max_m": 400e-9, "delta_z_points": 91,
            "target_b_par_hz": 4.8e9,
        },
    ),
    "tdo": (
        run_tdo,
        "bias-dependent capacitances, 141.8 MHz carrier, -26.5 dBm tone",
        {
            "inductance_h": 95e-9, "v_td_v": 0.18, "v_vd_v": 0.0,
            "amplitude_v": 15e-3,
        },
    ),
    "fit-engines": (
        run_fit_engines,
        "resonance circle fit and TLS power-dependence fit round trips",
        {"noise": 0.002},
    ),
    "corbino-profile": (
        run_corbino_profile,
        "saturated density profile and Rydberg-detuning distribution",
        {
            "grid_n_z": 200, "grid_n_r": 500, "v_bc_v": 12.0, "v_bg_v": -90.0,
            "gauss_width_hz": 1e9,
        },
    ),
    "property-suite": (
        run_property_suite,
        "unitarity, normalization, div B, Parseval spot checks",
        {},
    ),
}


def validate_params(name, params):
    """Fill defaults, reject unknown keys, and require keys without defaults.

    Raises ValidationError naming the offending field path.
    """
    if name not in REGISTRY:
        raise ValidationError(f"unknown scenario {name!r}")
    _, _, schema = REGISTRY[name]
    params = dict(params or {})
    for key in params:
        if key not in schema:
            raise ValidationError(f"unknown key params.{key}")
    merged = {}
    for key, default in schema.items():
        if key in params:
            merged[key] = params[key]
        elif default is None:
            raise ValidationError(f"missing required key params.{key}")
        else:
            merged[key] = default
    return merged


def list_scenarios(pattern=None):
    rows = []
    for name, (_, target, _) in sorted(REGISTRY.items()):
        if pattern and pattern.lower() not in name.lower():
            continue
        rows.append((name, target))
    return rows
