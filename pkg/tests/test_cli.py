import json

import pytest

from febench import cli
from febench.errors import ValidationError
from febench.scenarios import REGISTRY, list_scenarios, validate_params


def write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


class TestRegistry:
    def test_at_least_twelve_scenarios(self):
        assert len(REGISTRY) >= 12

    def test_each_entry_names_its_target(self):
        for name, target in list_scenarios():
            assert len(target) > 10

    def test_unknown_filter_empty(self):
        assert list_scenarios("no-such-scenario") == []

    def test_filter_matches(self):
        rows = list_scenarios("tdo")
        assert [name for name, _ in rows] == ["tdo"]


class TestValidation:
    def test_defaults_filled(self):
        params = validate_params("sensitivity", {})
        assert params["gain"] == 41.0

    def test_unknown_key_rejected_with_path(self):
        with pytest.raises(ValidationError, match=r"params\.bogus_key"):
            validate_params("sensitivity", {"bogus_key": 1.0})

    def test_missing_required_key_named(self):
        with pytest.raises(ValidationError, match=r"params\.f_mf_hz"):
            validate_params("fm-carrier-sweep", {})

    def test_unknown_scenario(self):
        with pytest.raises(ValidationError):
            validate_params("warp-drive", {})


class TestCliExitCodes:
    def test_list_ok(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out
        assert "sensitivity" in out

    def test_validate_ok(self, tmp_path):
        cfg = write_cfg(tmp_path, {"scenario": "sensitivity"})
        assert cli.main(["validate", "--config", cfg]) == 0

    def test_missing_field_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"scenario": "fm-carrier-sweep", "params": {}})
        assert cli.main(["validate", "--config", cfg]) == 2
        assert "params.f_mf_hz" in capsys.readouterr().err

    def test_unknown_top_level_key_exit_2(self, tmp_path):
        cfg = write_cfg(tmp_path, {"scenario": "sensitivity", "zzz": 1})
        assert cli.main(["validate", "--config", cfg]) == 2

    def test_missing_file_exit_4(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "nope.json")]) == 4

    def test_run_writes_manifest_and_outputs(self, tmp_path):
        cfg = write_cfg(tmp_path, {"scenario": "resonance"})
        out = tmp_path / "out"
        assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["scenario"] == "resonance"
        for f in manifest["outputs"]:
            assert (out / f.split("/")[-1]).exists()


class TestDeterminism:
    @pytest.mark.parametrize("scenario", ["sensitivity", "lz-rate", "fit-engines", "tdo"])
    def test_byte_identical_reruns(self, tmp_path, scenario):
        cfg = write_cfg(tmp_path, {"scenario": scenario, "seed": 7})
        outs = []
        for run in ("a", "b"):
            out = tmp_path / run
            assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
            manifest = json.loads((out / "manifest.json").read_text())
            blobs = {}
            for f in sorted(manifest["outputs"]):
                name = f.split("/")[-1]
                blobs[name] = (out / name).read_bytes()
            outs.append(blobs)
        assert outs[0].keys() == outs[1].keys()
        for name in outs[0]:
            assert outs[0][name] == outs[1][name], f"{name} differs between runs"

    def test_seed_changes_noise_fixtures(self, tmp_path):
        res = []
        for seed in (1, 2):
            cfg = write_cfg(tmp_path, {"scenario": "lz-rate", "seed": seed}, f"c{seed}.json")
            out = tmp_path / f"s{seed}"
            assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
            res.append(json.loads((out / "lz_rate.json").read_text())["fit_rabi_hz"])
        assert res[0] != res[1]


def test_number_formatting_rules():
    from febench.scenarios import fmt_number

    assert fmt_number(0.0) == "0"
    assert "e" in fmt_number(1e-4)  # below 1e-3: exponent notation
    assert "e" in fmt_number(2.5e7)  # above 1e6: exponent notation
    assert "e" not in fmt_number(120.946)
    assert "," not in fmt_number(123456.789)
    assert fmt_number(0.5) == "0.5"
