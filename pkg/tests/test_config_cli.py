import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbhzero import cli
from sbhzero.config import DEFAULT_TOLERANCES, INT_TOLERANCES, ConfigError, ScenarioConfig, parse_overrides


def _write(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


GREEN = {
    "dimension": {"n": 1},
    "domain": {"kind": "disk", "R": 1.0},
    "envelope": {"kind": "green", "F": {"family": "constant", "c": 0.0}},
    "testfn": {"kind": "green", "q": {"family": "power", "c": 1.0, "p": 1.0}, "t0": 1.0},
    "zeros": {"generator": {"gamma": 1.0, "count": 1000}},
}


class TestConfig:
    def test_defaults(self):
        cfg = ScenarioConfig.from_dict({})
        assert cfg.m == 2 and cfg.n == 1
        assert cfg.tolerances == DEFAULT_TOLERANCES

    def test_round_trip(self):
        cfg = ScenarioConfig.from_dict(GREEN)
        again = ScenarioConfig.from_json(cfg.to_json())
        assert again.to_dict() == cfg.to_dict()

    @given(st.sampled_from(sorted(DEFAULT_TOLERANCES)), st.floats(1.0, 100.0))
    def test_tolerance_override_round_trip(self, key, val):
        if key in INT_TOLERANCES:
            val = float(round(val))
        cfg = ScenarioConfig.from_dict({}).with_overrides({key: str(val)})
        assert cfg.tolerances[key] == val
        assert isinstance(cfg.tolerances[key], int) == (key in INT_TOLERANCES)
        assert ScenarioConfig.from_json(cfg.to_json()).tolerances == cfg.tolerances

    def test_json_error_has_position(self):
        with pytest.raises(ConfigError, match="line 2, column"):
            ScenarioConfig.from_json('{\n  "domain": ,\n}')

    @pytest.mark.parametrize("data, where", [
        ({"bogus": {}}, "bogus"),
        ({"domain": []}, "domain"),
        ({"dimension": {"n": 0}}, "dimension.n"),
        ({"dimension": {"n": 1, "m": 3}}, "dimension.m"),
        ({"envelope": {"kind": "other"}}, "envelope.kind"),
        ({"testfn": {"kind": "green"}}, "testfn.q"),
        ({"tolerances": {"nope": 1}}, "tolerances.nope"),
        ({"tolerances": {"convexity": "x"}}, "tolerances.convexity"),
        ({"tolerances": {"n_radii": 2.5}}, "tolerances.n_radii"),
        ({"domain": {"kind": "disk", "R": 1.0, "pole": [2.0, 0.0]}}, "domain"),
        ({"zeros": {"generator": {"gamma": -1, "count": 3}}}, "zeros"),
    ])
    def test_errors_name_the_field(self, data, where):
        with pytest.raises(ConfigError) as info:
            ScenarioConfig.from_dict(data)
        assert info.value.where == where

    def test_infinity_strings(self):
        cfg = ScenarioConfig.from_dict({"testfn": {"kind": "radial", "R": "inf",
                                                   "density": {"family": "power", "c": 1, "alpha": 2}}})
        assert math.isinf(cfg.outer_radius())
        assert cfg.inner_radius() == 1.0

    def test_default_inner_radius(self):
        cfg = ScenarioConfig.from_dict({"domain": {"kind": "ball", "R": 4.0}})
        assert cfg.inner_radius() == 2.0

    def test_parse_overrides(self):
        assert parse_overrides(["a=1,b=2", "c=x"]) == {"a": "1", "b": "2", "c": "x"}
        with pytest.raises(ConfigError):
            parse_overrides(["novalue"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ScenarioConfig.load(tmp_path / "missing.json")


class TestCli:
    def test_verdict_forced(self, tmp_path):
        report, code = cli.run(["verdict", "--config", _write(tmp_path, GREEN), "--mode", "green"])
        assert code == 0 and report["verdict"] == "forced-zero" and report["exit_code"] == 0

    def test_verdict_inconclusive(self, tmp_path):
        data = json.loads(json.dumps(GREEN))
        data["zeros"]["generator"]["gamma"] = 2.0
        _, code = cli.run(["verdict", "--config", _write(tmp_path, data), "--mode", "green"])
        assert code == 3

    def test_verdict_unknown(self, scenario_dir):
        report, code = cli.run(["verdict", "--config", str(scenario_dir / "sampled_unknown.json"),
                                "--mode", "radial"])
        assert code == 4
        assert report["criterion"]["unknown"]

    def test_mode_mismatch_is_input_error(self, tmp_path):
        report, code = cli.run(["verdict", "--config", _write(tmp_path, GREEN), "--mode", "radial"])
        assert code == 1 and "error" in report

    def test_precondition_failure(self, tmp_path):
        data = json.loads(json.dumps(GREEN))
        data["testfn"]["q"] = {"family": "power", "c": 1.0, "p": 0.5}
        _, code = cli.run(["verdict", "--config", _write(tmp_path, data), "--mode", "green"])
        assert code == 2

    def test_validate(self, scenario_dir):
        _, ok = cli.run(["validate", "--config", str(scenario_dir / "validate_log_annulus.json")])
        report, bad = cli.run(["validate", "--config", str(scenario_dir / "validate_constant_candidate.json")])
        assert ok == 0 and bad == 2
        assert not report["passed"]

    def test_ibp(self, scenario_dir):
        for name, expected in (("ibp_radial_single.json", 0), ("ibp_radial_annulus.json", 0),
                               ("ibp_green_smooth.json", 0), ("ibp_radial_corrupted.json", 5)):
            _, code = cli.run(["ibp", "--config", str(scenario_dir / name)])
            assert code == expected, name

    def test_usage_errors_exit_one(self):
        assert cli.run([])[1] == 1
        assert cli.run(["verdict", "--config", "x.json"])[1] == 1  # --mode missing
        assert cli.run(["frobnicate"])[1] == 1
        assert cli.run(["validate"])[1] == 1

    def test_malformed_json(self, tmp_path):
        report, code = cli.run(["validate", "--config", _write(tmp_path, "{oops")])
        assert code == 1 and "line 1" in report["error"]

    def test_tolerance_overrides(self, tmp_path):
        report, _ = cli.run(["verdict", "--config", _write(tmp_path, GREEN), "--mode", "green",
                             "--tolerance-overrides", "growth_factor=1.1"])
        assert report["scenario"]["tolerances"]["growth_factor"] == 1.1
        _, code = cli.run(["verdict", "--config", _write(tmp_path, GREEN), "--mode", "green",
                           "--tolerance-overrides", "bogus=1"])
        assert code == 1

    def test_emit_testfn_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        _, code = cli.run(["emit", "--config", _write(tmp_path, GREEN), "--what", "testfn", "--out", str(out)])
        assert code == 0
        raw = out.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == "r,v"
        assert len(lines) == DEFAULT_TOLERANCES["n_radii"] + 1
        r, v = (float(x) for x in lines[1].split(","))
        assert v == pytest.approx(-math.log(r), rel=1e-15)

    def test_emit_empty_zero_trace(self, tmp_path):
        data = json.loads(json.dumps(GREEN))
        data["zeros"] = {}
        out = tmp_path / "trace.csv"
        _, code = cli.run(["emit", "--config", _write(tmp_path, data), "--what", "trace", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines() == ["cutoff,value", "0,0"]

    def test_emit_unwritable(self, tmp_path):
        _, code = cli.run(["emit", "--config", _write(tmp_path, GREEN), "--what", "green",
                           "--out", str(tmp_path / "no" / "dir.csv")])
        assert code == 1

    def test_json_out_matches_stdout(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = cli.main(["verdict", "--config", _write(tmp_path, GREEN), "--mode", "green",
                         "--json-out", str(target)])
        printed = json.loads(capsys.readouterr().out)
        assert code == 0
        assert json.loads(target.read_text()) == printed
        assert printed["verdict"] == "forced-zero"
