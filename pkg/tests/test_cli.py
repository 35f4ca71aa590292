"""
命令行入口测试
"""

import io
import json
import math

import pandas as pd
import pytest

from stieltjes import run


def _json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


class TestExitCodes:
    def test_expg_point(self, capsys):
        assert run(["expg", "--beta", "0", "--at", "0.7"]) == 0
        assert _json_lines(capsys.readouterr().out) == [{"t": 0.7, "value": 1.0}]

    def test_unknown_subcommand(self, capsys):
        assert run(["differentiate"]) == 2

    def test_missing_required_argument(self, capsys):
        assert run(["classify", "--at", "0.5"]) == 2

    def test_mvt_without_h(self, capsys):
        assert run(["mvt", "--f", "fderexample", "--g", "gderexample"]) == 2

    def test_missing_spec_file(self, capsys, tmp_path):
        code = run(["classify", "--g", str(tmp_path / "nope.json"), "--at", "0.5"])
        assert code == 1
        error = json.loads(capsys.readouterr().out)
        assert error["error"] == "SpecFormatError"
        assert "path" in error["details"]

    def test_invalid_derivator_spec(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        spec = {
            "domain": [0, 1],
            "breakpoints": [0, 1],
            "segments": [{"form": "affine", "slope": -1}],
        }
        path.write_text(json.dumps(spec), encoding="utf-8")
        assert run(["classify", "--g", str(path), "--at", "0.5"]) == 1
        assert json.loads(capsys.readouterr().out)["error"] == "MonotonicityViolation"

    def test_bad_config(self, capsys, tmp_path):
        assert run(["--config", str(tmp_path / "none.yaml"), "expg", "--beta", "0", "--at", "0.5"]) == 2


class TestCommands:
    def test_classify_grid(self, capsys):
        assert run(["classify", "--g", "gderexample", "--grid", "7"]) == 0
        rows = _json_lines(capsys.readouterr().out)
        assert [row["class"] for row in rows] == [
            "Regular",
            "Regular",
            "NgMinus",
            "ConstancyInterior",
            "NgPlus",
            "Regular",
            "Regular",
        ]
        assert rows[3]["t_star"] == 2.0

    def test_deriv(self, capsys):
        assert run(["deriv", "--f", "fderexample", "--g", "gderexample", "--at", "1.5"]) == 0
        (report,) = _json_lines(capsys.readouterr().out)
        assert report["value"] == pytest.approx(2.0)

    def test_integrate(self, capsys):
        assert run(["integrate", "--f", "1", "--g", "example1"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(5.0)
        assert run(["integrate", "--f", "1", "--g", "example1", "--skip-jumps"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(3.0)

    def test_reproduce_v(self, capsys):
        assert run(["reproduce", "--figure", "v", "--grid", "31"]) == 0
        df = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(df.columns) == ["t", "value", "right_limit"]
        at_one = df.loc[df["t"] == 1.0].iloc[0]
        assert at_one["value"] == pytest.approx(math.e, rel=1e-12)
        assert at_one["right_limit"] == pytest.approx(2.0 * math.e, rel=1e-12)

    def test_reproduce_f3_json(self, capsys):
        assert run(["--format", "json", "reproduce", "--figure", "f3"]) == 0
        rows = _json_lines(capsys.readouterr().out)
        assert rows[0] == {"x": 0.0, "F3": 0.125}
        assert len(rows) == 16

    def test_cantor_point(self, capsys):
        assert run(["cantor", "--depth", "4", "--at", "0.5"]) == 0
        (out,) = _json_lines(capsys.readouterr().out)
        assert out["exact"] == "1/2"
        assert out["in_C"] is False

    def test_cantor_out_of_domain(self, capsys):
        assert run(["cantor", "--depth", "4", "--at", "2"]) == 1
        assert json.loads(capsys.readouterr().out)["error"] == "OutOfDomain"

    def test_kernel_step(self, capsys):
        assert run(["kernel", "--g", "example1", "step", "--values", "0,1,2"]) == 0
        assert capsys.readouterr().out.strip()

    def test_kernel_verify_constant(self, capsys):
        assert run(["kernel", "--g", "example1", "--grid", "31", "verify", "--f", "2"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["is_member"] is True
        assert report["g_continuous"] is True
        assert report["constant"] is True

    def test_mvt_self_dominance(self, capsys):
        code = run(["mvt", "--f", "g", "--h", "g", "--g", "example1", "--family", "whole", "--grid", "16"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["holds"] is True

    def test_suite_subset(self, capsys):
        assert run(["suite", "--only", "interval_families", "cantor_gaps"]) == 0
        rows = _json_lines(capsys.readouterr().out)
        assert {row["name"] for row in rows} == {"interval_families", "cantor_gaps"}
        assert all(row["passed"] for row in rows)


@pytest.mark.slow
class TestFullSuite:
    def test_suite_exits_zero(self, capsys):
        assert run(["suite"]) == 0
        rows = _json_lines(capsys.readouterr().out)
        assert len(rows) == 12
        assert all(row["passed"] for row in rows), [row for row in rows if not row["passed"]]


class TestConfigFile:
    def test_truncation_depth_reaches_catalog(self, capsys, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("validation:\n  truncation_depth: 3\n", encoding="utf-8")
        assert run(["--config", str(path), "classify", "--g", "ae_zero", "--at", "0.25"]) == 0
        assert _json_lines(capsys.readouterr().out)[0]["class"] == "Regular"
        assert run(["classify", "--g", "ae_zero", "--at", "0.25"]) == 0
        assert _json_lines(capsys.readouterr().out)[0]["class"] == "Jump"
