"""
曲线导出测试
"""

import io
import json
import math

import pandas as pd
import pytest

from src.core.cantor import staircase_rows
from src.core.catalog import example1_problem
from src.core.gexp_ode import solve_homogeneous_ac
from src.reporting import CurveExporter
from src.utils.config import ExportConfig


@pytest.fixture
def exporter():
    return CurveExporter()


@pytest.fixture
def v():
    return solve_homogeneous_ac(example1_problem())


class TestCurveFrame:
    def test_right_limits_only_at_jumps(self, exporter, v):
        df = exporter.curve_frame(v, [0.5, 1.5, 2.5])
        assert df["t"].tolist() == [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
        jumps = df.dropna(subset=["right_limit"])
        assert jumps["t"].tolist() == [1.0, 2.0]
        assert jumps["right_limit"].tolist() == pytest.approx([2.0 * math.e, 4.0 * math.e**2])

    def test_csv_keeps_full_precision(self, exporter, v):
        text = exporter.to_csv(exporter.curve_frame(v))
        assert text.splitlines()[0] == "t,value,right_limit"
        df = pd.read_csv(io.StringIO(text))
        assert df.loc[df["t"] == 1.0, "value"].item() == pytest.approx(math.e, rel=1e-12)

    def test_float_format_override(self, v):
        exporter = CurveExporter(ExportConfig(float_format="%.3f"))
        text = exporter.to_csv(exporter.curve_frame(v))
        assert "2.718," in text

    def test_write_to_file(self, exporter, v, tmp_path):
        path = tmp_path / "v.csv"
        assert exporter.to_csv(exporter.curve_frame(v), str(path)) is None
        df = pd.read_csv(path)
        assert list(df.columns) == ["t", "value", "right_limit"]
        assert len(df) == len(v.breakpoints)


class TestRecords:
    def test_nan_becomes_null(self, exporter, v):
        records = exporter.to_records(exporter.curve_frame(v))
        assert records[0] == {"t": 0.0, "value": 1.0, "right_limit": None}

    def test_emit_json_lines(self, exporter):
        df = exporter.rows_frame(staircase_rows(1), ["x", "F1"])
        stream = io.StringIO()
        exporter.emit(df, "json", stream)
        lines = [json.loads(line) for line in stream.getvalue().splitlines()]
        assert lines[0] == {"x": 0.0, "F1": 0.5}
        assert lines[-1] == {"x": 1.0, "F1": 1.0}
