"""
JSON 规格读写测试
"""

import json

import numpy as np
import pytest

from src.core.catalog import example1_g, fderexample_f
from src.core.segments import AffineForm, ConstantForm
from src.core.spec_loader import (
    derivator_from_dict,
    dump_spec,
    function_from_dict,
    load_derivator,
    load_function,
    segment_from_dict,
)
from src.utils.config import ValidationConfig
from src.utils.exceptions import EndpointHypothesisViolation, LeftContinuityViolation, SpecFormatError

EXAMPLE1_SPEC = {
    "domain": [0, 3],
    "breakpoints": [0, 1, 2, 3],
    "segments": [
        {"form": "affine", "slope": 1},
        {"form": "affine", "slope": 1, "intercept": 1},
        {"form": "affine", "slope": 1, "intercept": 2},
    ],
    "jumps": {"1": 1, "2": 1},
}


class TestSegments:
    def test_forms(self):
        assert isinstance(segment_from_dict({"form": "constant", "level": 2}, 0.0, 1.0), ConstantForm)
        affine = segment_from_dict({"form": "affine", "slope": 2, "intercept": 1}, 0.0, 1.0)
        assert isinstance(affine, AffineForm)
        assert affine(0.5) == pytest.approx(2.0)
        assert segment_from_dict({"form": "polynomial", "coeffs": [0, 0, 1]}, 0.0, 1.0)(0.5) == pytest.approx(0.25)
        assert segment_from_dict({"form": "exp", "scale": 1, "rate": 1}, 0.0, 1.0)(1.0) == pytest.approx(np.e)
        assert segment_from_dict({"form": "custom", "name": "tanh"}, 0.0, 1.0)(0.5) == pytest.approx(np.tanh(0.5))

    @pytest.mark.parametrize(
        "spec",
        [
            {"form": "spline"},
            {"slope": 1},
            {"form": "affine"},
            {"form": "custom", "name": "gamma"},
            {"form": "constant", "level": "high"},
        ],
    )
    def test_bad_segments(self, spec):
        with pytest.raises(SpecFormatError):
            segment_from_dict(spec, 0.0, 1.0)


class TestDerivatorSpecs:
    def test_example1_from_dict(self):
        g = derivator_from_dict(EXAMPLE1_SPEC)
        assert g.jumps == {1.0: 1.0, 2.0: 1.0}
        assert g.right_limit(1.0) == pytest.approx(2.0)
        assert g.eval(3.0) == pytest.approx(5.0)

    def test_catalog_reference(self):
        assert derivator_from_dict({"catalog": "example1"}).jump_points == (1.0, 2.0)
        with pytest.raises(SpecFormatError):
            derivator_from_dict({"catalog": "nope"})

    def test_validation_propagates(self):
        spec = dict(EXAMPLE1_SPEC, jumps={"3": 1})
        with pytest.raises(EndpointHypothesisViolation):
            derivator_from_dict(spec)

    def test_breakpoint_match_tolerance(self):
        spec = dict(EXAMPLE1_SPEC, jumps={"1": 1, "2": 1.000001})
        with pytest.raises(LeftContinuityViolation):
            derivator_from_dict(spec)
        g = derivator_from_dict(spec, match_tol=1e-5)
        assert g.jumps[2.0] == pytest.approx(1.000001)

    def test_catalog_truncation_depth(self):
        g = derivator_from_dict({"catalog": "ae_zero"}, ValidationConfig(truncation_depth=5))
        assert len(g.jump_points) == 8
        assert g.tail_mass_bound() == pytest.approx(2.0**-4)
        assert len(load_derivator("ae_zero").jump_points) == 2 * 19
        f = load_function("ae_zero_f", truncation_depth=5)
        assert f.breakpoints == tuple(sorted({-1.0, 0.0, 0.75} | set(g.jump_points)))

    @pytest.mark.parametrize("key", ["domain", "breakpoints", "segments"])
    def test_missing_fields(self, key):
        spec = {k: v for k, v in EXAMPLE1_SPEC.items() if k != key}
        with pytest.raises(SpecFormatError):
            derivator_from_dict(spec)

    def test_segment_count(self):
        spec = dict(EXAMPLE1_SPEC, breakpoints=[0, 1, 3])
        with pytest.raises(SpecFormatError):
            derivator_from_dict(spec)


class TestFiles:
    def test_dump_and_load_derivator(self, tmp_path):
        path = tmp_path / "g.json"
        dump_spec(example1_g(), str(path))
        g = load_derivator(str(path))
        assert g.breakpoints == (0.0, 1.0, 2.0, 3.0)
        assert g.jumps == {1.0: 1.0, 2.0: 1.0}
        ts = np.linspace(0.0, 3.0, 31)
        assert np.allclose(g.values(ts), example1_g().values(ts))

    def test_dump_and_load_function(self, tmp_path):
        path = tmp_path / "f.json"
        dump_spec(fderexample_f(), str(path))
        f = load_function(str(path))
        original = fderexample_f()
        for t in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
            assert f.eval(t) == pytest.approx(original.eval(t))

    def test_function_point_values(self):
        spec = {
            "domain": [0, 1],
            "breakpoints": [0, 0.5, 1],
            "segments": [{"form": "constant", "level": 0}, {"form": "constant", "level": 1}],
            "point_values": {"0.5": 7},
        }
        f = function_from_dict(spec)
        assert f.eval(0.5) == 7.0
        assert f.right_limit(0.5) == 1.0

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(SpecFormatError):
            load_derivator(str(tmp_path / "missing.json"))
        broken = tmp_path / "broken.json"
        broken.write_text("{not json", encoding="utf-8")
        with pytest.raises(SpecFormatError):
            load_derivator(str(broken))

    def test_dump_is_sorted_json(self, tmp_path):
        path = tmp_path / "g.json"
        dump_spec(example1_g(), str(path))
        data = json.loads(path.read_text(encoding="utf-8"))
        assert list(data) == sorted(data)


class TestReferences:
    def test_function_references(self, example1):
        assert load_function("2.5", example1).eval(1.0) == 2.5
        assert load_function("g", example1).eval(3.0) == pytest.approx(5.0)
        assert load_function("fderexample").eval(2.0) == 5.0

    def test_constant_needs_derivator(self):
        with pytest.raises(SpecFormatError):
            load_function("2.5")
