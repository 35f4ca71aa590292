"""
导子构造、求值与点分类测试
"""

import numpy as np
import pytest
from hypothesis import given, settings

from src.core.catalog import ae_zero_witness_g
from src.core.derivator import Derivator, PointClass
from src.core.segments import AffineForm, ConstantForm
from src.utils.exceptions import (
    EndpointHypothesisViolation,
    LeftContinuityViolation,
    MonotonicityViolation,
    OutOfDomain,
    SpecFormatError,
)
from tests.conftest import derivators


def _split_component_g() -> Derivator:
    """[1,3] 上的常值区间被 2 处的跳跃切成两个分量"""
    return Derivator(
        (0.0, 4.0),
        [0.0, 1.0, 2.0, 3.0, 4.0],
        [AffineForm(1.0), ConstantForm(1.0), ConstantForm(2.0), AffineForm(1.0, -1.0)],
        {2.0: 1.0},
    )


class TestEvaluation:
    def test_left_continuous_value_and_right_limit(self, example1):
        assert example1.eval(1.0) == 1.0
        assert example1.right_limit(1.0) == 2.0
        assert example1.eval(2.0) == 3.0
        assert example1.right_limit(2.0) == 4.0
        assert example1.delta(1.5) == 0.0

    def test_vectorized_matches_scalar(self, example1):
        ts = np.linspace(0.0, 3.0, 31)
        assert np.array_equal(example1.values(ts), np.array([example1.eval(t) for t in ts]))
        assert np.array_equal(example1(ts), example1.values(ts))

    def test_jump_at_left_endpoint(self):
        g = Derivator((0.0, 1.0), [0.0, 1.0], [AffineForm(1.0, 1.0)], {0.0: 1.0})
        assert g.eval(0.0) == 0.0
        assert g.right_limit(0.0) == 1.0
        assert g.values([0.0, 0.5]).tolist() == [0.0, 1.5]

    def test_out_of_domain(self, example1):
        with pytest.raises(OutOfDomain):
            example1.eval(3.5)
        with pytest.raises(OutOfDomain):
            example1.right_limit(3.0)


class TestClassification:
    def test_gderexample_classes(self, gderexample):
        interior = gderexample.classify(1.5)
        assert interior.kind == PointClass.CONSTANCY_INTERIOR
        assert interior.t_star == 2.0
        assert interior.component == (1.0, 2.0)
        assert gderexample.classify(1.0).kind == PointClass.NG_MINUS
        assert gderexample.classify(2.0).kind == PointClass.NG_PLUS
        assert gderexample.classify(0.5).kind == PointClass.REGULAR
        assert gderexample.classify(3.0).kind == PointClass.REGULAR

    def test_jump_classification(self, example1):
        c = example1.classify(1.0)
        assert c.kind == PointClass.JUMP
        assert c.delta_g == 1.0
        assert c.t_star == 1.0

    def test_jump_takes_precedence_and_splits_components(self):
        g = _split_component_g()
        assert g.constancy_components == ((1.0, 2.0), (2.0, 3.0))
        assert g.ng_minus == (1.0,)
        assert g.ng_plus == (3.0,)
        assert g.classify(2.0).kind == PointClass.JUMP
        assert g.classify(1.5).t_star == 2.0
        assert g.classify(2.5).t_star == 3.0
        assert g.classify(3.0).kind == PointClass.NG_PLUS

    def test_level_set_bounds(self, gderexample):
        assert gderexample.level_set_bounds(1.5) == (1.0, 2.0)
        assert gderexample.level_set_bounds(2.0) == (1.0, 2.0)
        assert gderexample.level_set_bounds(0.5) == (0.5, 0.5)

    def test_to_dict(self, gderexample):
        assert gderexample.classify(1.5).to_dict() == {
            "t": 1.5,
            "class": "ConstancyInterior",
            "t_star": 2.0,
            "delta_g": 0.0,
        }


class TestValidation:
    def test_decreasing_segment(self):
        with pytest.raises(MonotonicityViolation):
            Derivator((0.0, 1.0), [0.0, 1.0], [AffineForm(-1.0)])

    def test_negative_jump(self):
        with pytest.raises(MonotonicityViolation):
            Derivator((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), AffineForm(1.0)], {1.0: -1.0})

    def test_undeclared_jump(self):
        with pytest.raises(LeftContinuityViolation):
            Derivator((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), AffineForm(1.0, 1.0)])

    def test_jump_at_b_rejected(self):
        with pytest.raises(EndpointHypothesisViolation):
            Derivator((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), AffineForm(1.0)], {2.0: 1.0})

    def test_a_in_ng_minus_rejected(self):
        with pytest.raises(EndpointHypothesisViolation):
            Derivator((0.0, 2.0), [0.0, 1.0, 2.0], [ConstantForm(0.0), AffineForm(1.0, -1.0)])

    def test_constancy_reaching_b_rejected(self):
        with pytest.raises(EndpointHypothesisViolation):
            Derivator((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), ConstantForm(1.0)])

    @pytest.mark.parametrize(
        "bps, jumps",
        [([0.5, 1.0], None), ([0.0, 1.0, 0.5], None), ([0.0, 1.0], {0.5: 1.0})],
    )
    def test_spec_format_errors(self, bps, jumps):
        forms = [AffineForm(1.0)] * (len(bps) - 1)
        with pytest.raises(SpecFormatError):
            Derivator((0.0, 1.0), bps, forms, jumps)


class TestStructure:
    def test_closure_conditions(self, example1, cantor10):
        assert example1.closure_conditions().holds
        report = cantor10.closure_conditions()
        assert not report.ng_accum_ok
        assert report.dg_accum_ok

    def test_truncated_tail_mass(self):
        g = ae_zero_witness_g(20)
        assert g.tail_mass_bound() == 2.0**-19
        assert g.jumps[0.5] == 0.25
        assert g.jumps[-0.5] == 0.25
        assert g.eval(-1.0) == -1.0


class TestRandomDerivators:
    @given(derivators())
    @settings(max_examples=40, deadline=None)
    def test_nondecreasing_and_left_continuous(self, g):
        ts = np.union1d(np.linspace(g.a, g.b, 257), np.array(g.breakpoints))
        values = g.values(ts)
        assert np.all(np.diff(values) >= -1e-12)
        inner = ts[ts < g.b]
        assert np.all(g.right_limits(inner) >= g.values(inner))

    @given(derivators())
    @settings(max_examples=40, deadline=None)
    def test_classification_is_consistent(self, g):
        for t in g.jump_points:
            assert g.classify(t).kind == PointClass.JUMP
            assert g.right_limit(t) - g.eval(t) == pytest.approx(g.jumps[t])
        for lo, hi in g.constancy_components:
            mid = 0.5 * (lo + hi)
            assert g.classify(mid).t_star == hi
            assert g.eval(mid) == pytest.approx(g.eval(hi))
        assert g.classify(g.b).kind == PointClass.REGULAR
