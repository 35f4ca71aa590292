"""
g-导数、导函数与运算法则测试
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.catalog import fderexample_f, identity_g, random_ac_function
from src.core.derivator import Derivator, PointClass
from src.core.gdiff import DerivativeMode, FailureKind, StieltjesDifferentiator
from src.core.measure import StieltjesMeasure
from src.core.piecewise import PiecewiseMap
from src.core.segments import AffineForm, ConstantForm, custom_form, exp_form
from src.utils.exceptions import DenominatorVanishes, DerivativeMissing
from tests.conftest import derivators_with_rng


class TestPointwise:
    @pytest.mark.parametrize(
        "t, expected, mode",
        [
            (0.5, 1.0, DerivativeMode.TWO_SIDED),
            (1.0, 1.0, DerivativeMode.TWO_SIDED),
            (1.5, 2.0, DerivativeMode.RIGHT_AT_BN),
            (2.0, 2.0, DerivativeMode.TWO_SIDED),
            (2.5, 2.0, DerivativeMode.TWO_SIDED),
        ],
    )
    def test_fderexample(self, gderexample, t, expected, mode):
        report = StieltjesDifferentiator(gderexample).g_derivative(fderexample_f(), t)
        assert report.ok
        assert report.value == pytest.approx(expected)
        assert report.mode == mode

    def test_jump_quotient(self, example1):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.0, 3.0], [0.0, 3.0], {1.0: 0.0})
        report = StieltjesDifferentiator(example1).g_derivative(f, 1.0)
        assert report.mode == DerivativeMode.RIGHT_AT_JUMP
        assert report.classification == PointClass.JUMP
        assert report.value == 3.0

    def test_left_right_mismatch(self):
        g = identity_g(0.0, 2.0)
        f = PiecewiseMap((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), AffineForm(3.0, -2.0)])
        report = StieltjesDifferentiator(g).g_derivative(f, 1.0)
        assert not report.ok
        assert report.failure.kind == FailureKind.LEFT_RIGHT_MISMATCH
        assert report.failure.left == pytest.approx(1.0)
        assert report.failure.right == pytest.approx(3.0)

    def test_discontinuity_off_jump_diverges(self):
        g = identity_g(0.0, 2.0)
        f = PiecewiseMap.step((0.0, 2.0), [0.0, 1.0, 2.0], [0.0, 1.0])
        report = StieltjesDifferentiator(g).g_derivative(f, 1.0)
        assert report.failure.kind == FailureKind.DIVERGES

    def test_sqrt_diverges_numerically(self):
        g = identity_g(0.0, 1.0)
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [custom_form("sqrt")])
        report = StieltjesDifferentiator(g).numeric().g_derivative(f, 0.0)
        assert not report.ok

    def test_numeric_matches_closed_form(self, example1):
        f = PiecewiseMap((0.0, 3.0), [0.0, 3.0], [custom_form("sin")])
        closed = StieltjesDifferentiator(example1).g_derivative(f, 0.7)
        numeric = StieltjesDifferentiator(example1).numeric().g_derivative(f, 0.7)
        assert numeric.value == pytest.approx(math.cos(0.7), rel=1e-6)
        assert closed.value == pytest.approx(numeric.value, rel=1e-6)


class TestDerivativeFunction:
    def test_gderexample(self, gderexample):
        df = StieltjesDifferentiator(gderexample).g_derivative_fn(fderexample_f())
        assert df.eval(0.5) == pytest.approx(1.0)
        assert df.eval(1.5) == pytest.approx(2.0)
        assert df.eval(2.5) == pytest.approx(2.0)

    def test_missing_raises(self):
        g = identity_g(0.0, 2.0)
        f = PiecewiseMap.step((0.0, 2.0), [0.0, 1.0, 2.0], [0.0, 1.0])
        with pytest.raises(DerivativeMissing) as excinfo:
            StieltjesDifferentiator(g).g_derivative_fn(f)
        assert excinfo.value.details["count"] >= 1

    def test_second_derivative(self):
        g = identity_g(0.0, 1.0)
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [exp_form(1.0, 1.0)])
        d2 = StieltjesDifferentiator(g).nth_derivative(f, 2, np.linspace(0.0, 1.0, 33))
        assert d2.eval(0.5) == pytest.approx(math.exp(0.5), rel=1e-9)


class TestRules:
    def test_product_rule_at_jump(self, example1):
        one = PiecewiseMap.from_derivator(example1)
        # (g·g)'_g(1) = g(1) + g(1⁺) = 3
        assert StieltjesDifferentiator(example1).product_rule(one, one, 1.0) == pytest.approx(3.0)

    def test_quotient_rule_zero_denominator(self, example1):
        diff = StieltjesDifferentiator(example1)
        f2 = PiecewiseMap((0.0, 3.0), [0.0, 1.0, 3.0], [ConstantForm(1.0), ConstantForm(0.0)], {1.0: 0.0})
        with pytest.raises(DenominatorVanishes):
            diff.quotient_rule(PiecewiseMap.constant((0.0, 3.0), 1.0), f2, 1.0)

    def test_chain_rule_cases(self, example1):
        diff = StieltjesDifferentiator(example1)
        f = PiecewiseMap.from_derivator(example1)
        assert diff.chain_rule_check(np.sin, np.cos, f, 0.5).case == 1
        at_jump = diff.chain_rule_check(np.sin, np.cos, f, 1.0)
        assert at_jump.case == 4
        assert at_jump.passed
        assert at_jump.predicted == pytest.approx(math.sin(2.0) - math.sin(1.0))

    def test_chain_rule_constancy_case(self, gderexample):
        f = fderexample_f()
        check = StieltjesDifferentiator(gderexample).chain_rule_check(np.square, lambda y: 2.0 * y, f, 1.5)
        assert check.case == 2
        assert check.predicted == pytest.approx(2.0 * 5.0 * 2.0)
        assert check.passed

    def test_chain_rule_constancy_ending_at_jump(self):
        g = Derivator(
            (0.0, 3.0),
            [0.0, 1.0, 2.0, 3.0],
            [AffineForm(1.0), ConstantForm(1.0), AffineForm(1.0)],
            {2.0: 1.0},
        )
        assert g.classify(1.5).t_star == 2.0
        assert g.classify(2.0).kind == PointClass.JUMP
        f = PiecewiseMap((0.0, 3.0), [0.0, 2.0, 3.0], [AffineForm(1.0), AffineForm(2.0, 1.0)], {2.0: 4.0})
        check = StieltjesDifferentiator(g).chain_rule_check(np.square, lambda y: 2.0 * y, f, 1.5)
        assert check.case == 2
        assert check.predicted == pytest.approx(25.0 - 16.0)
        assert check.observed == pytest.approx(9.0, rel=1e-6)
        assert check.passed

    @given(derivators_with_rng(), st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=25, deadline=None)
    def test_rules_against_difference_quotients(self, case, u):
        g, rng = case
        measure = StieltjesMeasure(g)
        f1 = random_ac_function(rng, g, measure, "f1")
        f2 = random_ac_function(rng, g, measure, "f2")
        pts = np.union1d(np.linspace(g.a, g.b, 257), np.array(f2.breakpoints))
        f2 = f2.shift(2.0 - float(np.min(f2.values(pts))))
        t = g.a + u * (g.b - g.a)
        if t in g.breakpoints:
            return
        diff = StieltjesDifferentiator(g)
        oracle = diff.numeric()
        expected = oracle.g_derivative(f1.multiply(f2), t)
        assert expected.ok
        assert diff.product_rule(f1, f2, t) == pytest.approx(expected.value, rel=1e-6, abs=1e-6)
        expected = oracle.g_derivative(f1.divide(f2), t)
        assert expected.ok
        assert diff.quotient_rule(f1, f2, t) == pytest.approx(expected.value, rel=1e-6, abs=1e-6)
        chain = diff.chain_rule_check(np.sin, np.cos, f1, t)
        assert chain.case in (1, 2)
        assert chain.passed, chain

    @given(derivators_with_rng())
    @settings(max_examples=20, deadline=None)
    def test_rules_at_jump_points(self, case):
        g, rng = case
        measure = StieltjesMeasure(g)
        f1 = random_ac_function(rng, g, measure, "f1")
        f2 = random_ac_function(rng, g, measure, "f2")
        pts = np.union1d(np.linspace(g.a, g.b, 257), np.array(f2.breakpoints))
        f2 = f2.shift(2.0 - float(np.min(f2.values(pts))))
        diff = StieltjesDifferentiator(g)
        product, quotient = f1.multiply(f2), f1.divide(f2)
        for t in g.jump_points:
            delta = g.jumps[t]
            exact = (product.right_limit(t) - product.eval(t)) / delta
            assert diff.product_rule(f1, f2, t) == pytest.approx(exact, rel=1e-8, abs=1e-8)
            exact = (quotient.right_limit(t) - quotient.eval(t)) / delta
            assert diff.quotient_rule(f1, f2, t) == pytest.approx(exact, rel=1e-8, abs=1e-8)
