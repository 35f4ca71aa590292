"""
Lebesgue–Stieltjes 测度、积分与不定积分测试
"""

import numpy as np
import pytest
from hypothesis import given, settings

from src.core.cantor import cantor_iterate, triadic_float_grid
from src.core.catalog import random_ac_function, random_integrand
from src.core.measure import GInterval, StieltjesMeasure
from src.core.piecewise import PiecewiseMap
from src.core.segments import AffineForm
from src.utils.exceptions import OutOfDomain
from tests.conftest import derivators_with_rng


def _one(g):
    return PiecewiseMap.constant(g.domain, 1.0, label="1")


class TestMeasure:
    def test_mu_over_constancy(self, gderexample):
        measure = StieltjesMeasure(gderexample)
        assert measure.mu(GInterval(0.0, 3.0)) == 2.0
        assert measure.mu(GInterval(1.0, 2.0)) == 0.0

    def test_mu_includes_left_atom(self, example1):
        measure = StieltjesMeasure(example1)
        assert measure.mu(GInterval(0.0, 2.0)) == 3.0
        assert measure.mu(GInterval(1.0, 1.5)) == 1.5
        assert measure.mu(GInterval(1.0, 1.0)) == 0.0
        assert measure.atom(2.0) == 1.0

    def test_out_of_domain(self, example1):
        with pytest.raises(OutOfDomain):
            StieltjesMeasure(example1).mu(GInterval(-1.0, 1.0))


class TestIntegrate:
    def test_constant_over_example1(self, example1):
        measure = StieltjesMeasure(example1)
        assert measure.integrate(_one(example1), GInterval(0.0, 3.0)).value == pytest.approx(5.0)
        assert measure.integrate_minus_jumps(_one(example1), GInterval(0.0, 3.0)).value == pytest.approx(3.0)

    def test_identity_integrand(self, example1):
        f = PiecewiseMap((0.0, 3.0), [0.0, 3.0], [AffineForm(1.0)], label="t")
        # ∫_0^3 t dt + 1·Δg(1) + 2·Δg(2)
        assert StieltjesMeasure(example1).integrate(f, GInterval(0.0, 3.0)).value == pytest.approx(7.5)

    def test_atom_uses_point_value(self, example1):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.0, 3.0], [0.0, 1.0], {1.0: 5.0})
        value = StieltjesMeasure(example1).integrate(f, GInterval(0.0, 1.5)).value
        assert value == pytest.approx(5.0 + 0.5)

    def test_l1_norm(self, example1):
        f = PiecewiseMap.constant(example1.domain, -2.0)
        assert StieltjesMeasure(example1).l1_norm(f, GInterval(0.0, 3.0)) == pytest.approx(10.0)

    def test_nothing_on_constancy(self, gderexample):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.0, 2.0, 3.0], [0.0, 100.0, 0.0])
        assert StieltjesMeasure(gderexample).integrate(f, GInterval(0.0, 3.0)).value == pytest.approx(0.0)


class TestIndefinite:
    def test_jumps_and_endpoint(self, example1):
        H = StieltjesMeasure(example1).indefinite(_one(example1))
        assert H.eval(0.0) == 0.0
        assert H.eval(1.0) == pytest.approx(1.0)
        assert H.right_limit(1.0) == pytest.approx(2.0)
        assert H.eval(3.0) == pytest.approx(5.0)

    @given(derivators_with_rng())
    @settings(max_examples=25, deadline=None)
    def test_agrees_with_integrate(self, case):
        g, rng = case
        measure = StieltjesMeasure(g)
        f = random_integrand(rng, g)
        H = measure.indefinite(f)
        for x in np.linspace(g.a, g.b, 9):
            expected = measure.integrate(f, GInterval(g.a, float(x))).value
            assert H.eval(x) == pytest.approx(expected, abs=1e-9)


class TestFTC:
    @given(derivators_with_rng())
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_on_ac_functions(self, case):
        g, rng = case
        measure = StieltjesMeasure(g)
        F = random_ac_function(rng, g, measure)
        report = measure.ftc_roundtrip_check(F, 1e-7, np.linspace(g.a, g.b, 33).tolist())
        assert report.passed, report

    def test_cantor_step_is_not_ac(self, cantor10):
        report = StieltjesMeasure(cantor10).ftc_roundtrip_check(cantor_iterate(3), 1e-7, triadic_float_grid(4))
        assert not report.passed
        assert report.max_error >= 0.5
