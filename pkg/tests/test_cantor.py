"""
Cantor 函数、阶梯迭代与三进制成员判定测试
"""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.core import triadic
from src.core.cantor import (
    cantor_derivator,
    cantor_g,
    cantor_iterate,
    cantor_membership,
    staircase_rows,
    triadic_float_grid,
    uniform_gap,
)
from src.utils.exceptions import OutOfDomain

F3_BREAKPOINTS = [0.0, 2 / 27, 2 / 9, 8 / 27, 2 / 3, 20 / 27, 8 / 9, 26 / 27, 1.0]


class TestCantorFunction:
    @pytest.mark.parametrize("depth", [1, 5, 20])
    def test_midpoint(self, depth):
        assert cantor_g(0.5, depth) == Fraction(1, 2)

    def test_quarter_approaches_one_third(self):
        assert float(cantor_g(Fraction(1, 4), 30)) == pytest.approx(1.0 / 3.0, abs=1e-8)

    def test_float_inputs_snap_to_triadic_points(self):
        assert cantor_g(1.0 / 3.0, 8) == Fraction(1, 2)
        assert cantor_g(2.0 / 3.0, 8) == Fraction(1, 2)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            cantor_g(1.5, 3)
        with pytest.raises(OutOfDomain):
            cantor_g(-0.1, 3)

    @given(st.fractions(min_value=0, max_value=1), st.fractions(min_value=0, max_value=1))
    def test_monotone(self, x, y):
        lo, hi = min(x, y), max(x, y)
        assert cantor_g(lo, 8) <= cantor_g(hi, 8)


class TestMembership:
    def test_points(self):
        assert cantor_membership(0.25, 12).in_c
        assert not cantor_membership(0.5, 1).in_c
        third = cantor_membership(Fraction(1, 3), 12)
        assert third.in_c and third.in_c_hat
        two_thirds = cantor_membership(Fraction(2, 3), 12)
        assert two_thirds.in_c and not two_thirds.in_c_hat
        assert cantor_membership(0.5, 1).to_dict() == {"in_C": False, "in_C_hat": False}

    @given(st.fractions(min_value=0, max_value=1))
    def test_hat_is_subset(self, x):
        if triadic.in_cantor_hat(x, 6):
            assert triadic.in_cantor_set(x, 6)


class TestDerivator:
    def test_depth_one(self):
        g = cantor_derivator(1)
        components = [tuple(c) for c in g.constancy_components]
        assert len(components) == 1
        assert components[0] == pytest.approx((1.0 / 3.0, 2.0 / 3.0))
        assert g.jump_points == ()

    def test_closure_of_limit_object(self, cantor10):
        closure = cantor10.closure_conditions()
        assert not closure.ng_accum_ok
        assert closure.dg_accum_ok

    def test_depth_must_be_positive(self):
        with pytest.raises(ValueError):
            cantor_derivator(0)


class TestIterates:
    def test_f3(self):
        f3 = cantor_iterate(3)
        assert list(f3.breakpoints) == pytest.approx(F3_BREAKPOINTS)
        assert f3.eval(0.0) == 0.125
        assert f3.eval(0.07) == 0.125
        assert f3.eval(1.0) == 1.0

    def test_rows_cover_the_unit_interval(self):
        rows = staircase_rows(3)
        assert rows[0] == (0.0, 0.125)
        assert rows[-1] == (1.0, 1.0)
        assert len(rows) == 2 * (len(F3_BREAKPOINTS) - 1)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_uniform_gap(self, n):
        assert 0 < uniform_gap(n, 6) <= Fraction(1, 2**n)

    def test_float_grid(self):
        grid = triadic_float_grid(2)
        assert len(grid) == 10
        assert grid[3] == pytest.approx(1.0 / 3.0)
