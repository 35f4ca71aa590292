"""
g-指数与线性 Stieltjes 微分方程测试
"""

import math

import numpy as np
import pytest

from src.core.catalog import example1_g, example1_problem, identity_g
from src.core.gexp_ode import (
    LinearProblem,
    check_regressive,
    exponential_map,
    g_exponential,
    nonunique_solutions,
    residual_check,
    solve_forced,
    solve_homogeneous_ac,
)
from src.core.kernel_space import example1_h, step_kernel
from src.core.piecewise import PiecewiseMap
from src.core.suite import FIGURE_V, FIGURE_VTILDE_AT_1
from src.utils.exceptions import (
    DomainMismatch,
    InitialValueMismatch,
    KernelViolation,
    RegressivityViolation,
)

GRID = np.linspace(0.0, 3.0, 61).tolist()
E = math.e


class TestExponential:
    def test_pointwise_values(self, example1):
        beta = PiecewiseMap.constant(example1.domain, 1.0)
        assert g_exponential(beta, example1, 0.0) == 1.0
        assert g_exponential(beta, example1, 1.0) == pytest.approx(E, rel=1e-12)
        assert g_exponential(beta, example1, 2.0) == pytest.approx(2.0 * E**2, rel=1e-12)

    def test_zero_coefficient_is_one(self, example1):
        zero = PiecewiseMap.constant(example1.domain, 0.0)
        e = exponential_map(zero, example1)
        assert e.values(GRID).tolist() == pytest.approx([1.0] * len(GRID))
        assert e.right_limit(1.0) == pytest.approx(1.0)

    def test_map_agrees_with_pointwise(self, example1):
        beta = PiecewiseMap.constant(example1.domain, 0.5)
        e = exponential_map(beta, example1)
        for t in (0.3, 1.0, 1.7, 2.0, 2.9):
            assert e.eval(t) == pytest.approx(g_exponential(beta, example1, t), rel=1e-10)

    def test_regressivity(self):
        g = example1_g()
        with pytest.raises(RegressivityViolation) as excinfo:
            check_regressive(PiecewiseMap.constant(g.domain, -1.0), g)
        assert excinfo.value.details["points"] == [1.0, 2.0]
        with pytest.raises(RegressivityViolation):
            example1_problem(beta=-1.0)


class TestHomogeneous:
    def test_figure_v(self):
        v = solve_homogeneous_ac(example1_problem())
        observed = (v.eval(1.0), v.right_limit(1.0), v.eval(2.0), v.right_limit(2.0))
        assert observed == pytest.approx(FIGURE_V, rel=1e-12)
        assert v.eval(0.0) == 1.0

    def test_initial_value_scales(self):
        v = solve_homogeneous_ac(example1_problem(v0=3.0))
        assert v.eval(1.0) == pytest.approx(3.0 * E)

    def test_residual_is_small(self):
        problem = example1_problem()
        report = residual_check(solve_homogeneous_ac(problem), problem, GRID)
        assert report.max_residual <= 1e-8
        assert report.points_checked >= len(GRID)

    def test_forced_problem_rejected(self, example1):
        problem = LinearProblem(
            example1,
            PiecewiseMap.constant(example1.domain, 1.0),
            forcing=PiecewiseMap.constant(example1.domain, 1.0),
        )
        with pytest.raises(ValueError):
            solve_homogeneous_ac(problem)

    def test_domain_mismatch(self, example1):
        with pytest.raises(DomainMismatch):
            LinearProblem(example1, PiecewiseMap.constant((0.0, 1.0), 1.0))


class TestNonunique:
    def test_vtilde_values(self):
        problem = example1_problem()
        h = example1_h(problem.beta, problem.g)
        vt = nonunique_solutions(problem, h.map, GRID)
        v = solve_homogeneous_ac(problem)
        assert vt.eval(0.0) == 1.0
        assert vt.eval(1.0) == pytest.approx(FIGURE_VTILDE_AT_1, rel=1e-12)
        assert vt.eval(2.0) == pytest.approx(E**2 / 2.0, rel=1e-12)
        assert vt.eval(1.0) != v.eval(1.0)
        assert residual_check(vt, problem, GRID).max_residual <= 1e-8

    def test_initial_value_mismatch(self):
        problem = example1_problem()
        h = step_kernel(problem.g, [2.0, 1.0, 1.0]).map
        with pytest.raises(InitialValueMismatch):
            nonunique_solutions(problem, h, GRID)

    def test_non_kernel_h(self):
        problem = example1_problem()
        h = PiecewiseMap.from_derivator(problem.g).shift(1.0)
        with pytest.raises(KernelViolation):
            nonunique_solutions(problem, h, GRID)


class TestForced:
    def test_constant_forcing_follows_measure(self, example1):
        problem = LinearProblem(
            example1,
            PiecewiseMap.constant(example1.domain, 0.0),
            forcing=PiecewiseMap.constant(example1.domain, 1.0),
        )
        v = solve_forced(problem, grid=GRID)
        # v(t) = 1 + μ_g([0,t))
        assert v.eval(0.5) == pytest.approx(1.5)
        assert v.right_limit(1.0) == pytest.approx(3.0)
        assert v.eval(3.0) == pytest.approx(6.0)

    def test_identity_derivator(self):
        g = identity_g(0.0, 1.0)
        problem = LinearProblem(
            g,
            PiecewiseMap.constant(g.domain, 0.0),
            v0=2.0,
            forcing=PiecewiseMap.constant(g.domain, 3.0),
        )
        v = solve_forced(problem, grid=np.linspace(0.0, 1.0, 21).tolist())
        assert v.eval(1.0) == pytest.approx(5.0)
