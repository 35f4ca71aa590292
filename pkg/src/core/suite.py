"""
性质检查套件
在内置示例上重新运行各模块的核心不变量，供 `suite` 子命令使用
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .cantor import cantor_derivator, cantor_iterate, triadic_float_grid, uniform_gap
from .catalog import (
    example1_g,
    example1_problem,
    gderexample_g,
    non_tvs_g,
    non_tvs_sequences,
    random_ac_function,
    random_derivator,
    random_dominated_pair,
)
from .gdiff import StieltjesDifferentiator
from .gexp_ode import nonunique_solutions, residual_check, solve_homogeneous_ac
from .interval_families import family_I1, family_I2, mvt_dominance_check
from .kernel_space import (
    additive_decompose,
    example1_h,
    is_kernel_member,
    kernel_gcontinuous_constancy_check,
    multiplicative_decompose,
    step_kernel,
)
from .measure import StieltjesMeasure
from .metric_bd import PairGrid, bd1_distance, chordal, metric_axioms_check
from .piecewise import PiecewiseMap
from ..utils.config import AppConfig
from ..utils.exceptions import StieltjesError

logger = logging.getLogger(__name__)

# δ₁ = δ₂ = 1、β ≡ 1 时 v 在 1、1⁺、2、2⁺ 处的值
FIGURE_V = (2.718281828459045, 5.436563656918090, 14.778112197861301, 29.556224395722602)
FIGURE_VTILDE_AT_1 = 1.359140914229523


@dataclass
class CheckResult:
    """单项检查结果"""

    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


class PropertySuite:
    """
    性质检查套件

    每个 check_* 方法返回一个 CheckResult；随机部分由配置中的种子决定。
    """

    def __init__(self, config: Optional[AppConfig] = None, random_cases: int = 20):
        """
        初始化套件

        Args:
            config: 应用配置
            random_cases: 随机用例数量（导子、函数对等）
        """
        self.config = config or AppConfig()
        self.random_cases = random_cases
        self.rng = np.random.default_rng(self.config.grid.random_seed)
        self.tol = self.config.tolerance

    def _grid(self, a: float, b: float) -> List[float]:
        return np.linspace(a, b, self.config.grid.grid_size).tolist()

    # ---- g-指数与非唯一解 ----

    def check_figure_v(self) -> CheckResult:
        problem = example1_problem()
        v = solve_homogeneous_ac(problem)
        observed = (v.eval(1.0), v.right_limit(1.0), v.eval(2.0), v.right_limit(2.0))
        gaps = [abs(o - e) for o, e in zip(observed, FIGURE_V)]
        return CheckResult("figure_v", max(gaps) <= 1e-12, {"observed": list(observed), "max_gap": max(gaps)})

    def check_nonunique_solution(self) -> CheckResult:
        problem = example1_problem()
        grid = self._grid(0.0, 3.0)
        h = example1_h(problem.beta, problem.g)
        v = solve_homogeneous_ac(problem)
        vt = nonunique_solutions(problem, h.map, grid, self.tol.kernel_tol)
        residual = residual_check(vt, problem, grid)
        detail = {
            "vtilde_0": vt.eval(0.0),
            "vtilde_1": vt.eval(1.0),
            "vtilde_2": vt.eval(2.0),
            "residual": residual.max_residual,
        }
        passed = (
            vt.eval(0.0) == 1.0
            and abs(vt.eval(1.0) - FIGURE_VTILDE_AT_1) <= 1e-12
            and abs(vt.eval(2.0) - math.e**2 / 2.0) <= 1e-12
            and residual.max_residual <= 1e-8
            and vt.eval(1.0) != v.eval(1.0)
        )
        return CheckResult("nonunique_solution", passed, detail)

    # ---- 核 ----

    def check_kernel_suite(self) -> CheckResult:
        tol = self.tol.kernel_tol
        g = example1_g()
        grid = self._grid(0.0, 3.0)
        failures = []
        for element in (step_kernel(g, [0.0, 1.0, -2.0]), example1_h(PiecewiseMap.constant(g.domain, 1.0), g)):
            if not is_kernel_member(element.map, g, grid, tol).is_member:
                failures.append(element.label)
        cantor = cantor_derivator(10)
        triadic = triadic_float_grid(self.config.grid.triadic_power)
        diff = StieltjesDifferentiator(cantor)
        for m in range(1, 6):
            if not is_kernel_member(cantor_iterate(m), cantor, triadic, tol, diff).is_member:
                failures.append(f"F{m}")
        own = is_kernel_member(PiecewiseMap.from_derivator(g), g, grid, tol)
        g_fails = not own.is_member and abs(own.max_abs_derivative - 1.0) <= tol
        for candidate in (PiecewiseMap.constant(g.domain, 4.0), step_kernel(g, [0.0, 1.0, 2.0]).map):
            constancy = kernel_gcontinuous_constancy_check(
                candidate, g, grid, tol, self.config.continuity, self.tol.continuity_tol
            )
            if not constancy.holds:
                failures.append(f"constancy:{candidate.label}")
        detail = {"failures": failures, "g_max_derivative": own.max_abs_derivative}
        return CheckResult("kernel_suite", not failures and g_fails, detail)

    def check_decompositions(self) -> CheckResult:
        problem = example1_problem()
        g = problem.g
        grid = self._grid(0.0, 3.0)
        v = solve_homogeneous_ac(problem)
        vt = nonunique_solutions(problem, example1_h(problem.beta, g).map, grid, self.tol.kernel_tol)
        pts = np.array(sorted(set(grid) | set(g.breakpoints)))

        add = additive_decompose(vt, g, self.tol.kernel_tol, grid)
        reconstruction = float(np.max(np.abs(add.h.values(pts) + add.rho.values(pts) - vt.values(pts))))
        add_v = additive_decompose(v, g, self.tol.kernel_tol, grid)
        v_rho = float(np.max(np.abs(add_v.rho.values(pts))))

        mul = multiplicative_decompose(vt, g, self.tol.kernel_tol, grid)
        product_gap = float(np.max(np.abs(mul.rho.values(pts) * mul.u.values(pts) - vt.values(pts))))
        u_gap = float(np.max(np.abs(mul.u.values(pts) - v.values(pts))))

        scale = float(np.max(np.abs(vt.values(pts))))
        passed = (
            add.verified
            and add.rho.eval(g.a) == 0.0
            and reconstruction <= 1e-12 * scale
            and add_v.verified
            and v_rho <= 1e-8
            and mul.verified
            and product_gap <= 1e-8
            and u_gap <= 1e-8
        )
        detail = {"reconstruction": reconstruction, "v_rho": v_rho, "product_gap": product_gap, "u_gap": u_gap}
        return CheckResult("decompositions", passed, detail)

    # ---- 度量 ----

    def check_gamma_witnesses(self) -> CheckResult:
        cantor = cantor_derivator(10)
        iterates = [cantor_iterate(n) for n in range(1, 6)]
        pairs = PairGrid(cantor, iterates, self.config.metric)
        cantor_worst = min(pairs.gamma(f, h).value for f, h in itertools.combinations(iterates, 2))

        g = non_tvs_g()
        rows = []
        passed = cantor_worst >= 1.0 - 1e-6
        for k in range(1, 11):
            f, h, f_k, h_k = non_tvs_sequences(k)
            total, total_k = f.add(h), f_k.add(h_k)
            sum_gamma = PairGrid(g, [total, total_k], self.config.metric).gamma(total, total_k).value
            d_f = bd1_distance(f, f_k, g, config=self.config.metric).d
            d_h = bd1_distance(h, h_k, g, config=self.config.metric).d
            ok = sum_gamma >= 1.0 - 1e-6 and d_f <= 2.0 / k + 1e-12 and d_h <= 3.0 / k + 1e-12
            passed = passed and ok
            rows.append({"k": k, "gamma_sum": sum_gamma, "d_f": d_f, "d_h": d_h})
        return CheckResult("gamma_witnesses", passed, {"cantor_min_gamma": cantor_worst, "non_tvs": rows})

    def check_chordal_axioms(self, triples: int = 10_000) -> CheckResult:
        x, y, z = self.rng.standard_cauchy(size=(3, triples))
        symmetric = bool(np.all(chordal(x, y) == chordal(y, x)))
        slack = float(np.max(chordal(x, z) - chordal(x, y) - chordal(y, z)))
        return CheckResult("chordal_axioms", symmetric and slack <= 1e-12, {"worst_triangle_slack": slack})

    def check_metric_axioms(self, triples: int = 3) -> CheckResult:
        g = example1_g()
        measure = StieltjesMeasure(g, self.tol.quad_tol)
        worst = -np.inf
        passed = True
        for _ in range(triples):
            maps = [random_ac_function(self.rng, g, measure, label=f"F{i}") for i in range(3)]
            report = metric_axioms_check(maps, g, config=self.config.metric)
            worst = max(worst, report.worst_triangle_slack)
            passed = passed and report.holds
        return CheckResult("metric_axioms", passed, {"worst_triangle_slack": float(worst)})

    # ---- 积分与求导 ----

    def check_ftc_roundtrip(self) -> CheckResult:
        worst = 0.0
        for i in range(self.random_cases):
            g = random_derivator(self.rng)
            measure = StieltjesMeasure(g, self.tol.quad_tol)
            F = random_ac_function(self.rng, g, measure)
            report = measure.ftc_roundtrip_check(F, 1e-7, np.linspace(g.a, g.b, 64).tolist())
            worst = max(worst, report.max_error)
        cantor = cantor_derivator(10)
        cantor_report = StieltjesMeasure(cantor).ftc_roundtrip_check(
            cantor_iterate(3), 1e-7, triadic_float_grid(self.config.grid.triadic_power)
        )
        passed = worst <= 1e-7 and not cantor_report.passed
        return CheckResult("ftc_roundtrip", passed, {"worst_error": worst, "F3_error": cantor_report.max_error})

    def check_calculus_rules(self, points: int = 50) -> CheckResult:
        worst = 0.0
        failures: List[Dict[str, Any]] = []

        def record(case: int, t: float, rule: str, predicted: float, observed: float) -> None:
            nonlocal worst
            gap = abs(predicted - observed) / max(1.0, abs(observed))
            worst = max(worst, gap)
            if gap > 1e-6:
                failures.append({"case": case, "t": float(t), "rule": rule, "gap": gap})

        for case in range(self.random_cases):
            g = random_derivator(self.rng)
            measure = StieltjesMeasure(g, self.tol.quad_tol)
            f1 = random_ac_function(self.rng, g, measure, "f1")
            f2 = random_ac_function(self.rng, g, measure, "f2")
            pts = np.union1d(np.linspace(g.a, g.b, 512), np.array(f2.breakpoints))
            # 分母远离零
            f2 = f2.shift(2.0 - float(np.min(f2.values(pts))))
            diff = StieltjesDifferentiator(g)
            oracle = diff.numeric()
            product, quotient = f1.multiply(f2), f1.divide(f2)
            for t in g.jump_points:
                delta = g.jumps[t]
                exact_p = (product.right_limit(t) - product.eval(t)) / delta
                exact_q = (quotient.right_limit(t) - quotient.eval(t)) / delta
                record(case, t, "product", diff.product_rule(f1, f2, t), exact_p)
                record(case, t, "quotient", diff.quotient_rule(f1, f2, t), exact_q)
            for t in self.rng.uniform(g.a, g.b, size=points):
                if t in g.breakpoints:
                    continue
                rep_p, rep_q = oracle.g_derivative(product, t), oracle.g_derivative(quotient, t)
                if not (rep_p.ok and rep_q.ok):
                    failures.append({"case": case, "t": float(t), "rule": "oracle", "gap": None})
                    continue
                record(case, t, "product", diff.product_rule(f1, f2, t), rep_p.value)
                record(case, t, "quotient", diff.quotient_rule(f1, f2, t), rep_q.value)
                chain = diff.chain_rule_check(np.sin, np.cos, f1, t)
                record(case, t, f"chain{chain.case}", chain.predicted, chain.observed)
        passed = not failures and worst <= 1e-6
        return CheckResult("calculus_rules", passed, {"worst_relative_gap": worst, "failures": failures[:10]})

    # ---- 区间族与中值定理 ----

    def check_interval_families(self) -> CheckResult:
        g = gderexample_g()
        i1 = [str(m) for m in family_I1(g)]
        i2 = [str(m) for m in family_I2(g)]
        passed = i1 == ["[0, 1]", "[2, 3]"] and i2 == ["[0, 1]", "(2, 3]"]
        return CheckResult("interval_families", passed, {"I1": i1, "I2": i2})

    def check_mvt(self) -> CheckResult:
        worst = -np.inf
        for _ in range(self.random_cases):
            g = random_derivator(self.rng)
            f, h = random_dominated_pair(self.rng, g)
            report = mvt_dominance_check(f, h, g, "i2", np.linspace(g.a, g.b, 48).tolist(), self.tol.tol)
            worst = max(worst, report.worst_excess)
        g = example1_g()
        kernel = step_kernel(g, [0.0, 1.0, 2.0]).map
        zero = PiecewiseMap.constant(g.domain, 0.0, label="0")
        grid = np.linspace(0.0, 3.0, 31).tolist()
        whole = mvt_dominance_check(kernel, zero, g, "whole", grid, self.tol.tol)
        per_member = mvt_dominance_check(kernel, zero, g, "i2", grid, self.tol.tol)
        passed = worst <= self.tol.tol and not whole.holds and per_member.holds
        return CheckResult("mvt", passed, {"random_worst_excess": float(worst), "kernel_whole": whole.to_dict()})

    # ---- Cantor ----

    def check_cantor_gaps(self) -> CheckResult:
        power = self.config.grid.triadic_power
        gaps = {n: uniform_gap(n, power) for n in range(1, 5)}
        passed = all(gap <= 2.0**-n for n, gap in gaps.items())
        return CheckResult("cantor_gaps", passed, {str(n): float(gap) for n, gap in gaps.items()})

    def checks(self) -> Dict[str, Callable[[], CheckResult]]:
        return {
            "figure_v": self.check_figure_v,
            "nonunique_solution": self.check_nonunique_solution,
            "kernel_suite": self.check_kernel_suite,
            "decompositions": self.check_decompositions,
            "gamma_witnesses": self.check_gamma_witnesses,
            "chordal_axioms": self.check_chordal_axioms,
            "metric_axioms": self.check_metric_axioms,
            "ftc_roundtrip": self.check_ftc_roundtrip,
            "calculus_rules": self.check_calculus_rules,
            "interval_families": self.check_interval_families,
            "mvt": self.check_mvt,
            "cantor_gaps": self.check_cantor_gaps,
        }

    def run(self, only: Optional[List[str]] = None) -> List[CheckResult]:
        """
        运行检查

        Args:
            only: 只运行这些名称的检查

        Returns:
            检查结果列表；检查中抛出的 StieltjesError 记为失败
        """
        results: List[CheckResult] = []
        for name, check in self.checks().items():
            if only and name not in only:
                continue
            try:
                result = check()
            except StieltjesError as e:
                logger.warning("检查 %s 抛出异常: %s", name, e)
                result = CheckResult(name, False, e.to_dict())
            logger.info("%s: %s", name, "通过" if result.passed else "失败")
            results.append(result)
        return results
