"""
g-指数与线性方程命令
expg、solve 以及图像数据复现 reproduce
"""

import logging

from .base_command import BaseCommand
from ..core.cantor import staircase_rows
from ..core.catalog import example1_problem
from ..core.gexp_ode import (
    LinearProblem,
    exponential_map,
    g_exponential,
    nonunique_solutions,
    residual_check,
    solve_forced,
    solve_homogeneous_ac,
)
from ..core.kernel_space import example1_h

logger = logging.getLogger(__name__)

FIGURES = ("v", "vtilde", "f3")


class ExpgCommand(BaseCommand):
    """exp_g(β; t)"""

    name = "expg"
    help = "计算 g-指数"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--beta", required=True, help="系数：常数、目录名或 JSON 规格")
        parser.add_argument("--g", default="identity", help="导子规格（缺省为 identity）")
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--at", type=float, help="单个点")
        group.add_argument("--grid", type=int, help="输出整条曲线的网格点数")

    def execute(self, args):
        g = self.load_g(args.g)
        beta = self.load_fn(args.beta, g)
        measure = self.measure(g)
        if args.at is not None:
            self.emit_json({"t": args.at, "value": g_exponential(beta, g, args.at, measure)})
            return 0
        curve = exponential_map(beta, g, measure)
        self.emit_frame(self.exporter.curve_frame(curve, self.grid(g, args.grid)), args)
        return 0


class SolveCommand(BaseCommand):
    """v'_g = βv + f，v(a) = v0"""

    name = "solve"
    help = "求解一阶线性 Stieltjes 微分方程，输出 (t, v(t), v(t⁺))"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--g", required=True, help="导子规格")
        parser.add_argument("--beta", required=True, help="系数")
        parser.add_argument("--forcing", help="外力项（缺省为齐次）")
        parser.add_argument("--v0", type=float, default=1.0, help="初值")
        parser.add_argument("--grid", type=int, help="输出网格点数")
        parser.add_argument("--emit", choices=("csv", "json"), help="输出格式（覆盖 --format）")
        parser.add_argument("--nonunique", action="store_true", help="同时给出由核元素构造的另一个 BD¹ 解")

    def execute(self, args):
        g = self.load_g(args.g)
        beta = self.load_fn(args.beta, g)
        forcing = self.load_fn(args.forcing, g) if args.forcing else None
        problem = LinearProblem(g, beta, args.v0, forcing)
        grid = self.grid(g, args.grid)
        measure = self.measure(g)
        if problem.is_homogeneous:
            v = solve_homogeneous_ac(problem, measure)
        else:
            v = solve_forced(problem, self.config.tolerance.tol, grid, measure, self.differentiator(g))
        if args.nonunique:
            if not problem.is_homogeneous:
                logger.warning("非唯一解只对齐次问题构造，忽略 --nonunique")
            else:
                h = example1_h(beta, g)
                v = nonunique_solutions(problem, h.map, grid, self.config.tolerance.kernel_tol, measure)
        residual = residual_check(v, problem, grid, self.differentiator(g))
        logger.info("残差 %.3e（%d 个点）", residual.max_residual, residual.points_checked)
        self.emit_frame(self.exporter.curve_frame(v, grid), args)
        return 0


class ReproduceCommand(BaseCommand):
    """复现 v、ṽ 和 F₃ 三条曲线的数据"""

    name = "reproduce"
    help = "输出 v、ṽ（δ₁=δ₂=1，[0,3]）或 F₃ 阶梯的数据"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--figure", required=True, choices=FIGURES, help="曲线名称")
        parser.add_argument("--grid", type=int, default=301, help="v / ṽ 的网格点数")
        parser.add_argument("--emit", choices=("csv", "json"), help="输出格式（覆盖 --format）")

    def execute(self, args):
        if args.figure == "f3":
            self.emit_frame(self.exporter.rows_frame(staircase_rows(3), ("x", "F3")), args)
            return 0
        problem = example1_problem()
        g = problem.g
        grid = self.grid(g, args.grid)
        if args.figure == "v":
            curve = solve_homogeneous_ac(problem)
        else:
            h = example1_h(problem.beta, g)
            curve = nonunique_solutions(problem, h.map, grid, self.config.tolerance.kernel_tol)
        self.emit_frame(self.exporter.curve_frame(curve, grid), args)
        return 0
