"""
核命令
构造 ker ∂_g 的元素、检查成员关系以及加法/乘法分解
"""

import logging

import pandas as pd

from .base_command import BaseCommand, parse_floats
from ..core.kernel_space import (
    additive_decompose,
    additive_decompose_2,
    example1_h,
    is_kernel_member,
    kernel_gcontinuous_constancy_check,
    multiplicative_decompose,
    step_kernel,
)

logger = logging.getLogger(__name__)


class KernelCommand(BaseCommand):
    """ker ∂_g 相关操作"""

    name = "kernel"
    help = "构造、验证和分解 g-导数的核"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--g", required=True, help="导子规格")
        parser.add_argument("--grid", type=int, help="检查与输出网格点数")
        actions = parser.add_subparsers(dest="action", required=True)
        step = actions.add_parser("step", help="[a,b]∖D_g 各分支上取常值的阶梯元素")
        step.add_argument("--values", required=True, type=parse_floats, help="逗号分隔的分支值")
        example = actions.add_parser("example1", help="h = [∏(1+βΔg)]⁻¹")
        example.add_argument("--beta", required=True, help="系数")
        verify = actions.add_parser("verify", help="检查 f ∈ ker ∂_g")
        verify.add_argument("--f", required=True, help="函数规格")
        decompose = actions.add_parser("decompose", help="f = h + ρ 或 f = ρ·u")
        decompose.add_argument("--f", required=True, help="函数规格")
        decompose.add_argument("--mode", choices=("add", "add2", "mul"), default="add", help="分解方式")

    def execute(self, args):
        g = self.load_g(args.g)
        grid = self.grid(g, args.grid)
        tol = self.config.tolerance.kernel_tol
        if args.action == "step":
            element = step_kernel(g, args.values)
            self.emit_frame(self.exporter.curve_frame(element.map, grid), args)
        elif args.action == "example1":
            element = example1_h(self.load_fn(args.beta, g), g)
            self.emit_frame(self.exporter.curve_frame(element.map, grid), args)
        elif args.action == "verify":
            f = self.load_fn(args.f, g)
            out = is_kernel_member(f, g, grid, tol, self.differentiator(g)).to_dict()
            constancy = kernel_gcontinuous_constancy_check(
                f, g, grid, tol, self.config.continuity, self.config.tolerance.continuity_tol
            )
            out.update(g_continuous=constancy.is_g_continuous, constant=constancy.is_constant)
            self.emit_json(out)
        else:
            self._decompose(self.load_fn(args.f, g), g, grid, tol, args)
        return 0

    def _decompose(self, f, g, grid, tol, args):
        diff, measure = self.differentiator(g), self.measure(g)
        pts = self.exporter.curve_points(f, grid)
        columns = {"t": pts, "f": f.values(pts)}
        if args.mode == "add":
            result = additive_decompose(f, g, tol, grid, diff, measure)
            columns.update(h=result.h.values(pts), rho=result.rho.values(pts))
            reports = [result.kernel_report]
        elif args.mode == "add2":
            result = additive_decompose_2(f, g, tol, grid, diff, measure)
            columns.update(h=result.h.values(pts), rho1=result.rho1.values(pts), rho2=result.rho2.values(pts))
            reports = list(result.reports)
        else:
            result = multiplicative_decompose(f, g, tol, grid, diff, measure)
            columns.update(rho=result.rho.values(pts), u=result.u.values(pts))
            reports = [result.kernel_report]
        for report in reports:
            logger.info("核检查: %s", "通过" if report.is_member else "未通过")
        self.emit_frame(pd.DataFrame(columns), args)
