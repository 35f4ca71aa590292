"""
分析类命令
点分类、g-导数、Stieltjes 积分与中值不等式检查
"""

import argparse
import logging

from .base_command import BaseCommand, UsageError
from ..core.interval_families import FAMILIES, family_by_name, mvt_bounded_check, mvt_dominance_check
from ..core.measure import GInterval

logger = logging.getLogger(__name__)


def _add_points(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--at", type=float, help="单个点")
    group.add_argument("--grid", type=int, help="[a,b] 上的均匀网格点数")


class ClassifyCommand(BaseCommand):
    """按 D_g、C_g、N_g± 对点分类"""

    name = "classify"
    help = "对点做 D_g / C_g / N_g± 分类"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--g", required=True, help="导子：目录名或 JSON 规格路径")
        _add_points(parser)

    def execute(self, args):
        g = self.load_g(args.g)
        points = [args.at] if args.at is not None else self.grid(g, args.grid)
        self.emit_lines(g.classify(t).to_dict() for t in points)
        return 0


class DerivCommand(BaseCommand):
    """逐点 g-导数报告"""

    name = "deriv"
    help = "计算 f'_g，输出 JSON 行"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--f", required=True, help="函数规格")
        parser.add_argument("--g", required=True, help="导子规格")
        _add_points(parser)

    def execute(self, args):
        g = self.load_g(args.g)
        f = self.load_fn(args.f, g)
        diff = self.differentiator(g)
        points = [args.at] if args.at is not None else self.grid(g, args.grid)
        failures = 0
        for t in points:
            report = diff.g_derivative(f, t)
            failures += not report.ok
            self.emit_json(report.to_dict())
        if failures:
            logger.warning("%d 个点上导数不存在", failures)
        return 0


class IntegrateCommand(BaseCommand):
    """∫_{[c,d)} f dμ_g"""

    name = "integrate"
    help = "Lebesgue–Stieltjes 积分"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--f", required=True, help="被积函数规格")
        parser.add_argument("--g", required=True, help="导子规格")
        parser.add_argument("--from", dest="lo", type=float, help="积分下限（缺省为 a）")
        parser.add_argument("--to", dest="hi", type=float, help="积分上限（缺省为 b）")
        parser.add_argument("--skip-jumps", action="store_true", help="去掉原子部分")
        parser.add_argument("--abs", dest="l1", action="store_true", help="计算 ∫|f| dμ_g")

    def execute(self, args):
        g = self.load_g(args.g)
        f = self.load_fn(args.f, g)
        measure = self.measure(g)
        interval = GInterval(g.a if args.lo is None else args.lo, g.b if args.hi is None else args.hi)
        if args.l1:
            self.emit_json({"value": measure.l1_norm(f, interval), "abserr": None})
            return 0
        result = measure.integrate(f, interval, skip_jumps=args.skip_jumps)
        self.emit_json(result.to_dict())
        return 0


class MvtCommand(BaseCommand):
    """区间族上的控制不等式"""

    name = "mvt"
    help = "在 I₁ / I₂ / 整个区间上检查 |f(s)−f(t)| ≤ |h(s)−h(t)|"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--f", required=True, help="被控制函数")
        parser.add_argument("--h", help="控制函数（--bounded 时不需要）")
        parser.add_argument("--g", required=True, help="导子规格")
        parser.add_argument("--family", choices=FAMILIES, default="i2", help="区间族")
        parser.add_argument("--grid", type=int, default=128, help="采样点数")
        parser.add_argument("--bounded", action="store_true", help="改为检查 I₂ 上的有界导数中值不等式")
        parser.add_argument("--show-family", action="store_true", help="同时输出区间族")

    def execute(self, args):
        g = self.load_g(args.g)
        f = self.load_fn(args.f, g)
        grid = self.grid(g, args.grid)
        tol = self.config.tolerance.tol
        if args.show_family:
            self.emit_json(family_by_name(g, args.family).to_dict())
        if args.bounded:
            self.emit_json(mvt_bounded_check(f, g, tol, grid, self.differentiator(g)).to_dict())
            return 0
        if not args.h:
            raise UsageError("mvt 需要 --h")
        h = self.load_fn(args.h, g)
        report = mvt_dominance_check(f, h, g, args.family, grid, tol, self.differentiator(g))
        self.emit_json(report.to_dict())
        return 0
