"""
度量命令
Γ 与 d = ‖f−h‖∞ + ‖f'_g−h'_g‖∞ + Γ
"""

from dataclasses import replace

from .base_command import BaseCommand
from ..core.metric_bd import PairGrid, bd1_distance


class _PairCommand(BaseCommand):
    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--f", required=True, help="函数规格")
        parser.add_argument("--h", required=True, help="函数规格")
        parser.add_argument("--g", required=True, help="导子规格")
        parser.add_argument("--grid", type=int, help="Γ 点对网格的均匀点数")

    def _setup(self, args):
        g = self.load_g(args.g)
        f, h = self.load_fn(args.f, g), self.load_fn(args.h, g)
        metric = self.config.metric if args.grid is None else replace(self.config.metric, pair_grid=args.grid)
        return g, f, h, PairGrid(g, [f, h], metric)


class GammaCommand(_PairCommand):
    name = "gamma"
    help = "差商弦距离泛函 Γ(f,h) 的采样下界"

    def execute(self, args):
        _, f, h, pairs = self._setup(args)
        result = pairs.gamma(f, h)
        self.emit_json(
            {
                "gamma": result.value,
                "pair": list(result.pair) if result.pair else None,
                "pairs_checked": result.pairs_checked,
            }
        )
        return 0


class MetricCommand(_PairCommand):
    name = "metric"
    help = "BD¹ 度量 d(f,h) 及其三个分量"

    def execute(self, args):
        g, f, h, pairs = self._setup(args)
        report = bd1_distance(f, h, g, pairs=pairs, differentiator=self.differentiator(g))
        self.emit_json(report.to_dict())
        return 0
