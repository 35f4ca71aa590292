"""
Cantor 命令
阶梯迭代 F_n 的数据以及 Cantor 集成员判定
"""

from .base_command import BaseCommand
from ..core.cantor import cantor_g, cantor_membership, staircase_rows


class CantorCommand(BaseCommand):
    name = "cantor"
    help = "输出 F_n 阶梯的 (x, F_n(x)) 行，或查询单点"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--depth", type=int, required=True, help="迭代深度 n")
        parser.add_argument("--at", type=float, help="查询单点的 Cantor 函数值与成员关系")
        parser.add_argument("--emit", choices=("csv", "json"), help="输出格式（覆盖 --format）")

    def execute(self, args):
        if args.at is not None:
            value = cantor_g(args.at, args.depth)
            out = {"x": args.at, "depth": args.depth, "cantor_g": float(value), "exact": str(value)}
            out.update(cantor_membership(args.at, args.depth).to_dict())
            self.emit_json(out)
            return 0
        self.emit_frame(self.exporter.rows_frame(staircase_rows(args.depth), ("x", f"F{args.depth}")), args)
        return 0
