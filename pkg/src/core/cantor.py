"""
Cantor 函数模块
有限深度的 Cantor 导子、阶梯迭代 F_n 以及 Cantor 集成员判定
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from . import triadic
from .derivator import ClosureReport, Derivator, LimitModel
from .piecewise import PiecewiseMap
from .segments import CantorIterateForm
from ..utils.exceptions import OutOfDomain

logger = logging.getLogger(__name__)

# 浮点输入按此分母上限还原为有理数，1/3 等三进制端点可以精确恢复
SNAP_DENOMINATOR = 10**12


def _snap(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(float(x)).limit_denominator(SNAP_DENOMINATOR)


def cantor_g(x, depth: int) -> Fraction:
    """
    以 F₀(x)=x 为种子的第 depth 次迭代在 x 处的精确值

    Args:
        x: [0,1] 中的点
        depth: 迭代深度

    Returns:
        二进有理数（平台上）或仿射段上的有理数

    Raises:
        OutOfDomain: x 不在 [0,1] 内
    """
    value = _snap(x)
    if value < 0 or value > 1:
        raise OutOfDomain(f"x={x} 不在 [0, 1] 内", {"t": float(x)})
    return triadic.cantor_value(value, depth)


@dataclass(frozen=True)
class CantorMembership:
    """x 是否属于 E_depth 与 Ê_depth"""

    in_c: bool
    in_c_hat: bool

    def to_dict(self) -> Dict[str, bool]:
        return {"in_C": self.in_c, "in_C_hat": self.in_c_hat}


def cantor_membership(x, depth: int) -> CantorMembership:
    value = _snap(x)
    return CantorMembership(triadic.in_cantor_set(value, depth), triadic.in_cantor_hat(value, depth))


def cantor_derivator(depth: int, limit_standin: bool = True) -> Derivator:
    """
    第 depth 次迭代构成的导子：平台为常值段，其余为仿射上升段，无跳跃

    Args:
        depth: 迭代深度，至少为 1
        limit_standin: 为 True 时声明它代表真正的 Cantor 函数，
            闭包条件与区间族成员判定按极限对象给出

    Returns:
        导子
    """
    if depth < 1:
        raise ValueError(f"Cantor 导子深度至少为 1: {depth}")
    model = None
    if limit_standin:
        model = LimitModel(
            name="cantor",
            closure=ClosureReport(ng_accum_ok=False, dg_accum_ok=True, source="cantor"),
            i1_membership=lambda t: triadic.in_cantor_set(_snap(t), depth),
            i2_membership=lambda t: triadic.in_cantor_hat(_snap(t), depth),
        )
    g = Derivator((0.0, 1.0), [0.0, 1.0], [CantorIterateForm(depth, 0.0, 1.0)], label=f"cantor{depth}", limit_model=model)
    logger.debug("Cantor 导子深度 %d: %d 个平台", depth, len(g.constancy_components))
    return g


def staircase_steps(n: int) -> List[triadic.StepPiece]:
    return triadic.staircase_pieces(n)


def cantor_iterate(n: int) -> PiecewiseMap:
    """
    以 F₀≡1 为种子的阶梯迭代 F_n，右连续

    Args:
        n: 迭代次数

    Returns:
        [0,1] 上的阶梯函数
    """
    pieces = staircase_steps(n)
    bps = [float(p.lo) for p in pieces] + [1.0]
    return PiecewiseMap.step((0.0, 1.0), bps, [float(p.value) for p in pieces], label=f"F{n}")


def staircase_rows(n: int) -> List[Tuple[float, float]]:
    """F_n 图像的水平段端点 (x, F_n) 行，每段给出左右两个端点"""
    rows: List[Tuple[float, float]] = []
    for piece in staircase_steps(n):
        rows.append((float(piece.lo), float(piece.value)))
        rows.append((float(piece.hi), float(piece.value)))
    return rows


def uniform_gap(n: int, power: int) -> Fraction:
    """三进制网格上 max |F_{n+1} − F_n| 的精确值"""
    return max(abs(triadic.staircase_value(x, n + 1) - triadic.staircase_value(x, n)) for x in triadic.triadic_grid(power))


def triadic_float_grid(power: int) -> List[float]:
    return [float(x) for x in triadic.triadic_grid(power)]
