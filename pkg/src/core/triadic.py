"""
三进制有理数运算
Cantor 函数迭代、Cantor 集成员判断，全部使用 Fraction 精确计算
"""

from fractions import Fraction
from typing import List, NamedTuple, Union

Number = Union[int, float, Fraction]

ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)
HALF = Fraction(1, 2)


class LinearPiece(NamedTuple):
    """线性种子迭代的一段：平台或上升段"""

    lo: Fraction
    hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    @property
    def is_plateau(self) -> bool:
        return self.y_lo == self.y_hi

    @property
    def slope(self) -> Fraction:
        return (self.y_hi - self.y_lo) / (self.hi - self.lo)


class StepPiece(NamedTuple):
    """阶梯迭代的一段，区间 [lo, hi) 上取常值 value"""

    lo: Fraction
    hi: Fraction
    value: Fraction


def as_fraction(x: Number) -> Fraction:
    """浮点数按二进制精确值转换"""
    return x if isinstance(x, Fraction) else Fraction(x)


def cantor_linear_pieces(depth: int) -> List[LinearPiece]:
    """
    以 F₀(x)=x 为种子的第 depth 次迭代，连续、分段线性

    Args:
        depth: 迭代次数

    Returns:
        按 lo 排序的分段列表，共 2^depth 个上升段与 2^depth-1 个平台
    """
    if depth < 0:
        raise ValueError(f"迭代深度必须非负: {depth}")
    pieces = [LinearPiece(Fraction(0), Fraction(1), Fraction(0), Fraction(1))]
    for _ in range(depth):
        left = [LinearPiece(p.lo / 3, p.hi / 3, p.y_lo / 2, p.y_hi / 2) for p in pieces]
        right = [
            LinearPiece(TWO_THIRDS + p.lo / 3, TWO_THIRDS + p.hi / 3, HALF + p.y_lo / 2, HALF + p.y_hi / 2)
            for p in pieces
        ]
        pieces = left + [LinearPiece(ONE_THIRD, TWO_THIRDS, HALF, HALF)] + right
    return pieces


def staircase_pieces(n: int) -> List[StepPiece]:
    """
    以 F₀≡1 为种子的第 n 次迭代 F_n，右连续阶梯函数

    相邻等值段合并；最后一段包含 x=1。
    """
    if n < 0:
        raise ValueError(f"迭代深度必须非负: {n}")
    pieces = [StepPiece(Fraction(0), Fraction(1), Fraction(1))]
    for _ in range(n):
        left = [StepPiece(p.lo / 3, p.hi / 3, p.value / 2) for p in pieces]
        right = [StepPiece(TWO_THIRDS + p.lo / 3, TWO_THIRDS + p.hi / 3, HALF + p.value / 2) for p in pieces]
        pieces = _merge_steps(left + [StepPiece(ONE_THIRD, TWO_THIRDS, HALF)] + right)
    return pieces


def _merge_steps(pieces: List[StepPiece]) -> List[StepPiece]:
    merged: List[StepPiece] = []
    for piece in pieces:
        if merged and merged[-1].value == piece.value and merged[-1].hi == piece.lo:
            merged[-1] = StepPiece(merged[-1].lo, piece.hi, piece.value)
        else:
            merged.append(piece)
    return merged


def cantor_value(x: Number, depth: int) -> Fraction:
    """F₀(x)=x 种子的迭代在 x 处的精确值"""
    x = as_fraction(x)
    _check_unit(x)
    value, scale = Fraction(0), Fraction(1)
    for _ in range(depth):
        if x < ONE_THIRD:
            x = 3 * x
        elif x < TWO_THIRDS:
            return value + scale / 2
        else:
            value += scale / 2
            x = 3 * x - 2
        scale /= 2
    return value + scale * x


def staircase_value(x: Number, n: int) -> Fraction:
    """F₀≡1 种子的迭代 F_n 在 x 处的精确值"""
    x = as_fraction(x)
    _check_unit(x)
    value, scale = Fraction(0), Fraction(1)
    for _ in range(n):
        if x < ONE_THIRD:
            x = 3 * x
        elif x < TWO_THIRDS:
            return value + scale / 2
        else:
            value += scale / 2
            x = 3 * x - 2
        scale /= 2
    return value + scale


def in_cantor_set(x: Number, depth: int) -> bool:
    """x ∈ E_depth（每层保留闭区间 [0,1/3] ∪ [2/3,1]）"""
    x = as_fraction(x)
    if x < 0 or x > 1:
        return False
    for _ in range(depth):
        if x <= ONE_THIRD:
            x = 3 * x
        elif x >= TWO_THIRDS:
            x = 3 * x - 2
        else:
            return False
    return True


def in_cantor_hat(x: Number, depth: int) -> bool:
    """x ∈ Ê_depth（每层保留 [0,1/3] ∪ (2/3,1]，去掉 (1/3,2/3]）"""
    x = as_fraction(x)
    if x < 0 or x > 1:
        return False
    for _ in range(depth):
        if x <= ONE_THIRD:
            x = 3 * x
        elif x > TWO_THIRDS:
            x = 3 * x - 2
        else:
            return False
    return True


def triadic_grid(power: int) -> List[Fraction]:
    """[0,1] 上 3^power+1 个三进制格点"""
    denominator = 3**power
    return [Fraction(k, denominator) for k in range(denominator + 1)]


def _check_unit(x: Fraction) -> None:
    if x < 0 or x > 1:
        raise ValueError(f"x 不在 [0,1] 内: {x}")
