"""
区间族模块
I₁ = [a,b]∖C_g 的连通分支，I₂ = [a,b]∖(C_g∪N_g⁺∪D_g) 的连通分支，
以及各种中值定理的可证伪不等式检查
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .derivator import Derivator
from .gdiff import StieltjesDifferentiator
from .piecewise import PiecewiseMap, is_g_continuous_at
from ..utils.config import ContinuityConfig
from ..utils.exceptions import DegenerateDenominator, DerivativeMissing, HypothesisFailed

logger = logging.getLogger(__name__)

FAMILIES = ("i1", "i2", "whole")


@dataclass(frozen=True)
class IntervalMember:
    """区间族成员，允许单点"""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def contains(self, t: float) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def select(self, pts: np.ndarray) -> np.ndarray:
        """pts 中属于该成员的点"""
        mask = (pts >= self.lo) & (pts <= self.hi)
        if not self.lo_closed:
            mask &= pts != self.lo
        if not self.hi_closed:
            mask &= pts != self.hi
        return pts[mask]

    def to_dict(self) -> Dict:
        return {"lo": self.lo, "hi": self.hi, "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class IntervalFamily:
    """
    有序、两两不交的区间族

    对符号化的族（如 Cantor 极限）另给出 totally_disconnected 标志和成员判定。
    """

    kind: str
    members: Tuple[IntervalMember, ...]
    totally_disconnected: bool = False
    membership: Optional[Callable[[float], bool]] = field(default=None, compare=False)

    def member_of(self, t: float) -> Optional[IntervalMember]:
        for m in self.members:
            if m.contains(t):
                return m
        return None

    def contains(self, t: float) -> bool:
        if self.membership is not None:
            return self.membership(t)
        return self.member_of(t) is not None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "members": [m.to_dict() for m in self.members],
            "totally_disconnected": self.totally_disconnected,
        }


# (lo, hi, lo_incl, hi_incl)
_Removed = Tuple[float, float, bool, bool]


def _merge_removed(removed: List[_Removed]) -> List[_Removed]:
    removed = sorted(removed, key=lambda r: (r[0], not r[2]))
    merged: List[_Removed] = []
    for r in removed:
        if merged:
            lo, hi, lo_in, hi_in = merged[-1]
            if r[0] < hi or (r[0] == hi and (hi_in or r[2])):
                if r[1] > hi:
                    hi, hi_in = r[1], r[3]
                elif r[1] == hi:
                    hi_in = hi_in or r[3]
                merged[-1] = (lo, hi, lo_in, hi_in)
                continue
        merged.append(r)
    return merged


def _complement(a: float, b: float, removed: List[_Removed]) -> Tuple[IntervalMember, ...]:
    """[a,b] 去掉若干区间后的连通分支"""
    members: List[IntervalMember] = []
    cursor, cursor_closed = a, True
    for lo, hi, lo_in, hi_in in _merge_removed(removed):
        _append(members, cursor, cursor_closed, lo, not lo_in)
        cursor, cursor_closed = hi, not hi_in
    _append(members, cursor, cursor_closed, b, True)
    return tuple(members)


def _append(members: List[IntervalMember], lo: float, lo_closed: bool, hi: float, hi_closed: bool) -> None:
    if lo < hi or (lo == hi and lo_closed and hi_closed):
        members.append(IntervalMember(lo, hi, lo_closed, hi_closed))


def family_I1(g: Derivator) -> IntervalFamily:
    """
    [a,b]∖C_g 的连通分支，全部为闭区间或单点

    Args:
        g: 导子

    Returns:
        区间族 I₁
    """
    removed = [(lo, hi, False, False) for lo, hi in g.constancy_components]
    members = _complement(g.a, g.b, removed)
    model = g.limit_model
    if model is not None and model.i1_membership is not None:
        return IntervalFamily("i1", members, True, model.i1_membership)
    return IntervalFamily("i1", members)


def family_I2(g: Derivator) -> IntervalFamily:
    """
    [a,b]∖(C_g∪N_g⁺∪D_g) 的连通分支，端点开闭由去掉的点决定

    Args:
        g: 导子

    Returns:
        区间族 I₂
    """
    removed: List[_Removed] = [(lo, hi, False, True) for lo, hi in g.constancy_components]
    removed += [(t, t, True, True) for t in g.jump_points]
    members = _complement(g.a, g.b, removed)
    model = g.limit_model
    if model is not None and model.i2_membership is not None:
        return IntervalFamily("i2", members, True, model.i2_membership)
    return IntervalFamily("i2", members)


def whole_family(g: Derivator) -> IntervalFamily:
    return IntervalFamily("whole", (IntervalMember(g.a, g.b),))


def family_by_name(g: Derivator, name: str) -> IntervalFamily:
    builders = {"i1": family_I1, "i2": family_I2, "whole": whole_family}
    if name not in builders:
        raise ValueError(f"未知的区间族: {name}，可选 {FAMILIES}")
    return builders[name](g)


@dataclass(frozen=True)
class DominanceReport:
    """|f(s)−f(t)| ≤ |h(s)−h(t)| 检查结果"""

    holds: bool
    worst_excess: float
    worst_pair: Optional[Tuple[float, float]] = None
    worst_member: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "holds": self.holds,
            "worst_excess": self.worst_excess,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "worst_member": self.worst_member,
        }


def _check_points(g: Derivator, grid: Iterable[float], *maps: PiecewiseMap) -> np.ndarray:
    pts = {float(x) for x in grid if g.a <= x <= g.b}
    pts.update(g.breakpoints)
    for m in maps:
        pts.update(m.breakpoints)
    return np.array(sorted(pts))


def mvt_dominance_check(
    f: PiecewiseMap,
    h: PiecewiseMap,
    g: Derivator,
    family: str = "i2",
    grid: Iterable[float] = (),
    tol: float = 1e-8,
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> DominanceReport:
    """
    在族的每个成员内检查 |f(s)−f(t)| ≤ |h(s)−h(t)| + tol

    先在网格上验证前提 |f'_g| ≤ h'_g。

    Args:
        f: 被控制函数
        h: 控制函数
        g: 导子
        family: i1 / i2 / whole
        grid: 采样网格
        tol: 容差
        differentiator: 求导器

    Returns:
        检查结果与最坏点对

    Raises:
        HypothesisFailed: 前提在某个网格点不成立
    """
    diff = differentiator or StieltjesDifferentiator(g)
    pts = _check_points(g, grid, f, h)
    for t in pts:
        df, dh = diff.g_derivative(f, t), diff.g_derivative(h, t)
        if not (df.ok and dh.ok):
            raise HypothesisFailed(f"{t} 处导数不存在，无法验证前提", {"t": float(t)})
        if abs(df.value) > dh.value + tol:
            raise HypothesisFailed(
                f"前提 |f'_g| ≤ h'_g 在 {t} 处不成立",
                {"t": float(t), "f_prime": df.value, "h_prime": dh.value},
            )
    worst_excess, worst_pair, worst_member = -np.inf, None, None
    for member in family_by_name(g, family):
        sel = member.select(pts)
        if sel.size < 2:
            continue
        fv, hv = f.values(sel), h.values(sel)
        excess = np.abs(np.subtract.outer(fv, fv)) - np.abs(np.subtract.outer(hv, hv))
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        if excess[i, j] > worst_excess:
            worst_excess, worst_pair, worst_member = float(excess[i, j]), (float(sel[i]), float(sel[j])), str(member)
    if worst_pair is None:
        return DominanceReport(True, 0.0)
    holds = worst_excess <= tol
    if not holds:
        logger.info("中值不等式在 %s 上不成立: 点对 %s 超出 %.3e", worst_member, worst_pair, worst_excess)
    return DominanceReport(holds, worst_excess, worst_pair, worst_member)


def mvt_gcontinuous_check(
    f: PiecewiseMap,
    h: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-8,
    differentiator: Optional[StieltjesDifferentiator] = None,
    continuity: Optional[ContinuityConfig] = None,
    continuity_tol: float = 1e-9,
) -> DominanceReport:
    """f、h 在 [a,b] 上 g-连续时，整个区间上的控制不等式"""
    for t in _check_points(g, grid, f, h):
        for fn in (f, h):
            if not is_g_continuous_at(fn, g, t, continuity_tol, continuity=continuity):
                raise HypothesisFailed(f"{fn.label} 在 {t} 处不 g-连续", {"t": float(t)})
    return mvt_dominance_check(f, h, g, "whole", grid, tol, differentiator)


@dataclass(frozen=True)
class BoundedMVTRow:
    member: str
    lhs: float
    sup_derivative: float
    g_increment: float
    holds: bool


@dataclass(frozen=True)
class BoundedMVTReport:
    holds: bool
    rows: Tuple[BoundedMVTRow, ...]

    def to_dict(self) -> Dict:
        return {"holds": self.holds, "rows": [row.__dict__ for row in self.rows]}


def mvt_bounded_check(
    f: PiecewiseMap,
    g: Derivator,
    tol: float = 1e-8,
    grid: Iterable[float] = (),
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> BoundedMVTReport:
    """
    I₂ 的每个成员 I（闭包 [c,d]）上检查
    |f(d⁻)−f(c⁺)| ≤ sup_I |f'_g| · (g(d⁻)−g(c⁺)) + tol

    sup 取成员内的采样点，是真上确界的下界。
    """
    diff = differentiator or StieltjesDifferentiator(g)
    pts = _check_points(g, grid, f)
    rows: List[BoundedMVTRow] = []
    for member in family_I2(g):
        if member.is_singleton:
            continue
        c, d = member.lo, member.hi
        f_hi = f.eval(d) if member.hi_closed else f.left_limit(d)
        f_lo = f.eval(c) if member.lo_closed else f.right_limit(c)
        g_lo = g.eval(c) if member.lo_closed else g.right_limit(c)
        increment = g.eval(d) - g_lo
        sup = 0.0
        for t in member.select(pts):
            rep = diff.g_derivative(f, t)
            if not rep.ok:
                raise DerivativeMissing(f"{f.label} 在 {t} 处不可 g-求导", rep.to_dict())
            sup = max(sup, abs(rep.value))
        lhs = abs(f_hi - f_lo)
        rows.append(BoundedMVTRow(str(member), lhs, sup, increment, lhs <= sup * increment + tol))
    return BoundedMVTReport(all(r.holds for r in rows), tuple(rows))


@dataclass(frozen=True)
class SlopeMassReport:
    """μ_g{f'_g ≥ 斜率} 与 μ_g{f'_g ≤ 斜率} 的估计"""

    slope: float
    above_mass: float
    below_mass: float
    total_mass: float

    @property
    def holds(self) -> bool:
        return self.above_mass > 0.0 and self.below_mass > 0.0

    def to_dict(self) -> Dict:
        return {
            "slope": self.slope,
            "above_mass": self.above_mass,
            "below_mass": self.below_mass,
            "total_mass": self.total_mass,
            "holds": self.holds,
        }


def ac_mean_slope_check(
    f: PiecewiseMap,
    g: Derivator,
    samples: int = 1024,
    tol: float = 1e-9,
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> SlopeMassReport:
    """
    对 g-绝对连续的 f，估计导数不小于/不大于平均斜率的 μ_g 质量

    单元 (u,v) 的质量为 g(v)−g(u⁺)，取中点导数；跳跃点作为原子单独计入。

    Args:
        f: g-绝对连续函数
        g: 导子
        samples: 均匀单元数
        tol: 比较容差

    Raises:
        DegenerateDenominator: g(b) = g(a)
    """
    denominator = g.eval(g.b) - g.eval(g.a)
    if denominator == 0.0:
        raise DegenerateDenominator("g(b) = g(a)，平均斜率无定义", {"a": g.a, "b": g.b})
    slope = (f.eval(g.b) - f.eval(g.a)) / denominator
    diff = differentiator or StieltjesDifferentiator(g)
    cuts = sorted(set(np.linspace(g.a, g.b, samples + 1).tolist()) | set(g.breakpoints) | set(f.breakpoints))
    above = below = total = 0.0

    def tally(mass: float, t: float) -> None:
        nonlocal above, below, total
        if mass <= 0.0:
            return
        rep = diff.g_derivative(f, t)
        if not rep.ok:
            raise DerivativeMissing(f"{f.label} 在 {t} 处不可 g-求导", rep.to_dict())
        total += mass
        if rep.value >= slope - tol:
            above += mass
        if rep.value <= slope + tol:
            below += mass

    for t in g.jump_points:
        tally(g.delta(t), t)
    for u, v in zip(cuts[:-1], cuts[1:]):
        tally(g.eval(v) - g.right_limit(u), 0.5 * (u + v))
    return SlopeMassReport(slope, above, below, total)
