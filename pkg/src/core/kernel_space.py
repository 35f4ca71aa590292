"""
ker ∂_g 模块
核元素的构造与验证，以及 BD¹ 函数的加法、乘法分解
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .derivator import Derivator
from .gdiff import StieltjesDifferentiator
from .measure import StieltjesMeasure
from .piecewise import PiecewiseMap, bd_membership, is_g_continuous_at
from ..utils.config import ContinuityConfig
from ..utils.exceptions import (
    ClosureConditionFailed,
    DerivativeMissing,
    RegressivityViolation,
    RightContinuityViolation,
    SpecFormatError,
)

logger = logging.getLogger(__name__)


class KernelConstruction(str, Enum):
    STEP_OVER_DG = "StepOverDg"
    EXAMPLE1_INVERSE = "Example1Inverse"
    USER_SUPPLIED = "UserSupplied"


@dataclass(frozen=True)
class KernelElement:
    """ker ∂_g 中的函数及其构造方式"""

    map: PiecewiseMap
    construction: KernelConstruction = KernelConstruction.USER_SUPPLIED

    def __call__(self, t):
        return self.map(t)

    @property
    def label(self) -> str:
        return self.map.label


@dataclass(frozen=True)
class KernelReport:
    """核成员检查结果"""

    is_member: bool
    max_abs_derivative: float
    worst_point: Optional[float]
    product_rule_ok: bool
    failures: Tuple[float, ...] = ()
    points_checked: int = 0

    def to_dict(self) -> Dict:
        return {
            "is_member": self.is_member,
            "max_abs_derivative": self.max_abs_derivative,
            "worst_point": self.worst_point,
            "product_rule_ok": self.product_rule_ok,
            "failures": list(self.failures),
            "points_checked": self.points_checked,
        }


def dg_free_components(g: Derivator) -> List[Tuple[float, float]]:
    """[a,b]∖D_g 的连通分支（以端点对表示）"""
    cuts = [g.a] + [t for t in g.jump_points if t > g.a] + [g.b]
    return list(zip(cuts[:-1], cuts[1:]))


def step_kernel(
    g: Derivator,
    values: Sequence[float],
    point_values: Optional[Dict[float, float]] = None,
    label: str = "h",
) -> KernelElement:
    """
    在 [a,b]∖D_g 的每个分支上取常值，跳跃点处右连续

    Args:
        g: 导子
        values: 每个分支一个值，按从左到右
        point_values: 可选的跳跃点处显式值，必须等于右侧分支的值
        label: 名称

    Returns:
        核元素

    Raises:
        ClosureConditionFailed: D_g′ ⊆ D_g 不成立
        RightContinuityViolation: 显式点值破坏跳跃点处的右连续
    """
    closure = g.closure_conditions()
    if not closure.dg_accum_ok:
        raise ClosureConditionFailed("阶梯核元素要求 D_g′ ⊆ D_g", {"source": closure.source})
    components = dg_free_components(g)
    if len(values) != len(components):
        raise SpecFormatError(
            f"需要 {len(components)} 个分支值，实际为 {len(values)}",
            {"components": [list(c) for c in components]},
        )
    levels = [float(v) for v in values]
    if not np.all(np.isfinite(levels)):
        raise SpecFormatError("分支值必须有限")
    cuts = [lo for lo, _ in components] + [g.b]
    for t, v in (point_values or {}).items():
        t = float(t)
        if t not in g.jumps:
            raise SpecFormatError(f"{t} 不是跳跃点")
        right = levels[cuts.index(t)]
        if float(v) != right:
            raise RightContinuityViolation(
                f"跳跃点 {t} 处的值 {v} 与右侧分支值 {right} 不一致",
                {"t": t, "value": float(v), "right": right},
            )
    h = PiecewiseMap.step(g.domain, cuts, levels, label=label)
    return KernelElement(h, KernelConstruction.STEP_OVER_DG)


def example1_h(beta: PiecewiseMap, g: Derivator, label: str = "h") -> KernelElement:
    """
    h(t) = [∏_{s∈[a,t]∩D_g}(1+β(s)Δg(s))]⁻¹

    Raises:
        RegressivityViolation: 某个跳跃点处 1+βΔg = 0
    """
    product = 1.0
    levels = []
    for lo, _ in dg_free_components(g):
        if lo in g.jumps:
            factor = 1.0 + beta.eval(lo) * g.jumps[lo]
            if factor == 0.0:
                raise RegressivityViolation(f"{beta.label} 在 {lo} 处不是 g-正则的", {"t": lo})
            product *= factor
        levels.append(1.0 / product)
    element = step_kernel(g, levels, label=label)
    return KernelElement(element.map, KernelConstruction.EXAMPLE1_INVERSE)


def kernel_check_points(f: PiecewiseMap, g: Derivator, grid: Iterable[float]) -> List[float]:
    """网格、跳跃点、N_g、每个常值分量一个代表点和全部断点"""
    pts = {float(x) for x in grid if g.a <= x <= g.b}
    pts.update(g.breakpoints)
    pts.update(f.breakpoints)
    pts.update(g.ng_points)
    pts.update(0.5 * (lo + hi) for lo, hi in g.constancy_components)
    return sorted(pts)


def is_kernel_member(
    f: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> KernelReport:
    """
    在检查点上验证 f'_g = 0，并用 (f·g)'_g = f* 交叉验证

    Args:
        f: 函数
        g: 导子
        grid: 采样网格
        tol: 容差

    Returns:
        核成员检查结果
    """
    diff = differentiator or StieltjesDifferentiator(g)
    pts = kernel_check_points(f, g, grid)
    product = f.multiply(PiecewiseMap.from_derivator(g))
    worst, worst_point = 0.0, None
    failures: List[float] = []
    product_ok = True
    for t in pts:
        rep = diff.g_derivative(f, t)
        if not rep.ok:
            failures.append(t)
            continue
        if abs(rep.value) > worst:
            worst, worst_point = abs(rep.value), t
        cross = diff.g_derivative(product, t)
        f_star = f.eval(g.t_star(t))
        if not cross.ok or abs(cross.value - f_star) > tol * max(1.0, abs(f_star)):
            product_ok = False
    is_member = not failures and worst <= tol and product_ok
    if failures:
        logger.debug("%s 在 %d 个点上不可 g-求导", f.label, len(failures))
    return KernelReport(is_member, float(worst), worst_point, product_ok, tuple(failures), len(pts))


def _require_derivative(f: PiecewiseMap, diff: StieltjesDifferentiator, grid: Iterable[float]) -> PiecewiseMap:
    try:
        return diff.g_derivative_fn(f, grid)
    except DerivativeMissing:
        logger.warning("%s 的 g-导数不存在，无法分解", f.label)
        raise


@dataclass(frozen=True)
class AdditiveDecomposition:
    """f = h + ρ，h g-绝对连续，ρ ∈ ker ∂_g，ρ(a) = 0"""

    h: PiecewiseMap
    rho: PiecewiseMap
    kernel_report: KernelReport

    @property
    def verified(self) -> bool:
        return self.kernel_report.is_member


def additive_decompose(
    f: PiecewiseMap,
    g: Derivator,
    tol: float = 1e-9,
    grid: Iterable[float] = (),
    differentiator: Optional[StieltjesDifferentiator] = None,
    measure: Optional[StieltjesMeasure] = None,
) -> AdditiveDecomposition:
    """
    h(t) = f(a) + ∫_{[a,t)} f'_g dμ_g，ρ = f − h

    Raises:
        DerivativeMissing: f 不可 g-求导
        IntegrationFailure: f'_g 的积分失败
    """
    diff = differentiator or StieltjesDifferentiator(g)
    measure = measure or StieltjesMeasure(g)
    grid = list(grid)
    derivative = _require_derivative(f, diff, grid)
    h = measure.indefinite(derivative).shift(f.eval(g.a))
    h.label = f"h[{f.label}]"
    rho = f.subtract(h)
    rho.label = f"ρ[{f.label}]"
    report = is_kernel_member(rho, g, grid, tol, diff)
    if not report.is_member:
        logger.warning("加法分解的 ρ 未通过核检查: 最大导数 %.3e", report.max_abs_derivative)
    return AdditiveDecomposition(h, rho, report)


@dataclass(frozen=True)
class SecondOrderDecomposition:
    """f = h + ρ₁ + ρ₂，(ρ₁)'_g = 0，(ρ₂)''_g = 0"""

    h: PiecewiseMap
    rho1: PiecewiseMap
    rho2: PiecewiseMap
    reports: Tuple[KernelReport, KernelReport]

    @property
    def verified(self) -> bool:
        return all(r.is_member for r in self.reports)


def additive_decompose_2(
    f: PiecewiseMap,
    g: Derivator,
    tol: float = 1e-9,
    grid: Iterable[float] = (),
    differentiator: Optional[StieltjesDifferentiator] = None,
    measure: Optional[StieltjesMeasure] = None,
) -> SecondOrderDecomposition:
    """
    二阶加法分解：对 f'_g 做一阶分解 f'_g = k + σ，
    再取 h = f(a) + ∫k，ρ₂ = ∫σ，ρ₁ = f − h − ρ₂
    """
    diff = differentiator or StieltjesDifferentiator(g)
    measure = measure or StieltjesMeasure(g)
    grid = list(grid)
    first = additive_decompose(f, g, tol, grid, diff, measure)
    derivative = _require_derivative(f, diff, grid)
    inner = additive_decompose(derivative, g, tol, grid, diff, measure)
    h = measure.indefinite(inner.h).shift(f.eval(g.a))
    h.label = f"h₂[{f.label}]"
    rho2 = measure.indefinite(inner.rho)
    rho2.label = f"ρ₂[{f.label}]"
    return SecondOrderDecomposition(h, first.rho, rho2, (first.kernel_report, inner.kernel_report))


@dataclass(frozen=True)
class MultiplicativeDecomposition:
    """f = ρ·u，u'_g = (f'_g/f*)·u，u(a) = 1"""

    rho: PiecewiseMap
    u: PiecewiseMap
    kernel_report: KernelReport

    @property
    def verified(self) -> bool:
        return self.kernel_report.is_member


def multiplicative_decompose(
    f: PiecewiseMap,
    g: Derivator,
    tol: float = 1e-9,
    grid: Iterable[float] = (),
    differentiator: Optional[StieltjesDifferentiator] = None,
    measure: Optional[StieltjesMeasure] = None,
) -> MultiplicativeDecomposition:
    """
    u = exp_g(f'_g/f*;·)，ρ = f/u

    Raises:
        ZeroDenominator: f* 在某处为零
        RegressivityViolation: f'_g/f* 不是 g-正则的
    """
    from .gexp_ode import exponential_map

    diff = differentiator or StieltjesDifferentiator(g)
    measure = measure or StieltjesMeasure(g)
    grid = list(grid)
    derivative = _require_derivative(f, diff, grid)
    p = derivative.divide(f.star_map(g))
    u = exponential_map(p, g, measure, label=f"u[{f.label}]")
    rho = f.divide(u)
    rho.label = f"ρ[{f.label}]"
    report = is_kernel_member(rho, g, grid, tol, diff)
    if not report.is_member:
        logger.warning("乘法分解的 ρ 未通过核检查: 最大导数 %.3e", report.max_abs_derivative)
    return MultiplicativeDecomposition(rho, u, report)


@dataclass(frozen=True)
class AEZeroReport:
    """f = 0 μ_g-a.e. ⇒ f ≡ 0 的检查"""

    applicable: bool
    holds: bool
    max_abs: float
    note: str = ""

    def to_dict(self) -> Dict:
        return {"applicable": self.applicable, "holds": self.holds, "max_abs": self.max_abs, "note": self.note}


def kernel_product_check(
    f1: PiecewiseMap,
    f2: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
) -> KernelReport:
    """两个核元素的乘积仍在核中：(f₁f₂)'_g = f₁*·(f₂)'_g + f₂·(f₁)'_g = 0"""
    product = f1.multiply(f2)
    product.label = f"{f1.label}·{f2.label}"
    return is_kernel_member(product, g, grid, tol)


def ae_zero_forces_zero_check(
    f: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
    continuity: Optional[ContinuityConfig] = None,
) -> AEZeroReport:
    """
    对 BD_g 中的 f：若 f 在全部原子上和 C_g 之外的采样点上为零，则在整个网格上为零

    f 不在 BD_g 中或前提不成立时空真返回。
    """
    grid = list(grid)
    pts = np.array(kernel_check_points(f, g, grid))
    if not bd_membership(f, g, grid=grid, continuity=continuity).verdict:
        return AEZeroReport(False, True, float(np.max(np.abs(f.values(pts)))), "NotInBD")
    support = np.array([t for t in pts if g.component_containing(t) is None])
    atoms = np.array(g.jump_points)
    premise = np.all(np.abs(f.values(support)) <= tol) and (atoms.size == 0 or np.all(np.abs(f.values(atoms)) <= tol))
    max_abs = float(np.max(np.abs(f.values(pts))))
    if not premise:
        return AEZeroReport(False, True, max_abs, "PremiseFalse")
    return AEZeroReport(True, max_abs <= tol, max_abs)


@dataclass(frozen=True)
class GContinuousKernelReport:
    is_kernel: bool
    is_g_continuous: bool
    is_constant: bool

    @property
    def holds(self) -> bool:
        return not (self.is_kernel and self.is_g_continuous) or self.is_constant


def kernel_gcontinuous_constancy_check(
    f: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
    continuity: Optional[ContinuityConfig] = None,
    continuity_tol: float = 1e-9,
) -> GContinuousKernelReport:
    """g-连续的核元素必为常数"""
    grid = list(grid)
    pts = kernel_check_points(f, g, grid)
    kernel = is_kernel_member(f, g, grid, tol).is_member
    continuous = all(is_g_continuous_at(f, g, t, continuity_tol, continuity=continuity) for t in pts)
    values = f.values(np.array(pts))
    constant = float(np.max(values) - np.min(values)) <= tol
    return GContinuousKernelReport(kernel, continuous, constant)


@dataclass(frozen=True)
class WitnessReport:
    """a.e. 导数为零但导数不恒为零的见证"""

    envelope_holds: bool
    derivative_at_zero: Optional[float]
    derivative_bound: Optional[float]
    ae_zero: bool
    is_kernel_member: bool
    worst_gap: float
    samples: int

    def to_dict(self) -> Dict:
        return asdict(self)


def ae_zero_witness_check(
    f: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
) -> WitnessReport:
    """
    见证函数在 0 处的导数用包络认证：
    |Q(t) − 1| ≤ |t|/(1−|t|) + (S(t) + tail)/|t|，
    S(t) 为 0 与 t 之间的跳跃质量，tail 为截断余量

    0 处的导数取包络最紧的采样点上的差商 Q(t)，误差不超过该点的包络。
    其余点上导数为零；0 处导数不为零时它不是核元素。
    """
    diff = StieltjesDifferentiator(g)
    tail = g.tail_mass_bound()
    jumps = np.array(g.jump_points)
    candidates = {float(t) for t in jumps} | {0.5 * (s + t) for s, t in zip(jumps[:-1], jumps[1:]) if s * t > 0}
    samples = sorted(t for t in candidates if 0.0 < abs(t) <= 0.5)
    f0, g0 = f.eval(0.0), g.eval(0.0)
    worst_gap = -np.inf
    derivative: Optional[float] = None
    bound: Optional[float] = None
    for t in samples:
        lo, hi = min(t, 0.0), max(t, 0.0)
        between = jumps[(jumps >= lo) & (jumps < hi)]
        mass = float(sum(g.jumps[float(s)] for s in between))
        quotient = (f.eval(t) - f0) / (g.eval(t) - g0)
        envelope = abs(t) / (1.0 - abs(t)) + (mass + tail) / abs(t)
        worst_gap = max(worst_gap, abs(quotient - 1.0) - envelope)
        if bound is None or envelope < bound:
            derivative, bound = float(quotient), float(envelope)
    envelope_holds = bool(samples) and worst_gap <= tol
    off_zero = [t for t in kernel_check_points(f, g, grid) if t != 0.0]
    ae_zero = True
    for t in off_zero:
        rep = diff.g_derivative(f, t)
        if not rep.ok or abs(rep.value) > tol:
            ae_zero = False
            break
    # 0 处导数可与零区分时才排除核成员
    nonzero = derivative is not None and abs(derivative) > bound + tol
    member = ae_zero and not nonzero
    return WitnessReport(envelope_holds, derivative, bound, ae_zero, member, float(worst_gap), len(samples))
