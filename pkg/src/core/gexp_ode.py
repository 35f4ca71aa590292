"""
g-指数与一阶线性 Stieltjes 微分方程
v'_g = βv + f，包括由核元素给出的非唯一 BD¹ 解
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

import numpy as np

from .derivator import Derivator, PointClass
from .gdiff import StieltjesDifferentiator
from .measure import GInterval, StieltjesMeasure
from .piecewise import PiecewiseMap
from .segments import exp_of_form
from ..utils.exceptions import (
    DerivativeMissing,
    DomainMismatch,
    InitialValueMismatch,
    KernelViolation,
    RegressivityViolation,
    ResidualTooLarge,
)

logger = logging.getLogger(__name__)


def check_regressive(p: PiecewiseMap, g: Derivator) -> None:
    """
    检查 1 + p(t)Δg(t) ≠ 0 对所有 t ∈ D_g 成立

    Raises:
        RegressivityViolation: 存在使因子为零的跳跃点
    """
    bad = [t for t in g.jump_points if 1.0 + p.eval(t) * g.jumps[t] == 0.0]
    if bad:
        raise RegressivityViolation(f"{p.label} 在跳跃点 {bad} 处不是 g-正则的", {"points": bad})


@dataclass(frozen=True)
class LinearProblem:
    """v'_g(t) = β(t)v(t) + f(t)，v(a) = v0"""

    g: Derivator
    beta: PiecewiseMap
    v0: float = 1.0
    forcing: Optional[PiecewiseMap] = None

    def __post_init__(self):
        for fn in (self.beta, self.forcing):
            if fn is not None and fn.domain != self.g.domain:
                raise DomainMismatch(f"{fn.label} 的定义域 {fn.domain} 与 g 的 {self.g.domain} 不一致")
        check_regressive(self.beta, self.g)

    @property
    def is_homogeneous(self) -> bool:
        return self.forcing is None

    def forcing_or_zero(self) -> PiecewiseMap:
        if self.forcing is None:
            return PiecewiseMap.constant(self.g.domain, 0.0, label="0")
        return self.forcing


def g_exponential(p: PiecewiseMap, g: Derivator, t: float, measure: Optional[StieltjesMeasure] = None) -> float:
    """
    exp_g(p; t) = ∏_{s∈[a,t)∩D_g}(1+p(s)Δg(s)) · exp(∫_{[a,t)∖D_g} p dμ_g)

    实数域上直接取带符号的乘积。

    Args:
        p: 系数
        g: 导子
        t: 点

    Returns:
        g-指数在 t 处的值
    """
    check_regressive(p, g)
    measure = measure or StieltjesMeasure(g)
    product = 1.0
    for s in g.jump_points:
        if s >= t:
            break
        product *= 1.0 + p.eval(s) * g.jumps[s]
    exponent = measure.integrate_minus_jumps(p, GInterval(g.a, t)).value
    return product * math.exp(exponent)


def exponential_map(p: PiecewiseMap, g: Derivator, measure: Optional[StieltjesMeasure] = None, label: str = "exp_g") -> PiecewiseMap:
    """
    exp_g(p; ·) 的分段表示

    每段上为 P·exp(I(u) + ∫_u^t p dg)，P 为已经过的跳跃因子之积；
    跳跃点处点值取左值，右极限为 (1+pΔg)·左值。

    Args:
        p: g-正则系数
        g: 导子
        measure: 积分所用测度
        label: 名称

    Returns:
        g-指数函数
    """
    check_regressive(p, g)
    measure = measure or StieltjesMeasure(g)
    bps: List[float] = [g.a]
    forms = []
    points: Dict[float, float] = {}
    rights: Dict[float, float] = {}
    product, exponent = 1.0, 0.0
    for u, v, _, value, _ in measure.walk(p, g.a, g.b, skip_jumps=True):
        left_value = product * math.exp(exponent)
        points[u] = left_value
        if u in g.jumps:
            factor = 1.0 + p.eval(u) * g.jumps[u]
            product *= factor
            rights[u] = factor * left_value
        mid = 0.5 * (u + v)
        inner = measure.primitive_form(p.form_at(mid), g.segment_at(mid)[2], u, exponent)
        forms.append(exp_of_form(inner, product))
        exponent = exponent + value
        bps.append(v)
    points[g.b] = product * math.exp(exponent)
    return PiecewiseMap(g.domain, bps, forms, points, rights, label=label)


def solve_homogeneous_ac(problem: LinearProblem, measure: Optional[StieltjesMeasure] = None) -> PiecewiseMap:
    """
    齐次问题唯一的 g-绝对连续解 v = v0·exp_g(β;·)

    Raises:
        ValueError: 问题带有外力项
    """
    if not problem.is_homogeneous:
        raise ValueError("solve_homogeneous_ac 只处理齐次问题，带外力项请用 solve_forced")
    v = exponential_map(problem.beta, problem.g, measure).scale(problem.v0)
    v.label = "v"
    return v


def nonunique_solutions(
    problem: LinearProblem,
    h: PiecewiseMap,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
    measure: Optional[StieltjesMeasure] = None,
) -> PiecewiseMap:
    """
    由核元素 h（h(a)=1）给出的另一个 BD¹ 解 ṽ = h·v

    Args:
        problem: 齐次问题
        h: 核元素
        grid: 核检查网格
        tol: 核检查容差

    Returns:
        ṽ

    Raises:
        InitialValueMismatch: h(a) ≠ 1
        KernelViolation: h 不在核中
    """
    from .kernel_space import is_kernel_member

    h_map = getattr(h, "map", h)
    if h_map.eval(problem.g.a) != 1.0:
        raise InitialValueMismatch(f"要求 h(a)=1，实际为 {h_map.eval(problem.g.a)}", {"h_a": h_map.eval(problem.g.a)})
    report = is_kernel_member(h_map, problem.g, grid, tol)
    if not report.is_member:
        raise KernelViolation(f"{h_map.label} 不在 ker ∂_g 中", report.to_dict())
    v = solve_homogeneous_ac(problem, measure)
    out = h_map.multiply(v)
    out.label = "ṽ"
    return out


@dataclass(frozen=True)
class ResidualReport:
    """max |v'_g − βv − f| 及其位置"""

    max_residual: float
    worst_point: Optional[float]
    points_checked: int

    def to_dict(self) -> Dict:
        return {
            "max_residual": self.max_residual,
            "worst_point": self.worst_point,
            "points_checked": self.points_checked,
        }


def residual_check(
    v: PiecewiseMap,
    problem: LinearProblem,
    grid: Iterable[float] = (),
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> ResidualReport:
    """
    在网格（及全部断点）去掉 C_g 后计算方程残差

    Raises:
        DerivativeMissing: v 在某个检查点不可 g-求导
    """
    g = problem.g
    diff = differentiator or StieltjesDifferentiator(g)
    forcing = problem.forcing_or_zero()
    pts = {float(x) for x in grid if g.a <= x <= g.b}
    pts.update(g.breakpoints)
    pts.update(v.breakpoints)
    worst, worst_point, count = 0.0, None, 0
    for t in sorted(pts):
        if g.classify(t).kind == PointClass.CONSTANCY_INTERIOR:
            continue
        rep = diff.g_derivative(v, t)
        if not rep.ok:
            raise DerivativeMissing(f"{v.label} 在 {t} 处不可 g-求导", rep.to_dict())
        residual = abs(rep.value - problem.beta.eval(t) * v.eval(t) - forcing.eval(t))
        count += 1
        if residual > worst or worst_point is None:
            worst, worst_point = residual, t
    return ResidualReport(float(worst), worst_point, count)


def solve_forced(
    problem: LinearProblem,
    tol: float = 1e-8,
    grid: Iterable[float] = (),
    measure: Optional[StieltjesMeasure] = None,
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> PiecewiseMap:
    """
    常数变易法：v = e·(v0 + ∫_{[a,t)} q dμ_g)，e = exp_g(β;·)

    q 在连续部分为 f/e，在跳跃点为 f/(e·(1+βΔg))。候选解须通过残差检查。

    Args:
        problem: 线性问题
        tol: 残差容差
        grid: 残差检查网格

    Returns:
        解 v

    Raises:
        ResidualTooLarge: 候选解的残差超过 tol
    """
    g = problem.g
    measure = measure or StieltjesMeasure(g)
    e = exponential_map(problem.beta, g, measure)
    forcing = problem.forcing_or_zero()
    ratio = forcing.divide(e)
    points = ratio.point_values
    for t in g.jump_points:
        points[t] = forcing.eval(t) / (e.eval(t) * (1.0 + problem.beta.eval(t) * g.jumps[t]))
    q = PiecewiseMap(g.domain, ratio.breakpoints, ratio.segments, points, ratio.right_limit_overrides, label="q")
    v = e.multiply(measure.indefinite(q).shift(problem.v0))
    v.label = "v"
    grid = list(grid)
    report = residual_check(v, problem, grid, differentiator)
    scale = max(1.0, float(np.max(np.abs(v.values(np.array(v.breakpoints))))))
    if report.max_residual > tol * scale:
        raise ResidualTooLarge(
            f"候选解残差 {report.max_residual:.3e} 超过容差 {tol:g}",
            report.to_dict(),
        )
    logger.debug("solve_forced 残差 %.3e（%d 个点）", report.max_residual, report.points_checked)
    return v
