"""
Lebesgue–Stieltjes 测度模块
μ_g、g-区间上的积分、不定积分与微积分基本定理检查
"""

import logging
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .derivator import Derivator
from .piecewise import PiecewiseMap
from .segments import (
    AffineForm,
    ConstantForm,
    PolynomialForm,
    QuadratureForm,
    SegmentForm,
    add_forms,
    mul_forms,
)
from ..utils.exceptions import IntegrationFailure, OutOfDomain, UnboundedIntegrand

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GInterval:
    """左闭右开区间 [lo, hi)"""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"区间端点顺序错误: [{self.lo}, {self.hi})")


@dataclass(frozen=True)
class IntegralResult:
    """积分值与误差估计"""

    value: float
    abserr: float = 0.0

    def to_dict(self):
        return {"value": self.value, "abserr": self.abserr}


@dataclass(frozen=True)
class FTCReport:
    """微积分基本定理往返检查结果"""

    passed: bool
    max_error: float
    worst_point: Optional[float]


class StieltjesMeasure:
    """与导子 g 相关的 Lebesgue–Stieltjes 测度"""

    def __init__(self, g: Derivator, quad_tol: float = 1e-10, riemann_cells: int = 4096):
        """
        初始化测度

        Args:
            g: 导子
            quad_tol: 自适应求积容差
            riemann_cells: 无闭式导数的段上 Riemann–Stieltjes 和的单元数
        """
        self.g = g
        self.quad_tol = quad_tol
        self.riemann_cells = riemann_cells

    def _check(self, lo: float, hi: float) -> None:
        if lo > hi or lo < self.g.a or hi > self.g.b:
            raise OutOfDomain(f"[{lo}, {hi}) 不在 [{self.g.a}, {self.g.b}] 内", {"lo": lo, "hi": hi})

    def mu(self, interval: GInterval) -> float:
        """μ_g([c,d)) = g(d) − g(c)"""
        self._check(interval.lo, interval.hi)
        if interval.lo == interval.hi:
            return 0.0
        return self.g.eval(interval.hi) - self.g.eval(interval.lo)

    def atom(self, t: float) -> float:
        """μ_g({t}) = Δg(t)"""
        return self.g.delta(t)

    def _pieces(self, f: PiecewiseMap, lo: float, hi: float) -> List[float]:
        pts = {lo, hi}
        pts.update(t for t in self.g.breakpoints if lo < t < hi)
        pts.update(t for t in f.breakpoints if lo < t < hi)
        return sorted(pts)

    def _continuous_piece(self, f_form: SegmentForm, g_form: SegmentForm, u: float, v: float) -> Tuple[float, float]:
        """(u,v) 上 ∫ f dg 的连续部分"""
        if g_form.is_constant or u == v:
            return 0.0, 0.0
        density = g_form.derivative()
        if density is None:
            return self._riemann_stieltjes(f_form, g_form, u, v)
        if isinstance(f_form, PolynomialForm) and isinstance(density, PolynomialForm):
            anti = mul_forms(f_form, density).antiderivative()
            return anti(v) - anti(u), 0.0
        integrand = mul_forms(f_form, density)
        sample = integrand(np.linspace(u, v, 9))
        if not np.all(np.isfinite(sample)):
            raise UnboundedIntegrand(f"被积函数在 ({u}, {v}) 上无界", {"lo": u, "hi": v})
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, err = integrate.quad(integrand, u, v, epsabs=self.quad_tol, epsrel=self.quad_tol, limit=200)
            except integrate.IntegrationWarning as e:
                logger.warning("区间 (%s, %s) 上求积未达到容差: %s", u, v, e)
                value, err = integrate.quad(integrand, u, v, epsabs=self.quad_tol, epsrel=self.quad_tol, limit=500)
            except Exception as e:
                raise IntegrationFailure(f"数值积分失败: {str(e)}", {"lo": u, "hi": v})
        if not np.isfinite(value):
            raise UnboundedIntegrand(f"积分在 ({u}, {v}) 上发散", {"lo": u, "hi": v})
        return value, err

    def _riemann_stieltjes(self, f_form: SegmentForm, g_form: SegmentForm, u: float, v: float) -> Tuple[float, float]:
        def rs(cells: int) -> float:
            xs = np.linspace(u, v, cells + 1)
            mids = 0.5 * (xs[:-1] + xs[1:])
            return float(np.sum(f_form(mids) * np.diff(g_form(xs))))

        fine = rs(self.riemann_cells)
        coarse = rs(self.riemann_cells // 2)
        if not np.isfinite(fine):
            raise UnboundedIntegrand(f"被积函数在 ({u}, {v}) 上无界", {"lo": u, "hi": v})
        return fine, abs(fine - coarse)

    def walk(self, f: PiecewiseMap, lo: float, hi: float, skip_jumps: bool):
        """依次产出 (左端点, 原子贡献, 连续贡献, 误差)"""
        pts = self._pieces(f, lo, hi)
        for u, v in zip(pts[:-1], pts[1:]):
            atom = 0.0
            if not skip_jumps and u in self.g.jumps:
                fu = f.eval(u)
                if not np.isfinite(fu):
                    raise UnboundedIntegrand(f"f({u}) 不有限", {"t": u})
                atom = fu * self.g.jumps[u]
            mid = 0.5 * (u + v)
            value, err = self._continuous_piece(f.form_at(mid), self.g.segment_at(mid)[2], u, v)
            yield u, v, atom, value, err

    def integrate(self, f: PiecewiseMap, interval: GInterval, skip_jumps: bool = False) -> IntegralResult:
        """
        ∫_{[lo,hi)} f dμ_g

        Args:
            f: 被积函数
            interval: 积分区间
            skip_jumps: 为 True 时去掉跳跃点上的原子

        Returns:
            积分值与误差估计
        """
        self._check(interval.lo, interval.hi)
        total, abserr = 0.0, 0.0
        for _, _, atom, value, err in self.walk(f, interval.lo, interval.hi, skip_jumps):
            total = total + atom
            total = total + value
            abserr += err
        return IntegralResult(total, abserr)

    def integrate_minus_jumps(self, f: PiecewiseMap, interval: GInterval) -> IntegralResult:
        """∫_{[lo,hi)∖D_g} f dμ_g"""
        return self.integrate(f, interval, skip_jumps=True)

    def l1_norm(self, f: PiecewiseMap, interval: GInterval) -> float:
        """∫_{[lo,hi)} |f| dμ_g"""
        return self.integrate(f.compose(np.abs, np.sign, "abs"), interval).value

    def indefinite(self, f: PiecewiseMap) -> PiecewiseMap:
        """
        H(x) = ∫_{[a,x)} f dμ_g

        H(a)=0，左连续，在 t∈D_g 处跳跃 f(t)Δg(t)；断点处的值与 integrate 逐项一致。

        Args:
            f: 被积函数

        Returns:
            不定积分 H
        """
        g = self.g
        bps: List[float] = [g.a]
        forms: List[SegmentForm] = []
        points = {}
        running = 0.0
        for u, v, atom, value, _ in self.walk(f, g.a, g.b, False):
            base = running + atom
            forms.append(self.primitive_form(f.form_at(0.5 * (u + v)), g.segment_at(0.5 * (u + v))[2], u, base))
            points[u] = running
            running = base + value
            bps.append(v)
            points[v] = running
        return PiecewiseMap(g.domain, bps, forms, points, label=f"∫{f.label}dg")

    def primitive_form(self, f_form: SegmentForm, g_form: SegmentForm, u: float, base: float) -> SegmentForm:
        """段上 t ↦ base + ∫_u^t f dg 的表达式"""
        if g_form.is_constant:
            return ConstantForm(base)
        density = g_form.derivative()
        if density is not None:
            anti = mul_forms(f_form, density).antiderivative()
            if anti is not None:
                offset = base - anti(u)
                if isinstance(anti, AffineForm):
                    if anti.slope == 0.0:
                        return ConstantForm(base)
                    return AffineForm(anti.slope, anchor=(u, base))
                return add_forms(anti, ConstantForm(offset))
            return QuadratureForm(mul_forms(f_form, density), u, base, self.quad_tol)
        return _RiemannStieltjesPrimitive(f_form, g_form, u, base, self.riemann_cells)

    def ftc_roundtrip_check(self, F: PiecewiseMap, tol: float, grid: Sequence[float], differentiator=None) -> FTCReport:
        """
        检查 F(x) − F(a) = ∫_{[a,x)} F'_g dμ_g

        Args:
            F: 待检查函数
            tol: 容差
            grid: 检查网格
            differentiator: StieltjesDifferentiator，缺省时按默认参数构造

        Returns:
            检查结果
        """
        from .gdiff import StieltjesDifferentiator

        diff = differentiator or StieltjesDifferentiator(self.g)
        derivative = diff.g_derivative_fn(F, grid)
        H = self.indefinite(derivative)
        pts = np.array(sorted(set(float(x) for x in grid) | set(F.breakpoints)))
        errors = np.abs(F.values(pts) - F.eval(self.g.a) - H.values(pts))
        worst = int(np.argmax(errors))
        max_error = float(errors[worst])
        passed = max_error <= tol
        if not passed:
            logger.info("FTC 往返检查失败: %s 在 %s 处误差 %.3e", F.label, pts[worst], max_error)
        return FTCReport(passed, max_error, float(pts[worst]))


class _RiemannStieltjesPrimitive(SegmentForm):
    """g 段无闭式导数时的原函数：base + Σ f(mid)·Δg"""

    kind = "riemann_stieltjes"

    def __init__(self, f_form: SegmentForm, g_form: SegmentForm, anchor: float, base: float, cells: int):
        self.f_form, self.g_form, self.anchor, self.base, self.cells = f_form, g_form, anchor, base, cells

    def _eval(self, t):
        def one(s: float) -> float:
            if s == self.anchor:
                return self.base
            xs = np.linspace(self.anchor, s, self.cells + 1)
            mids = 0.5 * (xs[:-1] + xs[1:])
            return self.base + float(np.sum(self.f_form(mids) * np.diff(self.g_form(xs))))

        return np.vectorize(one, otypes=[float])(t)
