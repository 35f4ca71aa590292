"""
Stieltjes 求导模块
按点的分类计算 f'_g：跳跃点取代数商，常值分量内部转到 b_n，
其余点用单侧差商的极限（闭式优先，否则 Richardson 外推）
"""

import bisect
import logging
import math
import weakref
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .derivator import Derivator, PointClass
from .piecewise import PiecewiseMap
from .segments import ConstantForm, SampledForm, SegmentForm, div_forms
from ..utils.config import DerivativeConfig
from ..utils.exceptions import CaseUndetermined, DenominatorVanishes, DerivativeMissing

logger = logging.getLogger(__name__)

# 外推表的最大列数
MAX_TABLEAU_COLUMNS = 8


class DerivativeMode(str, Enum):
    TWO_SIDED = "TwoSided"
    RIGHT_AT_JUMP = "RightAtJump"
    RIGHT_AT_BN = "RightAtBn"


class FailureKind(str, Enum):
    LEFT_RIGHT_MISMATCH = "LeftRightMismatch"
    DIVERGES = "Diverges"
    UNDEFINED = "Undefined"


@dataclass(frozen=True)
class DerivativeFailure:
    kind: FailureKind
    left: Optional[float] = None
    right: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True)
class GDerivReport:
    """f'_g(t) 的值或结构化失败"""

    point: float
    mode: DerivativeMode
    classification: PointClass
    value: Optional[float] = None
    failure: Optional[DerivativeFailure] = None
    error_estimate: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_dict(self) -> Dict:
        out = {
            "t": self.point,
            "class": self.classification.value,
            "mode": self.mode.value,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "failure": None,
        }
        if self.failure is not None:
            out["failure"] = {
                "kind": self.failure.kind.value,
                "left": self.failure.left,
                "right": self.failure.right,
                "detail": self.failure.detail,
            }
        return out


@dataclass(frozen=True)
class _OneSided:
    status: str
    value: Optional[float] = None
    error: float = 0.0


@dataclass(frozen=True)
class ChainRuleCheck:
    """链式法则检查：情形、公式值、数值值"""

    case: int
    predicted: float
    observed: float
    passed: bool


def _scalar(fn: Callable, y: float) -> float:
    return float(np.asarray(fn(np.asarray(y, dtype=float))))


class StieltjesDifferentiator:
    """相对于导子 g 的 Stieltjes 求导器"""

    def __init__(self, g: Derivator, config: Optional[DerivativeConfig] = None, tol: float = 1e-8):
        """
        初始化求导器

        Args:
            g: 导子
            config: 极限估计参数
            tol: 稳定判据容差
        """
        self.g = g
        self.config = config or DerivativeConfig()
        self.tol = tol
        self._merged = weakref.WeakKeyDictionary()

    def numeric(self) -> "StieltjesDifferentiator":
        """关闭闭式快速路径的副本，用作差商基准"""
        return StieltjesDifferentiator(self.g, replace(self.config, closed_form=False), self.tol)

    # ---- 单点 ----

    def g_derivative(self, f: PiecewiseMap, t: float) -> GDerivReport:
        """
        计算 f'_g(t)

        Args:
            f: 函数
            t: 点

        Returns:
            导数报告
        """
        g = self.g
        cls = g.classify(t)
        if cls.kind == PointClass.JUMP:
            value = (f.right_limit(t) - f.eval(t)) / cls.delta_g
            return GDerivReport(cls.point, DerivativeMode.RIGHT_AT_JUMP, cls.kind, value)
        if cls.kind == PointClass.CONSTANCY_INTERIOR:
            inner = self.g_derivative(f, cls.t_star)
            return replace(inner, point=cls.point, mode=DerivativeMode.RIGHT_AT_BN, classification=cls.kind)
        if cls.kind == PointClass.NG_MINUS:
            sides: Tuple[str, ...] = ("left",)
        elif cls.kind == PointClass.NG_PLUS:
            sides = ("right",)
        elif cls.point == g.a:
            sides = ("right",)
        elif cls.point == g.b:
            sides = ("left",)
        else:
            sides = ("left", "right")
        estimates = {side: self._one_sided(f, cls.point, side) for side in sides}
        return self._combine(cls.point, cls.kind, estimates)

    def _combine(self, t: float, kind: PointClass, estimates: Dict[str, _OneSided]) -> GDerivReport:
        left, right = estimates.get("left"), estimates.get("right")
        values = {s: e.value for s, e in estimates.items() if e.status == "ok"}
        report = lambda **kw: GDerivReport(t, DerivativeMode.TWO_SIDED, kind, **kw)
        if any(e.status == "diverges" for e in estimates.values()):
            return report(failure=DerivativeFailure(FailureKind.DIVERGES, values.get("left"), values.get("right")))
        if any(e.status == "undefined" for e in estimates.values()):
            return report(
                failure=DerivativeFailure(FailureKind.UNDEFINED, values.get("left"), values.get("right"), "差商未稳定")
            )
        if not values:
            return report(failure=DerivativeFailure(FailureKind.UNDEFINED, detail="两侧都没有可用的差商"))
        if len(values) == 2:
            lv, rv = values["left"], values["right"]
            scale = max(1.0, abs(lv), abs(rv))
            if abs(lv - rv) > self.config.mismatch_factor * self.tol * scale:
                return report(failure=DerivativeFailure(FailureKind.LEFT_RIGHT_MISMATCH, lv, rv))
            value = lv if lv == rv else 0.5 * (lv + rv)
            return report(value=value, error_estimate=max(left.error, right.error, abs(lv - rv)))
        (side, value), = values.items()
        return report(value=value, error_estimate=estimates[side].error)

    def _neighbor_width(self, f: PiecewiseMap, t: float, side: str) -> float:
        bps = self._merged.get(f)
        if bps is None:
            bps = self._merged[f] = sorted(set(f.breakpoints) | set(self.g.breakpoints))
        if side == "right":
            i = bisect.bisect_right(bps, t)
            return bps[i] - t if i < len(bps) else 0.0
        i = bisect.bisect_left(bps, t) - 1
        return t - bps[i] if i >= 0 else 0.0

    def _one_sided(self, f: PiecewiseMap, t: float, side: str) -> _OneSided:
        width = self._neighbor_width(f, t, side)
        if width <= 0.0:
            return _OneSided("empty")
        g_form = self.g.segment_at(t, side)[2]
        if g_form.is_constant:
            return _OneSided("empty")
        f_form = f.form_at(t, side)
        ft = f.eval(t)
        if abs(f_form(t) - ft) > 1e-12 * (1.0 + abs(ft)):
            return _OneSided("diverges")
        if self.config.closed_form:
            fd, gd = f_form.derivative(), g_form.derivative()
            if fd is not None and gd is not None:
                gdt, fdt = gd(t), fd(t)
                if gdt > 0.0 and math.isfinite(fdt) and math.isfinite(gdt):
                    return _OneSided("ok", fdt / gdt)
        return self._extrapolate(f, t, side, width)

    def _extrapolate(self, f: PiecewiseMap, t: float, side: str, width: float) -> _OneSided:
        """几何收缩的单侧差商 + Richardson 外推，三个相邻估计在 tol 内即收敛"""
        g = self.g
        sign = 1.0 if side == "right" else -1.0
        h0 = min(width, self.config.max_h0)
        hs = h0 * 2.0 ** -np.arange(self.config.max_halvings + 1)
        hs = hs[hs > 1e-13 * max(1.0, abs(t))]
        pts = t + sign * hs
        pts = pts[(pts != t) & (pts >= g.a) & (pts <= g.b)]
        if pts.size == 0:
            return _OneSided("empty")
        gt, ft = g.eval(t), f.eval(t)
        dg = g.values(pts) - gt
        valid = dg != 0.0
        if not np.any(valid):
            return _OneSided("empty")
        quotients = (f.values(pts[valid]) - ft) / dg[valid]
        if not np.all(np.isfinite(quotients)):
            return _OneSided("diverges")
        need = self.config.stabilization
        estimates: List[float] = []
        previous: List[float] = []
        for k, q in enumerate(quotients):
            row = [float(q)]
            best, best_err = row[0], math.inf
            for j in range(1, min(k, MAX_TABLEAU_COLUMNS) + 1):
                factor = 2.0**j
                row.append((factor * row[j - 1] - previous[j - 1]) / (factor - 1.0))
                err = max(abs(row[j] - row[j - 1]), abs(row[j] - previous[j - 1]))
                if err < best_err:
                    best, best_err = row[j], err
            estimates.append(best)
            previous = row
            for series in (estimates, list(quotients[: k + 1])):
                tail = series[-need:]
                if len(tail) == need and max(tail) - min(tail) <= self.tol * max(1.0, abs(tail[-1])):
                    return _OneSided("ok", float(tail[-1]), float(max(tail) - min(tail)))
        magnitudes = np.abs(quotients)
        if magnitudes.size >= 2 and magnitudes[-1] > 1e6 * max(1.0, magnitudes[0]) and magnitudes[-1] > magnitudes[-2]:
            return _OneSided("diverges")
        logger.debug("t=%s 的%s侧差商未稳定", t, side)
        return _OneSided("undefined", float(estimates[-1]))

    # ---- 导函数 ----

    def g_derivative_fn(self, f: PiecewiseMap, grid: Iterable[float] = ()) -> PiecewiseMap:
        """
        导函数 f'_g 的分段表示

        f、g 在段上都有闭式导数时取导数之商；否则在网格点上逐点求导再插值。
        常值分量上取 b_n 处的导数。

        Args:
            f: 函数
            grid: 数值段使用的采样网格

        Returns:
            f'_g

        Raises:
            DerivativeMissing: 存在导数不存在的点
        """
        g = self.g
        bps = sorted(set(g.breakpoints) | set(f.breakpoints))
        grid_pts = sorted(float(x) for x in grid if g.a <= x <= g.b)
        failures: List[Dict] = []
        forms: List[SegmentForm] = []

        def value_at(t: float) -> float:
            rep = self.g_derivative(f, t)
            if not rep.ok:
                failures.append(rep.to_dict())
                return math.nan
            return rep.value

        for lo, hi in zip(bps[:-1], bps[1:]):
            mid = 0.5 * (lo + hi)
            g_form = g.segment_at(mid)[2]
            if g_form.is_constant:
                forms.append(ConstantForm(value_at(mid)))
                continue
            closed = self._closed_quotient(f.form_at(mid), g_form, lo, hi)
            if closed is not None:
                forms.append(closed)
                continue
            lo_i, hi_i = bisect.bisect_right(grid_pts, lo), bisect.bisect_left(grid_pts, hi)
            xs = sorted(set(grid_pts[lo_i:hi_i]) | {lo + 0.25 * (hi - lo), mid, lo + 0.75 * (hi - lo)})
            forms.append(SampledForm(xs, [value_at(x) for x in xs]))
        points = {t: value_at(t) for t in bps}
        if failures:
            raise DerivativeMissing(
                f"{f.label} 在 {len(failures)} 个点上不可 g-求导",
                {"failures": failures[:20], "count": len(failures)},
            )
        return PiecewiseMap(g.domain, bps, forms, points, label=f"{f.label}'_g")

    def _closed_quotient(self, f_form: SegmentForm, g_form: SegmentForm, lo: float, hi: float) -> Optional[SegmentForm]:
        if not self.config.closed_form:
            return None
        fd, gd = f_form.derivative(), g_form.derivative()
        if fd is None or gd is None:
            return None
        slopes = gd(np.linspace(lo, hi, 33))
        if not np.all(slopes > 0.0):
            return None
        return div_forms(fd, gd)

    def nth_derivative(self, f: PiecewiseMap, n: int, grid: Iterable[float] = ()) -> PiecewiseMap:
        """重复求导，n ≤ 2"""
        if n not in (0, 1, 2):
            raise ValueError(f"只支持 0 到 2 阶导数: n={n}")
        grid = list(grid)
        out = f
        for _ in range(n):
            out = self.g_derivative_fn(out, grid)
        return out

    # ---- 运算法则 ----

    def _require(self, f: PiecewiseMap, t: float) -> float:
        rep = self.g_derivative(f, t)
        if not rep.ok:
            raise DerivativeMissing(f"{f.label} 在 {t} 处不可 g-求导", rep.to_dict())
        return rep.value

    def product_rule(self, f1: PiecewiseMap, f2: PiecewiseMap, t: float) -> float:
        """(f₁f₂)'_g = f₁'·f₂(t*) + f₂'·f₁(t*) + f₁'·f₂'·Δg(t*)"""
        d1, d2 = self._require(f1, t), self._require(f2, t)
        ts = self.g.t_star(t)
        jump = self.g.delta(ts)
        return d1 * f2.eval(ts) + d2 * f1.eval(ts) + d1 * d2 * jump

    def quotient_rule(self, f1: PiecewiseMap, f2: PiecewiseMap, t: float) -> float:
        """(f₁/f₂)'_g = (f₁'·f₂(t*) − f₂'·f₁(t*)) / (f₂(t*)·(f₂(t*) + f₂'·Δg(t*)))"""
        d1, d2 = self._require(f1, t), self._require(f2, t)
        ts = self.g.t_star(t)
        f2s = f2.eval(ts)
        denominator = f2s * (f2s + d2 * self.g.delta(ts))
        if denominator == 0.0:
            raise DenominatorVanishes(f"商法则分母在 {t} 处为零", {"t": t, "t_star": ts})
        return (d1 * f2s - d2 * f1.eval(ts)) / denominator

    def _jump_prediction(self, h: Callable, h_prime: Callable, f: PiecewiseMap, s: float, df: float) -> Tuple[int, float]:
        """跳跃点 s 处的情形 3/4 公式值"""
        fs, fr = f.eval(s), f.right_limit(s)
        right_form = f.form_at(s, "right")
        if fr == fs and right_form.is_constant:
            return 3, 0.0
        if fr == fs and right_form.derivative() is None:
            raise CaseUndetermined(f"无法判断 {f.label} 在 {s} 右侧是否局部常值", {"t": s})
        secant = _scalar(h_prime, fs) if fr == fs else (_scalar(h, fr) - _scalar(h, fs)) / (fr - fs)
        return 4, secant * df

    def chain_rule_check(
        self,
        h: Callable,
        h_prime: Callable,
        f: PiecewiseMap,
        t: float,
        tol: float = 1e-6,
    ) -> ChainRuleCheck:
        """
        按情形 1–4 检查 (h∘f)'_g 的公式值与数值差商一致

        常值区间内部的点按其右端点 t* 计算；t* 为跳跃点时沿用跳跃情形的割线。

        Args:
            h: 外层函数（作用在数组上）
            h_prime: h 的导数
            f: 内层函数
            t: 点
            tol: 相对容差

        Returns:
            检查结果

        Raises:
            CaseUndetermined: 跳跃点右侧无法从表示判断 f 是否局部常值
        """
        g = self.g
        cls = g.classify(t)
        df = self._require(f, t)
        if cls.kind == PointClass.JUMP:
            case, predicted = self._jump_prediction(h, h_prime, f, t, df)
        elif cls.kind == PointClass.CONSTANCY_INTERIOR:
            ts = cls.t_star
            if g.classify(ts).kind == PointClass.JUMP:
                _, predicted = self._jump_prediction(h, h_prime, f, ts, df)
            else:
                predicted = _scalar(h_prime, f.eval(ts)) * df
            case = 2
        else:
            case, predicted = 1, _scalar(h_prime, f.eval(t)) * df
        composed = f.compose(h, h_prime, "h")
        observed_rep = self.numeric().g_derivative(composed, t)
        if not observed_rep.ok:
            raise DerivativeMissing(f"h∘{f.label} 在 {t} 处不可 g-求导", observed_rep.to_dict())
        observed = observed_rep.value
        passed = abs(predicted - observed) <= tol * max(1.0, abs(observed))
        return ChainRuleCheck(case, predicted, observed, passed)


def g_derivative(f: PiecewiseMap, g: Derivator, t: float, tol: float = 1e-8) -> GDerivReport:
    return StieltjesDifferentiator(g, tol=tol).g_derivative(f, t)


def g_derivative_fn(f: PiecewiseMap, g: Derivator, grid: Iterable[float] = (), tol: float = 1e-8) -> PiecewiseMap:
    return StieltjesDifferentiator(g, tol=tol).g_derivative_fn(f, grid)
