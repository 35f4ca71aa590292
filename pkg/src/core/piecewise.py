"""
分段函数模块
候选函数 f 的分段表示：段表达式 + 断点处显式的点值与右极限，
以及逐点代数、f* 和 BD_g 成员检查
"""

import bisect
import logging
import math
from dataclasses import dataclass, asdict
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .derivator import Derivator, PointClass
from .segments import (
    ComposedForm,
    ConstantForm,
    CustomForm,
    SegmentForm,
    SegmentTable,
    add_forms,
    div_forms,
    expand_segments,
    mul_forms,
    scale_form,
)
from ..utils.config import ContinuityConfig
from ..utils.exceptions import DomainMismatch, OutOfDomain, SpecFormatError, ZeroDenominator

logger = logging.getLogger(__name__)

ValueOp = Callable[[float, float], float]


class PiecewiseMap:
    """
    [a,b] 上的分段函数

    第 i 段覆盖 [bp_i, bp_{i+1})，最后一段包含 b。断点处若没有显式点值，
    取右侧段的值；若没有显式右极限，取右侧段在该点的极限。
    """

    def __init__(
        self,
        domain: Tuple[float, float],
        breakpoints: Sequence[float],
        segments: Sequence[SegmentForm],
        point_values: Optional[Mapping[float, float]] = None,
        right_limits: Optional[Mapping[float, float]] = None,
        label: str = "f",
    ):
        a, b = float(domain[0]), float(domain[1])
        try:
            bps, forms = expand_segments([float(x) for x in breakpoints], list(segments))
        except ValueError as e:
            raise SpecFormatError(f"函数规格错误: {e}")
        if not a < b or bps[0] != a or bps[-1] != b:
            raise SpecFormatError(f"断点必须以 a={a} 开始、以 b={b} 结束")
        if any(lo >= hi for lo, hi in zip(bps[:-1], bps[1:])):
            raise SpecFormatError("断点必须严格递增")
        self.a, self.b = a, b
        self.label = label
        self._bps = tuple(bps)
        self._bp_array = np.array(bps)
        self._forms = tuple(forms)
        self._table = SegmentTable(forms)
        bp_set = set(bps)
        self._points = self._check_keys(point_values or {}, bp_set, "点值")
        self._rights = self._check_keys(right_limits or {}, bp_set - {b}, "右极限")
        self._point_keys = np.array(sorted(self._points))
        self._point_vals = np.array([self._points[k] for k in sorted(self._points)])

    @staticmethod
    def _check_keys(values: Mapping[float, float], allowed: set, what: str) -> Dict[float, float]:
        clean = {}
        for t, v in values.items():
            t, v = float(t), float(v)
            if t not in allowed:
                raise SpecFormatError(f"{what}的位置 {t} 不是允许的断点")
            clean[t] = v
        return clean

    # ---- 构造 ----

    @classmethod
    def constant(cls, domain: Tuple[float, float], c: float, label: str = "c") -> "PiecewiseMap":
        return cls(domain, [domain[0], domain[1]], [ConstantForm(c)], label=label)

    @classmethod
    def step(
        cls,
        domain: Tuple[float, float],
        breakpoints: Sequence[float],
        levels: Sequence[float],
        point_values: Optional[Mapping[float, float]] = None,
        label: str = "step",
    ) -> "PiecewiseMap":
        """阶梯函数，默认右连续"""
        return cls(domain, breakpoints, [ConstantForm(v) for v in levels], point_values, label=label)

    @classmethod
    def from_derivator(cls, g: Derivator) -> "PiecewiseMap":
        """把导子当作普通函数"""
        points = {t: g.eval(t) for t in g.jump_points}
        return cls(g.domain, g.breakpoints, g.segments, points, label=g.label)

    @classmethod
    def from_callable(
        cls,
        domain: Tuple[float, float],
        func: Callable,
        breakpoints: Optional[Sequence[float]] = None,
        derivative: Optional[Callable] = None,
        label: str = "f",
    ) -> "PiecewiseMap":
        """用户求值函数，在每段上使用同一个函数"""
        bps = list(breakpoints) if breakpoints is not None else [domain[0], domain[1]]
        form = CustomForm(func, label, derivative)
        return cls(domain, bps, [form] * (len(bps) - 1), label=label)

    # ---- 结构 ----

    @property
    def domain(self) -> Tuple[float, float]:
        return (self.a, self.b)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return self._bps

    @property
    def segments(self) -> Tuple[SegmentForm, ...]:
        return self._forms

    @property
    def point_values(self) -> Dict[float, float]:
        return dict(self._points)

    @property
    def right_limit_overrides(self) -> Dict[float, float]:
        return dict(self._rights)

    def segment_index(self, t: float, side: str = "right") -> int:
        if side == "right":
            i = bisect.bisect_right(self._bps, t) - 1
        else:
            i = bisect.bisect_left(self._bps, t) - 1
        return min(max(i, 0), len(self._forms) - 1)

    def form_at(self, t: float, side: str = "right") -> SegmentForm:
        """t 右侧（或左侧）开区间上的段表达式"""
        return self._forms[self.segment_index(t, side)]

    def form_on(self, lo: float, hi: float) -> SegmentForm:
        """包含开区间 (lo,hi) 的段表达式"""
        return self._forms[self.segment_index(0.5 * (lo + hi), "right")]

    # ---- 求值 ----

    def _check_domain(self, t: float) -> None:
        if not self.a <= t <= self.b:
            raise OutOfDomain(f"t={t} 不在 [{self.a}, {self.b}] 内", {"t": t})

    def eval(self, t: float) -> float:
        t = float(t)
        self._check_domain(t)
        if t in self._points:
            return self._points[t]
        return self._forms[self.segment_index(t)](t)

    def values(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < self.a or ts.max() > self.b):
            raise OutOfDomain(f"存在不在 [{self.a}, {self.b}] 内的点")
        idx = np.clip(np.searchsorted(self._bp_array, ts, side="right") - 1, 0, len(self._forms) - 1)
        out = self._table.evaluate(idx, ts)
        if self._point_keys.size:
            pos = np.clip(np.searchsorted(self._point_keys, ts), 0, self._point_keys.size - 1)
            hit = self._point_keys[pos] == ts
            out = np.where(hit, self._point_vals[pos], out)
        return out

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.eval(t)
        return self.values(t)

    def right_limit(self, t: float) -> float:
        """f(t⁺)"""
        t = float(t)
        self._check_domain(t)
        if t == self.b:
            raise OutOfDomain(f"右极限要求 t<b: t={t}", {"t": t})
        if t in self._rights:
            return self._rights[t]
        return self._forms[self.segment_index(t)](t)

    def left_limit(self, t: float) -> float:
        """f(t⁻)"""
        t = float(t)
        self._check_domain(t)
        if t == self.a:
            raise OutOfDomain(f"左极限要求 t>a: t={t}", {"t": t})
        return self._forms[self.segment_index(t, "left")](t)

    def default_value(self, t: float) -> float:
        """不考虑显式点值时 t 处的值"""
        return self._forms[self.segment_index(t)](t)

    def star_eval(self, g: Derivator, t: float) -> float:
        """f*(t) = f(t*)"""
        return self.eval(g.classify(t).t_star)

    def sup_norm(self, grid: Optional[Iterable[float]] = None) -> float:
        """网格 + 断点 + 两侧极限上的采样上确界范数"""
        pts = self._sample_points(grid)
        candidates = [np.abs(self.values(pts))]
        candidates.append(np.abs([self.right_limit(t) for t in self._bps[:-1]]))
        candidates.append(np.abs([self.left_limit(t) for t in self._bps[1:]]))
        return float(max(np.max(c) for c in candidates))

    def _sample_points(self, grid: Optional[Iterable[float]]) -> np.ndarray:
        pts = set(self._bps)
        if grid is not None:
            pts.update(float(x) for x in grid)
        return np.array(sorted(pts))

    # ---- 代数 ----

    def _merged(self, other: "PiecewiseMap") -> List[float]:
        if self.domain != other.domain:
            raise DomainMismatch(f"定义域不一致: {self.domain} 与 {other.domain}")
        return sorted(set(self._bps) | set(other._bps))

    def _overrides_at(self, t: float) -> Tuple[bool, bool]:
        has_point = t in self._points and self._points[t] != self.default_value(t)
        return has_point, t in self._rights

    def _combine(
        self,
        other: "PiecewiseMap",
        form_op: Callable[[SegmentForm, SegmentForm], SegmentForm],
        value_op: ValueOp,
        label: str,
    ) -> "PiecewiseMap":
        bps = self._merged(other)
        forms = [form_op(self.form_on(lo, hi), other.form_on(lo, hi)) for lo, hi in zip(bps[:-1], bps[1:])]
        points, rights = {}, {}
        for t in bps:
            p1, r1 = self._overrides_at(t)
            p2, r2 = other._overrides_at(t)
            if p1 or p2:
                points[t] = value_op(self.eval(t), other.eval(t))
            if (r1 or r2) and t != self.b:
                rights[t] = value_op(self.right_limit(t), other.right_limit(t))
        return PiecewiseMap(self.domain, bps, forms, points, rights, label=label)

    def add(self, other: "PiecewiseMap") -> "PiecewiseMap":
        return self._combine(other, add_forms, lambda x, y: x + y, f"({self.label}+{other.label})")

    def subtract(self, other: "PiecewiseMap") -> "PiecewiseMap":
        return self._combine(
            other,
            lambda x, y: add_forms(x, scale_form(y, -1.0)),
            lambda x, y: x - y,
            f"({self.label}-{other.label})",
        )

    def multiply(self, other: "PiecewiseMap") -> "PiecewiseMap":
        return self._combine(other, mul_forms, lambda x, y: x * y, f"({self.label}·{other.label})")

    def divide(self, other: "PiecewiseMap") -> "PiecewiseMap":
        """逐点相除，除数在断点或段内采样点为零时报错"""
        bps = self._merged(other)
        for t in bps:
            if other.eval(t) == 0.0 or (t != self.b and other.right_limit(t) == 0.0):
                raise ZeroDenominator(f"除数在 {t} 处为零", {"t": t})
        for lo, hi in zip(bps[:-1], bps[1:]):
            if np.any(other.form_on(lo, hi)(np.linspace(lo, hi, 17)[1:-1]) == 0.0):
                raise ZeroDenominator(f"除数在 ({lo}, {hi}) 内为零", {"lo": lo, "hi": hi})
        return self._combine(other, div_forms, lambda x, y: x / y, f"({self.label}/{other.label})")

    def scale(self, c: float) -> "PiecewiseMap":
        c = float(c)
        return PiecewiseMap(
            self.domain,
            self._bps,
            [scale_form(f, c) for f in self._forms],
            {t: c * v for t, v in self._points.items()},
            {t: c * v for t, v in self._rights.items()},
            label=f"{c:g}·{self.label}",
        )

    def shift(self, c: float) -> "PiecewiseMap":
        """加上常数 c"""
        return self.add(PiecewiseMap.constant(self.domain, c))

    def compose(self, h: Callable, h_prime: Optional[Callable] = None, name: str = "h") -> "PiecewiseMap":
        """h∘f，h 作用在数组上"""

        def apply(x: float) -> float:
            return float(np.asarray(h(np.asarray(x, dtype=float))))

        forms = [ComposedForm(h, form, h_prime, name) for form in self._forms]
        points = {t: apply(v) for t, v in self._points.items()}
        rights = {t: apply(v) for t, v in self._rights.items()}
        return PiecewiseMap(self.domain, self._bps, forms, points, rights, label=f"{name}∘{self.label}")

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.subtract(other)

    def __mul__(self, other):
        if isinstance(other, PiecewiseMap):
            return self.multiply(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def star_map(self, g: Derivator) -> "PiecewiseMap":
        """
        f* 作为分段函数：常值分量内部取 f(b_n)

        Args:
            g: 导子

        Returns:
            f∘t*
        """
        if self.domain != g.domain:
            raise DomainMismatch(f"定义域不一致: {self.domain} 与 {g.domain}")
        bps = sorted(set(self._bps) | set(g.breakpoints))
        forms = []
        for lo, hi in zip(bps[:-1], bps[1:]):
            component = g.component_containing(0.5 * (lo + hi))
            if component is not None:
                forms.append(ConstantForm(self.eval(component[1])))
            else:
                forms.append(self.form_on(lo, hi))
        star = PiecewiseMap(self.domain, bps, forms, label=f"{self.label}*")
        points, rights = {}, {}
        for t in bps:
            value = self.eval(g.classify(t).t_star)
            if value != star.default_value(t):
                points[t] = value
            if t in self._rights and g.component_containing(t) is None:
                rights[t] = self._rights[t]
        return PiecewiseMap(self.domain, bps, forms, points, rights, label=f"{self.label}*")

    def to_dict(self) -> Dict:
        return {
            "domain": [self.a, self.b],
            "breakpoints": list(self._bps),
            "segments": [form.to_dict() for form in self._forms],
            "point_values": {repr(t): v for t, v in self._points.items()},
            "right_limits": {repr(t): v for t, v in self._rights.items()},
        }

    def __repr__(self) -> str:
        return f"PiecewiseMap({self.label!r}, [{self.a}, {self.b}], {len(self._forms)} 段)"


def add(f1: PiecewiseMap, f2: PiecewiseMap) -> PiecewiseMap:
    return f1.add(f2)


def scale(c: float, f: PiecewiseMap) -> PiecewiseMap:
    return f.scale(c)


def multiply(f1: PiecewiseMap, f2: PiecewiseMap) -> PiecewiseMap:
    return f1.multiply(f2)


@dataclass(frozen=True)
class BDReport:
    """BD_g 成员检查结果"""

    is_bounded: bool
    g_continuous_off_exceptional: bool
    left_g_continuous_on_NgMinus: bool
    right_g_continuous_on_NgPlus: bool
    failures: Tuple[float, ...] = ()

    @property
    def verdict(self) -> bool:
        return (
            self.is_bounded
            and self.g_continuous_off_exceptional
            and self.left_g_continuous_on_NgMinus
            and self.right_g_continuous_on_NgPlus
        )

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["failures"] = list(self.failures)
        out["verdict"] = self.verdict
        return out


def _neighbor_width(f: PiecewiseMap, g: Derivator, t: float, side: str) -> float:
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    if side == "right":
        i = bisect.bisect_right(bps, t)
        return bps[i] - t if i < len(bps) else 0.0
    i = bisect.bisect_left(bps, t) - 1
    return t - bps[i] if i >= 0 else 0.0


def is_g_continuous_at(
    f: PiecewiseMap,
    g: Derivator,
    t: float,
    tol: float = 1e-9,
    side: str = "both",
    continuity: Optional[ContinuityConfig] = None,
) -> bool:
    """
    g-连续性的抽样半判定

    在几何收缩的偏移 h 上，只要 |g(t±h)−g(t)| ≤ tol 而 |f(t±h)−f(t)| > √tol 就判为不连续。
    常值分量内部的点空真。

    Args:
        f: 函数
        g: 导子
        t: 检查点
        tol: g 距离阈值
        side: both / left / right
        continuity: 偏移个数与收缩比，缺省 64 个、比 1/2

    Returns:
        是否通过
    """
    if g.classify(t).kind == PointClass.CONSTANCY_INTERIOR:
        return True
    continuity = continuity or ContinuityConfig()
    sides = ("left", "right") if side == "both" else (side,)
    ft, gt = f.eval(t), g.eval(t)
    bound = math.sqrt(tol)
    for s in sides:
        width = _neighbor_width(f, g, t, s)
        if width <= 0.0:
            continue
        hs = width * continuity.ratio ** np.arange(1, continuity.offsets + 1)
        pts = t + hs if s == "right" else t - hs
        pts = pts[(pts != t) & (pts >= f.a) & (pts <= f.b)]
        if pts.size == 0:
            continue
        dg = np.abs(g.values(pts) - gt)
        df = np.abs(f.values(pts) - ft)
        if np.any((dg <= tol) & (df > bound)):
            logger.debug("f=%s 在 t=%s 的%s侧不 g-连续", f.label, t, s)
            return False
    return True


def bd_membership(
    f: PiecewiseMap,
    g: Derivator,
    tol: float = 1e-9,
    grid: Optional[Iterable[float]] = None,
    continuity: Optional[ContinuityConfig] = None,
) -> BDReport:
    """
    BD_g 成员检查：有界，在例外集外 g-连续，N_g⁻ 上左 g-连续，N_g⁺ 上右 g-连续

    Args:
        f: 函数
        g: 导子
        tol: g-连续性阈值
        grid: 采样网格（另加全部断点）
        continuity: g-连续性抽样配置
    """
    pts = set(f.breakpoints) | set(g.breakpoints)
    if grid is not None:
        pts.update(float(x) for x in grid)
    pts = sorted(pts)
    try:
        bounded = bool(np.isfinite(f.sup_norm(pts)))
    except (FloatingPointError, ValueError):
        bounded = False
    regular_ok = minus_ok = plus_ok = True
    failures: List[float] = []
    for t in pts:
        kind = g.classify(t).kind
        if kind == PointClass.REGULAR:
            ok = is_g_continuous_at(f, g, t, tol, "both", continuity)
            regular_ok &= ok
        elif kind == PointClass.NG_MINUS:
            ok = is_g_continuous_at(f, g, t, tol, "left", continuity)
            minus_ok &= ok
        elif kind == PointClass.NG_PLUS:
            ok = is_g_continuous_at(f, g, t, tol, "right", continuity)
            plus_ok &= ok
        else:
            continue
        if not ok:
            failures.append(t)
    return BDReport(bounded, regular_ok, minus_ok, plus_ok, tuple(failures))
