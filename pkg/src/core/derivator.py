"""
导子模块
分段表示的左连续单调不减函数 g，以及 D_g、C_g、N_g⁻、N_g⁺ 的符号化结构
"""

import bisect
import logging
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .segments import SegmentForm, SegmentTable, expand_segments, is_nondecreasing
from ..utils.exceptions import (
    EndpointHypothesisViolation,
    LeftContinuityViolation,
    MonotonicityViolation,
    OutOfDomain,
    SpecFormatError,
)

logger = logging.getLogger(__name__)


class PointClass(str, Enum):
    """点相对于 g 的分类"""

    REGULAR = "Regular"
    JUMP = "Jump"
    CONSTANCY_INTERIOR = "ConstancyInterior"
    NG_MINUS = "NgMinus"
    NG_PLUS = "NgPlus"


@dataclass(frozen=True)
class PointClassification:
    """点的分类、t* 与跳跃量 Δg(t)"""

    point: float
    kind: PointClass
    t_star: float
    delta_g: float
    component: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.point,
            "class": self.kind.value,
            "t_star": self.t_star,
            "delta_g": self.delta_g,
        }


@dataclass(frozen=True)
class ClosureReport:
    """闭包条件 N_g′∖N_g ⊆ D_g 与 D_g′ ⊆ D_g"""

    ng_accum_ok: bool
    dg_accum_ok: bool
    source: str = "finite"

    @property
    def holds(self) -> bool:
        return self.ng_accum_ok and self.dg_accum_ok


@dataclass(frozen=True)
class LimitModel:
    """
    有限深度表示所代表的极限对象（如真正的 Cantor 函数）

    闭包条件和区间族的成员判定以极限对象为准。
    """

    name: str
    closure: ClosureReport
    i1_membership: Optional[Callable[[float], bool]] = field(default=None, compare=False)
    i2_membership: Optional[Callable[[float], bool]] = field(default=None, compare=False)


class Derivator:
    """
    导子 g：[a,b] 上分段给出的左连续单调不减函数

    段表达式给出绝对值：第 i 段覆盖 [bp_i, bp_{i+1}]，断点处 g 取左段极限，
    右极限为左值加跳跃量。
    """

    def __init__(
        self,
        domain: Tuple[float, float],
        breakpoints: Sequence[float],
        segments: Sequence[SegmentForm],
        jumps: Optional[Mapping[float, float]] = None,
        *,
        label: str = "g",
        truncation_depth: Optional[int] = None,
        limit_model: Optional[LimitModel] = None,
        validation_samples: int = 1024,
        match_tol: float = 1e-9,
    ):
        """
        构造并验证导子

        Args:
            domain: 定义域 (a, b)
            breakpoints: 严格递增断点，首尾为 a、b
            segments: 每对相邻断点之间的段表达式
            jumps: 断点 -> 跳跃量 Δg
            label: 名称
            truncation_depth: 可数跳跃集截断深度
            limit_model: 极限对象声明
            validation_samples: 黑盒段的单调性抽样点数
            match_tol: 断点处连续性匹配容差
        """
        self.label = label
        self.truncation_depth = truncation_depth
        self.limit_model = limit_model
        a, b = float(domain[0]), float(domain[1])
        if not a < b:
            raise SpecFormatError(f"定义域必须满足 a<b: [{a}, {b}]")
        bps, forms = self._expand(list(map(float, breakpoints)), list(segments))
        self._validate_layout(a, b, bps, forms)
        self.a, self.b = a, b
        self._bps = tuple(bps)
        self._bp_array = np.array(bps)
        self._forms = tuple(forms)
        self._table = SegmentTable(forms)
        self._jumps = self._validate_jumps(jumps or {}, bps)
        self._jump_points = tuple(sorted(self._jumps))
        self._check_monotone_segments(validation_samples)
        self._check_continuity(match_tol)
        self._components = self._extract_components()
        self._component_lefts = [c[0] for c in self._components]
        self._ng_minus = tuple(lo for lo, _ in self._components if lo not in self._jumps)
        self._ng_plus = tuple(hi for _, hi in self._components if hi not in self._jumps)
        self._check_endpoint_hypothesis()
        logger.debug(
            "构造导子 %s: %d 段, %d 个跳跃, %d 个常值分量",
            label,
            len(forms),
            len(self._jumps),
            len(self._components),
        )

    @classmethod
    def build(cls, domain, breakpoints, segments, jumps=None, **kwargs) -> "Derivator":
        return cls(domain, breakpoints, segments, jumps, **kwargs)

    @staticmethod
    def _expand(bps: List[float], forms: List[SegmentForm]) -> Tuple[List[float], List[SegmentForm]]:
        try:
            return expand_segments(bps, forms)
        except ValueError as e:
            raise SpecFormatError(f"导子规格错误: {e}")

    @staticmethod
    def _validate_layout(a: float, b: float, bps: List[float], forms: List[SegmentForm]) -> None:
        if len(bps) < 2 or bps[0] != a or bps[-1] != b:
            raise SpecFormatError(f"断点必须以 a={a} 开始、以 b={b} 结束")
        if any(lo >= hi for lo, hi in zip(bps[:-1], bps[1:])):
            raise SpecFormatError("断点必须严格递增")

    def _validate_jumps(self, jumps: Mapping[float, float], bps: List[float]) -> Mapping[float, float]:
        clean: Dict[float, float] = {}
        bp_set = set(bps)
        for t, delta in jumps.items():
            t, delta = float(t), float(delta)
            if t not in bp_set:
                raise SpecFormatError(f"跳跃点 {t} 不是断点")
            if t == self.b:
                raise EndpointHypothesisViolation(f"b={t} 不能是跳跃点", {"t": t})
            if delta < 0:
                raise MonotonicityViolation(f"跳跃量必须为正: Δg({t})={delta}", {"t": t})
            if delta > 0:
                clean[t] = delta
        return MappingProxyType(clean)

    def _check_monotone_segments(self, samples: int) -> None:
        for lo, hi, form in zip(self._bps[:-1], self._bps[1:], self._forms):
            if not is_nondecreasing(form, lo, hi, samples):
                raise MonotonicityViolation(f"段 [{lo}, {hi}] 上的表达式不是单调不减", {"lo": lo, "hi": hi})
            ends = form(np.array([lo, hi]))
            if not np.all(np.isfinite(ends)):
                raise SpecFormatError(f"段 [{lo}, {hi}] 端点值不有限")

    def _check_continuity(self, tol: float) -> None:
        for i in range(1, len(self._forms)):
            t = self._bps[i]
            left = self._forms[i - 1](t)
            right = self._forms[i](t)
            gap = right - left
            expected = self._jumps.get(t, 0.0)
            scale = tol * max(1.0, abs(left), abs(right))
            if gap < -scale:
                raise MonotonicityViolation(
                    f"g 在 {t} 处下降: 左极限 {left}, 右极限 {right}", {"t": t, "gap": gap}
                )
            if abs(gap - expected) > scale:
                raise LeftContinuityViolation(
                    f"断点 {t} 处段值之差 {gap} 与声明的跳跃量 {expected} 不符",
                    {"t": t, "gap": gap, "declared": expected},
                )

    def _extract_components(self) -> Tuple[Tuple[float, float], ...]:
        components: List[Tuple[float, float]] = []
        run_lo: Optional[float] = None
        for i, form in enumerate(self._forms):
            lo, hi = self._bps[i], self._bps[i + 1]
            if form.is_constant:
                if run_lo is None or lo in self._jumps:
                    if run_lo is not None:
                        components.append((run_lo, lo))
                    run_lo = lo
            elif run_lo is not None:
                components.append((run_lo, lo))
                run_lo = None
        if run_lo is not None:
            components.append((run_lo, self.b))
        return tuple(components)

    def _check_endpoint_hypothesis(self) -> None:
        if self._ng_minus and self._ng_minus[0] == self.a:
            raise EndpointHypothesisViolation(f"a={self.a} ∈ N_g⁻", {"t": self.a})
        if self._components and self._components[-1][1] == self.b:
            raise EndpointHypothesisViolation(f"b={self.b} ∈ N_g⁺ 或 C_g 的闭包", {"t": self.b})

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
    def jumps(self) -> Mapping[float, float]:
        return self._jumps

    @property
    def jump_points(self) -> Tuple[float, ...]:
        return self._jump_points

    @property
    def constancy_components(self) -> Tuple[Tuple[float, float], ...]:
        return self._components

    @property
    def ng_minus(self) -> Tuple[float, ...]:
        return self._ng_minus

    @property
    def ng_plus(self) -> Tuple[float, ...]:
        return self._ng_plus

    @property
    def ng_points(self) -> Tuple[float, ...]:
        return tuple(sorted(set(self._ng_minus) | set(self._ng_plus)))

    def tail_mass_bound(self) -> float:
        """截断后剩余跳跃质量上界 2^{1-depth}"""
        if self.truncation_depth is None:
            return 0.0
        return 2.0 ** (1 - self.truncation_depth)

    # ---- 求值 ----

    def _check_domain(self, t: float) -> None:
        if not self.a <= t <= self.b:
            raise OutOfDomain(f"t={t} 不在 [{self.a}, {self.b}] 内", {"t": t})

    def segment_index(self, t: float, side: str = "left") -> int:
        """
        t 所在段的下标

        Args:
            t: 点
            side: "left" 取以 t 为右端的段（断点处），"right" 取以 t 为左端的段
        """
        if side == "left":
            i = bisect.bisect_left(self._bps, t) - 1
        else:
            i = bisect.bisect_right(self._bps, t) - 1
        return min(max(i, 0), len(self._forms) - 1)

    def segment_at(self, t: float, side: str = "right") -> Tuple[float, float, SegmentForm]:
        i = self.segment_index(t, side)
        return self._bps[i], self._bps[i + 1], self._forms[i]

    def eval(self, t: float) -> float:
        """左连续值 g(t)"""
        t = float(t)
        self._check_domain(t)
        i = self.segment_index(t, "left")
        value = self._forms[i](t)
        if t == self.a:
            value -= self._jumps.get(t, 0.0)
        return value

    def values(self, ts) -> np.ndarray:
        """向量化左连续求值"""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < self.a or ts.max() > self.b):
            raise OutOfDomain(f"存在不在 [{self.a}, {self.b}] 内的点")
        idx = np.clip(np.searchsorted(self._bp_array, ts, side="left") - 1, 0, len(self._forms) - 1)
        out = self._table.evaluate(idx, ts)
        if self.a in self._jumps:
            out = np.where(ts == self.a, out - self._jumps[self.a], out)
        return out

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.eval(t)
        return self.values(t)

    def delta(self, t: float) -> float:
        """跳跃量 Δg(t)"""
        t = float(t)
        self._check_domain(t)
        return self._jumps.get(t, 0.0)

    def right_limit(self, t: float) -> float:
        """g(t⁺) = g(t) + Δg(t)"""
        t = float(t)
        if t == self.b:
            raise OutOfDomain(f"右极限要求 t<b: t={t}", {"t": t})
        return self.eval(t) + self.delta(t)

    def right_limits(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        jumps = np.array([self._jumps.get(float(t), 0.0) for t in ts.ravel()]).reshape(ts.shape)
        return self.values(ts) + jumps

    # ---- 分类 ----

    def component_containing(self, t: float) -> Optional[Tuple[float, float]]:
        """包含 t 的常值分量（开区间），没有则为 None"""
        i = bisect.bisect_right(self._component_lefts, t) - 1
        if i >= 0:
            lo, hi = self._components[i]
            if lo < t < hi:
                return lo, hi
        return None

    def classify(self, t: float) -> PointClassification:
        """
        对点分类：跳跃 > 常值内部 > N_g⁻ > N_g⁺ > 正则

        Args:
            t: [a,b] 中的点

        Returns:
            分类记录，常值内部点的 t* 为分量右端点
        """
        t = float(t)
        self._check_domain(t)
        if t in self._jumps:
            return PointClassification(t, PointClass.JUMP, t, self._jumps[t])
        component = self.component_containing(t)
        if component is not None:
            return PointClassification(t, PointClass.CONSTANCY_INTERIOR, component[1], 0.0, component)
        i = bisect.bisect_left(self._component_lefts, t)
        if i < len(self._components) and self._components[i][0] == t:
            return PointClassification(t, PointClass.NG_MINUS, t, 0.0, self._components[i])
        j = i - 1
        if 0 <= j < len(self._components) and self._components[j][1] == t:
            return PointClassification(t, PointClass.NG_PLUS, t, 0.0, self._components[j])
        return PointClassification(t, PointClass.REGULAR, t, 0.0)

    def t_star(self, t: float) -> float:
        return self.classify(t).t_star

    def level_set_bounds(self, t: float) -> Tuple[float, float]:
        """g 在 t 处水平集 {s: g(s)=g(t)} 的端点（跨越常值分量）"""
        t = float(t)
        i = bisect.bisect_right(self._component_lefts, t) - 1
        if i >= 0:
            lo, hi = self._components[i]
            if lo < t <= hi or (t == lo and lo not in self._jumps):
                return lo, hi
        return t, t

    def closure_conditions(self) -> ClosureReport:
        """有限表示下恒为 (true, true)；声明了极限对象时以其为准"""
        if self.limit_model is not None:
            return self.limit_model.closure
        return ClosureReport(True, True, "finite")

    def to_dict(self) -> Dict[str, Any]:
        """导出为 JSON 规格"""
        return {
            "domain": [self.a, self.b],
            "breakpoints": list(self._bps),
            "segments": [form.to_dict() for form in self._forms],
            "jumps": {repr(t): d for t, d in self._jumps.items()},
        }

    def __repr__(self) -> str:
        return f"Derivator({self.label!r}, [{self.a}, {self.b}], {len(self._forms)} 段)"
