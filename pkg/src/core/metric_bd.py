"""
BD¹ 上的度量
弦距离 l、差商泛函 Γ、度量 d = ‖f−h‖∞ + ‖f'_g−h'_g‖∞ + Γ(f,h)，
以及 Cauchy 探测和 BD^k 范数
"""

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .derivator import Derivator
from .gdiff import StieltjesDifferentiator
from .piecewise import PiecewiseMap, is_g_continuous_at
from ..utils.config import ContinuityConfig, MetricConfig

logger = logging.getLogger(__name__)


def chordal(x, y):
    """l(x,y) = |x−y| / (√(1+x²)·√(1+y²))，向量化"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.abs(x - y) / (np.hypot(1.0, x) * np.hypot(1.0, y))
    return float(out) if out.ndim == 0 else out


def chordal_extended(x, y):
    """允许 ±∞ 的弦距离，l(±∞, y) = 1/√(1+y²)，两个无穷远点重合"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x_inf, y_inf = np.isinf(x), np.isinf(y)
    with np.errstate(invalid="ignore"):
        finite = np.abs(x - y) / (np.hypot(1.0, x) * np.hypot(1.0, y))
    out = np.where(x_inf & y_inf, 0.0, finite)
    out = np.where(x_inf & ~y_inf, 1.0 / np.hypot(1.0, np.where(y_inf, 0.0, y)), out)
    out = np.where(y_inf & ~x_inf, 1.0 / np.hypot(1.0, np.where(x_inf, 0.0, x)), out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GammaResult:
    """Γ 的采样下界及取到的点对"""

    value: float
    pair: Optional[Tuple[float, float]]
    pairs_checked: int


class PairGrid:
    """
    Γ 的点对集合

    均匀网格（含断点）上的全部点对、近对角几何偏移、水平集两端外侧的偏移、
    以及跳跃点处的单侧商。
    """

    def __init__(self, g: Derivator, maps: Sequence[PiecewiseMap], config: Optional[MetricConfig] = None):
        self.g = g
        self.config = config or MetricConfig()
        a, b = g.a, g.b
        uniform = set(np.linspace(a, b, self.config.pair_grid).tolist())
        for m in maps:
            uniform.update(m.breakpoints)
        self.uniform = np.array(sorted(uniform))
        self.base = np.array(sorted(uniform | set(g.breakpoints)))
        steps = (b - a) * 2.0 ** -np.arange(1, self.config.near_diagonal_depth + 1)
        self.offsets = np.concatenate([self.base[:, None] - steps, self.base[:, None] + steps], axis=1)
        bounds = np.array([g.level_set_bounds(t) for t in self.base])
        self.level_offsets = np.concatenate([bounds[:, :1] - steps, bounds[:, 1:] + steps], axis=1)

    def _quotient_pairs(self, maps: Sequence[PiecewiseMap]):
        """产出 (s, t, [各函数的差商]) 的批次"""
        g = self.g
        pts = self.uniform
        if self.config.uniform_dedup:
            rows = np.column_stack([g.values(pts)] + [m.values(pts) for m in maps])
            _, keep = np.unique(rows, axis=0, return_index=True)
            pts = pts[np.sort(keep)]
        gv = g.values(pts)
        i, j = np.triu_indices(pts.size, k=1)
        dg = gv[j] - gv[i]
        mask = dg != 0.0
        i, j, dg = i[mask], j[mask], dg[mask]
        sampled = [m.values(pts) for m in maps]
        yield pts[i], pts[j], [(v[j] - v[i]) / dg for v in sampled]

        for table in (self.offsets, self.level_offsets):
            t = np.repeat(self.base, table.shape[1])
            s = table.ravel()
            inside = (s >= g.a) & (s <= g.b)
            s, t = s[inside], t[inside]
            dg = g.values(s) - g.values(t)
            mask = dg != 0.0
            s, t, dg = s[mask], t[mask], dg[mask]
            yield s, t, [(m.values(s) - m.values(t)) / dg for m in maps]

        jumps = np.array(g.jump_points)
        if jumps.size:
            deltas = np.array([g.jumps[float(x)] for x in jumps])
            quotients = [np.array([m.right_limit(float(x)) - m.eval(float(x)) for x in jumps]) / deltas for m in maps]
            yield jumps, jumps, quotients

    def gamma(self, f: PiecewiseMap, h: PiecewiseMap) -> GammaResult:
        best, pair, count = 0.0, None, 0
        for s, t, (qf, qh) in self._quotient_pairs([f, h]):
            if s.size == 0:
                continue
            distances = chordal(qf, qh)
            count += s.size
            k = int(np.argmax(distances))
            if distances[k] > best:
                best, pair = float(distances[k]), (float(s[k]), float(t[k]))
        return GammaResult(best, pair, count)

    def sample_points(self) -> np.ndarray:
        return self.base


def gamma(
    f: PiecewiseMap,
    h: PiecewiseMap,
    g: Derivator,
    config: Optional[MetricConfig] = None,
    pairs: Optional[PairGrid] = None,
) -> float:
    """
    Γ(f,h) = sup_{g(s)≠g(t)} l(差商_f, 差商_h) 的采样下界

    Args:
        f: 函数
        h: 函数
        g: 导子
        config: 点对网格参数
        pairs: 共享的点对集合

    Returns:
        Γ 的下界
    """
    pairs = pairs or PairGrid(g, [f, h], config)
    return pairs.gamma(f, h).value


@dataclass(frozen=True)
class MetricReport:
    sup_norm_gap: float
    deriv_gap: float
    gamma: float
    d: float
    gamma_pair: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["gamma_pair"] = list(self.gamma_pair) if self.gamma_pair else None
        return out


def _sup_gap(f: PiecewiseMap, h: PiecewiseMap, pts: np.ndarray) -> float:
    gaps = [np.abs(f.values(pts) - h.values(pts))]
    inner = pts[pts < f.b]
    gaps.append(np.abs(np.array([f.right_limit(t) - h.right_limit(t) for t in inner])))
    inner = pts[pts > f.a]
    gaps.append(np.abs(np.array([f.left_limit(t) - h.left_limit(t) for t in inner])))
    return float(max(np.max(x) if x.size else 0.0 for x in gaps))


def _breakpoint_points(pairs: PairGrid, maps: Sequence[PiecewiseMap]) -> np.ndarray:
    pts = set(pairs.sample_points().tolist())
    for m in maps:
        pts.update(m.breakpoints)
    return np.array(sorted(pts))


def bd1_distance(
    f: PiecewiseMap,
    h: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    config: Optional[MetricConfig] = None,
    pairs: Optional[PairGrid] = None,
    differentiator: Optional[StieltjesDifferentiator] = None,
) -> MetricReport:
    """
    d(f,h) 的三个分量

    上确界取网格、断点及断点处两侧极限；导数差取两个导函数在同一组点上的差。

    Raises:
        DerivativeMissing: f 或 h 不可 g-求导
    """
    diff = differentiator or StieltjesDifferentiator(g)
    pairs = pairs or PairGrid(g, [f, h], config)
    pts = _distance_points(pairs, [f, h], grid)
    return _report(f, h, diff.g_derivative_fn(f, pts.tolist()), diff.g_derivative_fn(h, pts.tolist()), pts, pairs)


def _distance_points(pairs: PairGrid, maps: Sequence[PiecewiseMap], grid: Iterable[float]) -> np.ndarray:
    return np.array(sorted(set(_breakpoint_points(pairs, maps).tolist()) | {float(x) for x in grid}))


def _report(
    f: PiecewiseMap,
    h: PiecewiseMap,
    df: PiecewiseMap,
    dh: PiecewiseMap,
    pts: np.ndarray,
    pairs: PairGrid,
) -> MetricReport:
    sup_gap = _sup_gap(f, h, pts)
    deriv_gap = _sup_gap(df, dh, pts)
    result = pairs.gamma(f, h)
    d = sup_gap + deriv_gap + result.value
    logger.debug("d(%s, %s) = %.6g", f.label, h.label, d)
    return MetricReport(sup_gap, deriv_gap, result.value, d, result.pair)


def _distance_table(
    maps: Sequence[PiecewiseMap],
    g: Derivator,
    grid: Iterable[float],
    config: Optional[MetricConfig],
) -> Dict[Tuple[int, int], MetricReport]:
    """全部有序对的距离，共用点对集合与导函数"""
    pairs = PairGrid(g, maps, config)
    pts = _distance_points(pairs, maps, grid)
    diff = StieltjesDifferentiator(g)
    derivatives = [diff.g_derivative_fn(m, pts.tolist()) for m in maps]
    table: Dict[Tuple[int, int], MetricReport] = {}
    for i, j in itertools.permutations(range(len(maps)), 2):
        table[i, j] = _report(maps[i], maps[j], derivatives[i], derivatives[j], pts, pairs)
    return table


@dataclass(frozen=True)
class AxiomsReport:
    symmetric: bool
    triangle: bool
    identity: bool
    worst_triangle_slack: float

    @property
    def holds(self) -> bool:
        return self.symmetric and self.triangle and self.identity

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["holds"] = self.holds
        return out


def metric_axioms_check(
    maps: Sequence[PiecewiseMap],
    g: Derivator,
    grid: Iterable[float] = (),
    config: Optional[MetricConfig] = None,
    slack: float = 1e-12,
) -> AxiomsReport:
    """
    在三个函数上检查对称性（精确）、三角不等式（slack 内）与 d=0 ⇒ 采样上确界差为 0

    三个距离共用由全部函数构造的点对集合。
    """
    maps = list(maps)
    dist = _distance_table(maps, g, grid, config)
    symmetric = all(dist[i, j].d == dist[j, i].d for i, j in dist)
    worst = -np.inf
    for i, j, k in itertools.permutations(range(len(maps)), 3):
        worst = max(worst, dist[i, k].d - dist[i, j].d - dist[j, k].d)
    triangle = worst <= slack if len(maps) >= 3 else True
    identity = all(r.sup_norm_gap == 0.0 for r in dist.values() if r.d == 0.0)
    return AxiomsReport(symmetric, triangle, identity, float(worst) if len(maps) >= 3 else 0.0)


@dataclass(frozen=True)
class CauchyReport:
    """前缀上的两两距离及各 eps 下的判定"""

    distances: Tuple[Tuple[float, ...], ...]
    component: str
    cauchy: Dict[float, bool]

    def to_dict(self) -> Dict:
        return {
            "component": self.component,
            "distances": [list(row) for row in self.distances],
            "cauchy": {repr(k): v for k, v in self.cauchy.items()},
        }


def cauchy_probe(
    sequence: Sequence[PiecewiseMap],
    g: Derivator,
    eps_schedule: Sequence[float],
    component: str = "d",
    grid: Iterable[float] = (),
    config: Optional[MetricConfig] = None,
) -> CauchyReport:
    """
    有限前缀的 Cauchy 探测

    前缀后半段中两两距离都不超过 eps 时判为 eps-Cauchy。

    Args:
        sequence: 函数序列前缀
        g: 导子
        eps_schedule: 一组 eps
        component: d / sup / deriv / gamma
        grid: 采样网格
    """
    if component not in ("d", "sup", "deriv", "gamma"):
        raise ValueError(f"未知的距离分量: {component}")
    seq = list(sequence)
    grid = list(grid)
    n = len(seq)
    matrix = np.zeros((n, n))
    if component in ("d", "deriv"):
        table = _distance_table(seq, g, grid, config)
        for i, j in itertools.combinations(range(n), 2):
            report = table[i, j]
            matrix[i, j] = matrix[j, i] = report.d if component == "d" else report.deriv_gap
    else:
        pairs = PairGrid(g, seq, config)
        pts = _distance_points(pairs, seq, grid)
        for i, j in itertools.combinations(range(n), 2):
            if component == "gamma":
                value = pairs.gamma(seq[i], seq[j]).value
            else:
                value = _sup_gap(seq[i], seq[j], pts)
            matrix[i, j] = matrix[j, i] = value
    start = n // 2
    tail = matrix[start:, start:]
    worst = float(np.max(tail)) if tail.size else 0.0
    verdicts = {float(eps): worst <= eps for eps in eps_schedule}
    return CauchyReport(tuple(tuple(float(x) for x in row) for row in matrix), component, verdicts)


def bdk_norm(f: PiecewiseMap, g: Derivator, k: int, grid: Iterable[float] = ()) -> float:
    """‖f‖_{BD^k} = Σ_{i≤k} ‖f^{(i)}_g‖∞，k ≤ 2"""
    if k not in (0, 1, 2):
        raise ValueError(f"只支持 k ≤ 2: k={k}")
    grid = list(grid)
    diff = StieltjesDifferentiator(g)
    total, current = 0.0, f
    for i in range(k + 1):
        if i:
            current = diff.g_derivative_fn(current, grid)
        total += current.sup_norm(grid)
    return total


def bc_membership(
    f: PiecewiseMap,
    g: Derivator,
    grid: Iterable[float] = (),
    tol: float = 1e-9,
    continuity: Optional[ContinuityConfig] = None,
) -> bool:
    """f ∈ BC¹_g：f'_g 存在且在全部检查点上 g-连续"""
    grid = list(grid)
    derivative = StieltjesDifferentiator(g).g_derivative_fn(f, grid)
    pts = sorted(set(grid) | set(derivative.breakpoints))
    return all(is_g_continuous_at(derivative, g, t, tol, continuity=continuity) for t in pts)
