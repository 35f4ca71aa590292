"""
命名示例目录
文献中的导子与函数、非拓扑向量空间例子、a.e. 为零的见证，以及随机导子生成
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .cantor import cantor_derivator, cantor_iterate
from .derivator import Derivator
from .gexp_ode import LinearProblem
from .piecewise import PiecewiseMap
from .segments import AffineForm, ConstantForm, SegmentForm, polynomial_form

logger = logging.getLogger(__name__)


def identity_g(a: float = 0.0, b: float = 1.0) -> Derivator:
    """g(t)=t，经典情形"""
    return Derivator((a, b), [a, b], [AffineForm(1.0)], label="identity")


def gderexample_g() -> Derivator:
    """[0,3] 上 x、1、x−1 三段，C_g=(1,2)"""
    return Derivator(
        (0.0, 3.0),
        [0.0, 1.0, 2.0, 3.0],
        [AffineForm(1.0), ConstantForm(1.0), AffineForm(1.0, -1.0)],
        label="gderexample",
    )


def fderexample_f() -> PiecewiseMap:
    """[0,2) 上 x，[2,3] 上 2x+1"""
    return PiecewiseMap((0.0, 3.0), [0.0, 2.0, 3.0], [AffineForm(1.0), AffineForm(2.0, 1.0)], label="fderexample")


def example1_g(delta1: float = 1.0, delta2: float = 1.0) -> Derivator:
    """
    斜率 1、在 1 和 2 处分别跳 δ₁、δ₂ 的导子

    Args:
        delta1: Δg(1)
        delta2: Δg(2)
    """
    forms = [AffineForm(1.0), AffineForm(1.0, delta1), AffineForm(1.0, delta1 + delta2)]
    return Derivator((0.0, 3.0), [0.0, 1.0, 2.0, 3.0], forms, {1.0: delta1, 2.0: delta2}, label="example1")


def example1_problem(delta1: float = 1.0, delta2: float = 1.0, beta: float = 1.0, v0: float = 1.0) -> LinearProblem:
    """v'_g = βv，v(0)=v0"""
    g = example1_g(delta1, delta2)
    return LinearProblem(g, PiecewiseMap.constant(g.domain, beta, label="β"), v0)


def non_tvs_g() -> Derivator:
    """[−1,1] 上斜率 1、在 0 处单位跳跃"""
    return Derivator((-1.0, 1.0), [-1.0, 0.0, 1.0], [AffineForm(1.0), AffineForm(1.0, 1.0)], {0.0: 1.0}, label="non_tvs")


def non_tvs_f() -> PiecewiseMap:
    """[−1,0) 上为 0、[0,1] 上为 1 的单位阶跃"""
    return PiecewiseMap.step((-1.0, 1.0), [-1.0, 0.0, 1.0], [0.0, 1.0], label="f")


def non_tvs_sequences(k: int) -> Tuple[PiecewiseMap, PiecewiseMap, PiecewiseMap, PiecewiseMap]:
    """
    (f, h, f_k, h_k)：h=−f，f_k=(1−1/k)f，h_k=−(1+1/k)f

    f_k→f、h_k→h，但 f_k+h_k 不收敛到 f+h=0。
    """
    if k < 1:
        raise ValueError(f"k 必须为正整数: {k}")
    f = non_tvs_f()
    h = f.scale(-1.0)
    h.label = "h"
    f_k = f.scale(1.0 - 1.0 / k)
    f_k.label = f"f_{k}"
    h_k = f.scale(-(1.0 + 1.0 / k))
    h_k.label = f"h_{k}"
    return f, h, f_k, h_k


def ae_zero_jump_points(depth: int) -> List[float]:
    """截断后的跳跃点 ±1/n，2 ≤ n ≤ depth，按升序"""
    positive = [1.0 / n for n in range(2, depth + 1)]
    return sorted([-t for t in positive] + positive)


def ae_zero_witness_g(depth: int = 20) -> Derivator:
    """
    [−1, 3/4] 上斜率 1、在 ±1/n 处跳 2^{−n} 的导子，跳跃集截断到 n ≤ depth

    端点 a=−1 不带原子。
    """
    if depth < 2:
        raise ValueError(f"截断深度至少为 2: {depth}")
    jumps = {t: 2.0 ** -round(1.0 / abs(t)) for t in ae_zero_jump_points(depth)}
    bps = sorted({-1.0, 0.0, 0.75} | set(jumps))
    forms: List[SegmentForm] = []
    mass = 0.0
    for lo in bps[:-1]:
        mass += jumps.get(lo, 0.0)
        forms.append(AffineForm(1.0, mass))
    return Derivator((-1.0, 0.75), bps, forms, jumps, label="ae_zero", truncation_depth=depth)


def ae_zero_witness_f(depth: int = 20) -> PiecewiseMap:
    """
    右连续阶梯 f(t) = max{s ∈ D_g ∪ {0} : s ≤ t}，[−1,−1/2) 上取 −1

    在 0 处的 g-导数为 1，其余各点为 0。
    """
    points = ae_zero_jump_points(depth)
    bps = sorted({-1.0, 0.0, 0.75} | set(points))
    levels = [-1.0 if lo == -1.0 else lo for lo in bps[:-1]]
    return PiecewiseMap.step((-1.0, 0.75), bps, levels, label="ae_zero_f")


def random_derivator(
    rng: np.random.Generator,
    pieces: Optional[int] = None,
    with_jumps: bool = True,
    shapes: Tuple[str, ...] = ("affine", "constant"),
) -> Derivator:
    """
    随机有限导子：仿射、常值或二次上升段，随机跳跃

    首段非常值，末段为仿射上升段且 b 处无跳跃，满足端点假设。

    Args:
        rng: numpy 随机数生成器
        pieces: 段数，缺省随机取 2 到 6
        with_jumps: 是否放置跳跃
        shapes: 中间段可选的形状，取自 affine / constant / quadratic
    """
    n = int(pieces or rng.integers(2, 7))
    widths = rng.uniform(0.2, 1.0, size=n)
    bps = np.concatenate([[0.0], np.round(np.cumsum(widths), 6)]).tolist()
    forms: List[SegmentForm] = []
    jumps: Dict[float, float] = {}
    level = 0.0
    for i, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
        if with_jumps and 0 < i and rng.random() < 0.4:
            delta = float(np.round(rng.uniform(0.1, 1.5), 6))
            jumps[lo] = delta
            level += delta
        kind = "affine" if i in (0, n - 1) else str(rng.choice(list(shapes)))
        if kind == "constant":
            forms.append(ConstantForm(level))
        elif kind == "quadratic":
            c = float(np.round(rng.uniform(0.2, 1.0), 6))
            # level + c·(t−lo)²
            forms.append(polynomial_form([level + c * lo * lo, -2.0 * c * lo, c]))
            level += c * (hi - lo) ** 2
        else:
            slope = float(np.round(rng.uniform(0.3, 2.0), 6))
            forms.append(AffineForm(slope, anchor=(lo, level)))
            level += slope * (hi - lo)
    return Derivator((bps[0], bps[-1]), bps, forms, jumps, label="random")


def _jump_cuts(g: Derivator) -> List[float]:
    return [g.a] + [t for t in g.jump_points if t > g.a] + [g.b]


def random_integrand(rng: np.random.Generator, g: Derivator, low: float = -2.0, high: float = 2.0) -> PiecewiseMap:
    """
    随机被积函数：g 的每段上仿射，只在跳跃点处断开（右连续）

    这样它的不定积分处处 g-可导，导数就是它本身。
    """
    forms: List[SegmentForm] = []
    level = 0.0
    for lo, hi in zip(g.breakpoints[:-1], g.breakpoints[1:]):
        if lo == g.a or lo in g.jumps:
            level = float(rng.uniform(low, high))
        slope = float(rng.uniform(-1.0, 1.0))
        forms.append(AffineForm(slope, anchor=(lo, level)))
        level += slope * (hi - lo)
    return PiecewiseMap(g.domain, g.breakpoints, forms, label="φ")


def random_ac_function(rng: np.random.Generator, g: Derivator, measure=None, label: str = "F") -> PiecewiseMap:
    """
    随机 g-绝对连续函数：random_integrand 的不定积分加随机初值

    Args:
        rng: numpy 随机数生成器
        g: 导子
        measure: 积分所用的 StieltjesMeasure
        label: 名称
    """
    from .measure import StieltjesMeasure

    measure = measure or StieltjesMeasure(g)
    out = measure.indefinite(random_integrand(rng, g)).shift(float(rng.uniform(-2.0, 2.0)))
    out.label = label
    return out


def random_dominated_pair(rng: np.random.Generator, g: Derivator, measure=None) -> Tuple[PiecewiseMap, PiecewiseMap]:
    """
    随机 (f, h)，|f'_g| ≤ h'_g 处处成立

    两个导数在 [a,b]∖D_g 的每个分支上为常值：h'_g ∈ [0.5, 2]，f'_g 为它乘以 [−1, 1] 中的因子。
    """
    from .measure import StieltjesMeasure

    measure = measure or StieltjesMeasure(g)
    cuts = _jump_cuts(g)
    psi = rng.uniform(0.5, 2.0, size=len(cuts) - 1)
    phi = psi * rng.uniform(-1.0, 1.0, size=psi.size)
    h = measure.indefinite(PiecewiseMap.step(g.domain, cuts, psi.tolist(), label="ψ")).shift(float(rng.uniform(-1.0, 1.0)))
    f = measure.indefinite(PiecewiseMap.step(g.domain, cuts, phi.tolist(), label="φ")).shift(float(rng.uniform(-1.0, 1.0)))
    f.label, h.label = "f", "h"
    return f, h


NAMED_DERIVATORS: Dict[str, Callable[[], Derivator]] = {
    "identity": identity_g,
    "gderexample": gderexample_g,
    "example1": example1_g,
    "non_tvs": non_tvs_g,
    "ae_zero": ae_zero_witness_g,
    "cantor": lambda: cantor_derivator(10),
}

NAMED_FUNCTIONS: Dict[str, Callable[[], PiecewiseMap]] = {
    "fderexample": fderexample_f,
    "non_tvs_f": non_tvs_f,
    "ae_zero_f": ae_zero_witness_f,
    "F1": lambda: cantor_iterate(1),
    "F2": lambda: cantor_iterate(2),
    "F3": lambda: cantor_iterate(3),
}


# 可数跳跃集的目录对象，接受截断深度
TRUNCATED_DERIVATORS: Dict[str, Callable[[int], Derivator]] = {"ae_zero": ae_zero_witness_g}
TRUNCATED_FUNCTIONS: Dict[str, Callable[[int], PiecewiseMap]] = {"ae_zero_f": ae_zero_witness_f}


def named_derivator(name: str, truncation_depth: Optional[int] = None) -> Derivator:
    if name not in NAMED_DERIVATORS:
        raise KeyError(name)
    if truncation_depth is not None and name in TRUNCATED_DERIVATORS:
        return TRUNCATED_DERIVATORS[name](truncation_depth)
    return NAMED_DERIVATORS[name]()


def named_function(name: str, truncation_depth: Optional[int] = None) -> PiecewiseMap:
    if name not in NAMED_FUNCTIONS:
        raise KeyError(name)
    if truncation_depth is not None and name in TRUNCATED_FUNCTIONS:
        return TRUNCATED_FUNCTIONS[name](truncation_depth)
    return NAMED_FUNCTIONS[name]()
