"""
分段表达式模块
定义导子 g 与候选函数 f 在每个子区间上的解析形式，
以及形式之间的代数运算（尽量保持闭式，否则退化为组合形式）
"""

import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from . import triadic

logger = logging.getLogger(__name__)

ArrayFunc = Callable[[np.ndarray], np.ndarray]


class SegmentForm(ABC):
    """子区间上的表达式基类"""

    kind = "abstract"

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.broadcast_to(np.asarray(self._eval(arr), dtype=float), arr.shape)
        if arr.ndim == 0:
            return float(out)
        return np.array(out, dtype=float)

    @abstractmethod
    def _eval(self, t: np.ndarray) -> np.ndarray:
        """向量化求值"""

    def derivative(self) -> Optional["SegmentForm"]:
        """经典导数的闭式，不存在时返回 None"""
        return None

    def antiderivative(self) -> Optional["SegmentForm"]:
        """原函数的闭式，不存在时返回 None"""
        return None

    @property
    def is_constant(self) -> bool:
        return False

    def to_dict(self) -> Dict[str, Any]:
        return {"form": self.kind}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class PolynomialForm(SegmentForm):
    """多项式 Σ c_k t^k"""

    kind = "polynomial"

    def __init__(self, coeffs: Sequence[float]):
        coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        self.poly = Polynomial(coeffs if coeffs.size else [0.0])

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def _eval(self, t):
        return self.poly(t)

    def derivative(self):
        return polynomial_form(self.poly.deriv().coef)

    def antiderivative(self):
        return polynomial_form(self.poly.integ().coef)

    def to_dict(self):
        return {"form": self.kind, "coeffs": [float(c) for c in self.poly.coef]}


class AffineForm(PolynomialForm):
    """仿射形式 y0 + slope·(t − x0)，以锚点求值以减少舍入"""

    kind = "affine"

    def __init__(self, slope: float, intercept: float = 0.0, anchor: Optional[Tuple[float, float]] = None):
        self.slope = float(slope)
        if anchor is None:
            self.x0, self.y0 = 0.0, float(intercept)
        else:
            self.x0, self.y0 = float(anchor[0]), float(anchor[1])
        self.intercept = self.y0 - self.slope * self.x0
        super().__init__([self.intercept, self.slope])

    def _eval(self, t):
        return self.y0 + self.slope * (t - self.x0)

    def to_dict(self):
        return {"form": self.kind, "slope": self.slope, "intercept": self.intercept}


class ConstantForm(AffineForm):
    """常值形式，C_g 的符号化来源"""

    kind = "constant"

    def __init__(self, level: float):
        self.level = float(level)
        super().__init__(0.0, self.level)

    def _eval(self, t):
        return np.full(np.shape(t), self.level)

    @property
    def is_constant(self) -> bool:
        return True

    def derivative(self):
        return ConstantForm(0.0)

    def to_dict(self):
        return {"form": self.kind, "level": self.level}


class ExpForm(SegmentForm):
    """scale·exp(rate·t)"""

    kind = "exp"

    def __init__(self, scale: float, rate: float):
        self.scale = float(scale)
        self.rate = float(rate)

    def _eval(self, t):
        return self.scale * np.exp(self.rate * t)

    def derivative(self):
        return exp_form(self.scale * self.rate, self.rate)

    def antiderivative(self):
        if self.rate == 0.0:
            return polynomial_form([0.0, self.scale])
        return exp_form(self.scale / self.rate, self.rate)

    def to_dict(self):
        return {"form": self.kind, "scale": self.scale, "rate": self.rate}


class ExpOfForm(SegmentForm):
    """scale·exp(inner(t))"""

    kind = "exp_of"

    def __init__(self, inner: SegmentForm, scale: float = 1.0):
        self.inner = inner
        self.scale = float(scale)

    def _eval(self, t):
        return self.scale * np.exp(self.inner(t))

    def derivative(self):
        inner_prime = self.inner.derivative()
        if inner_prime is None:
            return None
        return mul_forms(self, inner_prime)

    def to_dict(self):
        return {"form": self.kind, "scale": self.scale, "inner": self.inner.to_dict()}


class CustomForm(SegmentForm):
    """用户求值函数：offset + scale·func(t − shift)"""

    kind = "custom"

    def __init__(
        self,
        func: ArrayFunc,
        name: str = "custom",
        derivative_func: Optional[ArrayFunc] = None,
        increasing: bool = False,
        scale: float = 1.0,
        shift: float = 0.0,
        offset: float = 0.0,
    ):
        self.func = func
        self.name = name
        self.derivative_func = derivative_func
        self.increasing = increasing
        self.scale = float(scale)
        self.shift = float(shift)
        self.offset = float(offset)

    def _eval(self, t):
        x = t - self.shift
        try:
            raw = np.asarray(self.func(x), dtype=float)
            if raw.shape != np.shape(x):
                raise ValueError("shape")
        except (TypeError, ValueError):
            raw = np.vectorize(lambda s: float(self.func(float(s))), otypes=[float])(x)
        return self.offset + self.scale * raw

    def derivative(self):
        if self.derivative_func is None:
            return None
        return CustomForm(self.derivative_func, f"{self.name}'", scale=self.scale, shift=self.shift)

    def to_dict(self):
        return {
            "form": self.kind,
            "name": self.name,
            "scale": self.scale,
            "shift": self.shift,
            "offset": self.offset,
        }


class CantorIterateForm(SegmentForm):
    """
    以 F₀(x)=x 为种子的 Cantor 迭代，经仿射变换映到 [lo,hi] × [y_lo,y_hi]

    构造导子或分段函数时会被展开成常值段与仿射段。
    """

    kind = "cantor"

    def __init__(self, depth: int, lo: float, hi: float, y_lo: float = 0.0, y_hi: float = 1.0):
        if depth < 0:
            raise ValueError(f"Cantor 迭代深度必须非负: {depth}")
        self.depth = int(depth)
        self.lo, self.hi = float(lo), float(hi)
        self.y_lo, self.y_hi = float(y_lo), float(y_hi)

    def _eval(self, t):
        lo, width = Fraction(self.lo), Fraction(self.hi) - Fraction(self.lo)
        rise = Fraction(self.y_hi) - Fraction(self.y_lo)

        def one(s: float) -> float:
            u = min(max((Fraction(s) - lo) / width, Fraction(0)), Fraction(1))
            return float(Fraction(self.y_lo) + rise * triadic.cantor_value(u, self.depth))

        return np.vectorize(one, otypes=[float])(t)

    def expand(self) -> List[Tuple[float, float, SegmentForm]]:
        """展开为 (lo, hi, 形式) 列表"""
        lo, width = Fraction(self.lo), Fraction(self.hi) - Fraction(self.lo)
        y_lo, rise = Fraction(self.y_lo), Fraction(self.y_hi) - Fraction(self.y_lo)
        expanded = []
        for piece in triadic.cantor_linear_pieces(self.depth):
            x0 = lo + width * piece.lo
            x1 = lo + width * piece.hi
            v0 = y_lo + rise * piece.y_lo
            if piece.is_plateau or rise == 0:
                form: SegmentForm = ConstantForm(float(v0))
            else:
                slope = rise * piece.slope / width
                form = AffineForm(float(slope), anchor=(float(x0), float(v0)))
            expanded.append((float(x0), float(x1), form))
        return expanded

    def to_dict(self):
        return {"form": self.kind, "depth": self.depth, "y0": self.y_lo, "y1": self.y_hi}


class SumForm(SegmentForm):
    kind = "sum"

    def __init__(self, left: SegmentForm, right: SegmentForm):
        self.left, self.right = left, right

    def _eval(self, t):
        return self.left(t) + self.right(t)

    def derivative(self):
        a, b = self.left.derivative(), self.right.derivative()
        return None if a is None or b is None else add_forms(a, b)

    def antiderivative(self):
        a, b = self.left.antiderivative(), self.right.antiderivative()
        return None if a is None or b is None else add_forms(a, b)

    def to_dict(self):
        return {"form": self.kind, "terms": [self.left.to_dict(), self.right.to_dict()]}


class ScaledForm(SegmentForm):
    kind = "scaled"

    def __init__(self, inner: SegmentForm, factor: float):
        self.inner, self.factor = inner, float(factor)

    def _eval(self, t):
        return self.factor * self.inner(t)

    def derivative(self):
        d = self.inner.derivative()
        return None if d is None else scale_form(d, self.factor)

    def antiderivative(self):
        d = self.inner.antiderivative()
        return None if d is None else scale_form(d, self.factor)

    def to_dict(self):
        return {"form": self.kind, "factor": self.factor, "inner": self.inner.to_dict()}


class ProductForm(SegmentForm):
    kind = "product"

    def __init__(self, left: SegmentForm, right: SegmentForm):
        self.left, self.right = left, right

    def _eval(self, t):
        return self.left(t) * self.right(t)

    def derivative(self):
        a, b = self.left.derivative(), self.right.derivative()
        if a is None or b is None:
            return None
        return add_forms(mul_forms(a, self.right), mul_forms(self.left, b))

    def to_dict(self):
        return {"form": self.kind, "factors": [self.left.to_dict(), self.right.to_dict()]}


class QuotientForm(SegmentForm):
    kind = "quotient"

    def __init__(self, numerator: SegmentForm, denominator: SegmentForm):
        self.numerator, self.denominator = numerator, denominator

    def _eval(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.numerator(t) / self.denominator(t)

    def derivative(self):
        a, b = self.numerator.derivative(), self.denominator.derivative()
        if a is None or b is None:
            return None
        top = add_forms(mul_forms(a, self.denominator), scale_form(mul_forms(self.numerator, b), -1.0))
        return div_forms(top, mul_forms(self.denominator, self.denominator))

    def to_dict(self):
        return {"form": self.kind, "numerator": self.numerator.to_dict(), "denominator": self.denominator.to_dict()}


class ComposedForm(SegmentForm):
    """outer(inner(t))，outer 的导数可选"""

    kind = "composed"

    def __init__(self, outer: ArrayFunc, inner: SegmentForm, outer_prime: Optional[ArrayFunc] = None, name: str = "h"):
        self.outer, self.inner, self.outer_prime, self.name = outer, inner, outer_prime, name

    def _eval(self, t):
        return np.asarray(self.outer(self.inner(t)), dtype=float)

    def derivative(self):
        inner_prime = self.inner.derivative()
        if self.outer_prime is None or inner_prime is None:
            return None
        return mul_forms(ComposedForm(self.outer_prime, self.inner, name=f"{self.name}'"), inner_prime)

    def to_dict(self):
        return {"form": self.kind, "outer": self.name, "inner": self.inner.to_dict()}


class SampledForm(SegmentForm):
    """网格采样值的线性插值，无闭式时使用"""

    kind = "sampled"

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)

    def _eval(self, t):
        return np.interp(t, self.xs, self.ys)

    def to_dict(self):
        return {"form": self.kind, "xs": self.xs.tolist(), "ys": self.ys.tolist()}


class QuadratureForm(SegmentForm):
    """base + ∫_anchor^t integrand，自适应求积"""

    kind = "quadrature"

    def __init__(self, integrand: SegmentForm, anchor: float, base: float = 0.0, tol: float = 1e-10):
        self.integrand, self.anchor, self.base, self.tol = integrand, float(anchor), float(base), tol

    def _eval(self, t):
        def one(s: float) -> float:
            if s == self.anchor:
                return self.base
            value, _ = integrate.quad(self.integrand, self.anchor, s, epsabs=self.tol, epsrel=self.tol, limit=200)
            return self.base + value

        return np.vectorize(one, otypes=[float])(t)

    def derivative(self):
        return self.integrand

    def to_dict(self):
        return {"form": self.kind, "anchor": self.anchor, "base": self.base, "integrand": self.integrand.to_dict()}


# 可从 JSON 按名称引用的单调函数：名称 -> (函数, 导数, 是否递增)
CUSTOM_FUNCTIONS: Dict[str, Tuple[ArrayFunc, Optional[ArrayFunc], bool]] = {
    "sqrt": (np.sqrt, lambda t: 0.5 / np.sqrt(t), True),
    "cbrt": (np.cbrt, lambda t: 1.0 / (3.0 * np.cbrt(t) ** 2), True),
    "tanh": (np.tanh, lambda t: 1.0 / np.cosh(t) ** 2, True),
    "arctan": (np.arctan, lambda t: 1.0 / (1.0 + t**2), True),
    "log1p": (np.log1p, lambda t: 1.0 / (1.0 + t), True),
    "expm1": (np.expm1, np.exp, True),
    "sin": (np.sin, np.cos, False),
    "cos": (np.cos, lambda t: -np.sin(t), False),
}


def custom_form(name: str, scale: float = 1.0, shift: float = 0.0, offset: float = 0.0) -> CustomForm:
    """按注册名构造自定义形式"""
    if name not in CUSTOM_FUNCTIONS:
        raise KeyError(name)
    func, deriv, increasing = CUSTOM_FUNCTIONS[name]
    return CustomForm(func, name, deriv, increasing and scale >= 0, scale, shift, offset)


def polynomial_form(coeffs: Sequence[float]) -> PolynomialForm:
    """按次数归一化为常值、仿射或一般多项式"""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size <= 1:
        return ConstantForm(float(coeffs[0]) if coeffs.size else 0.0)
    if coeffs.size == 2:
        return AffineForm(float(coeffs[1]), float(coeffs[0]))
    return PolynomialForm(coeffs)


def exp_form(scale: float, rate: float) -> SegmentForm:
    if rate == 0.0 or scale == 0.0:
        return ConstantForm(scale if rate == 0.0 else 0.0)
    return ExpForm(scale, rate)


def exp_of_form(inner: SegmentForm, scale: float = 1.0) -> SegmentForm:
    """scale·exp(inner)，inner 为一次多项式时化为 ExpForm"""
    if isinstance(inner, PolynomialForm) and inner.degree <= 1:
        coef = inner.poly.coef
        rate = float(coef[1]) if coef.size > 1 else 0.0
        return exp_form(scale * float(np.exp(coef[0])), rate)
    return ExpOfForm(inner, scale)


def _constant_value(form: SegmentForm) -> Optional[float]:
    return form.level if isinstance(form, ConstantForm) else None


def add_forms(a: SegmentForm, b: SegmentForm) -> SegmentForm:
    if isinstance(a, PolynomialForm) and isinstance(b, PolynomialForm):
        if isinstance(a, AffineForm) and isinstance(b, AffineForm) and a.x0 == b.x0:
            slope = a.slope + b.slope
            if slope == 0.0:
                return ConstantForm(a.y0 + b.y0)
            return AffineForm(slope, anchor=(a.x0, a.y0 + b.y0))
        return polynomial_form((a.poly + b.poly).coef)
    if _constant_value(a) == 0.0:
        return b
    if _constant_value(b) == 0.0:
        return a
    if isinstance(a, ExpForm) and isinstance(b, ExpForm) and a.rate == b.rate:
        return exp_form(a.scale + b.scale, a.rate)
    return SumForm(a, b)


def scale_form(form: SegmentForm, factor: float) -> SegmentForm:
    factor = float(factor)
    if factor == 1.0:
        return form
    if factor == 0.0:
        return ConstantForm(0.0)
    if isinstance(form, ConstantForm):
        return ConstantForm(factor * form.level)
    if isinstance(form, AffineForm):
        return AffineForm(factor * form.slope, anchor=(form.x0, factor * form.y0))
    if isinstance(form, PolynomialForm):
        return polynomial_form(form.poly.coef * factor)
    if isinstance(form, ExpForm):
        return exp_form(form.scale * factor, form.rate)
    if isinstance(form, ExpOfForm):
        return ExpOfForm(form.inner, form.scale * factor)
    if isinstance(form, ScaledForm):
        return scale_form(form.inner, form.factor * factor)
    return ScaledForm(form, factor)


def mul_forms(a: SegmentForm, b: SegmentForm) -> SegmentForm:
    ca, cb = _constant_value(a), _constant_value(b)
    if ca is not None:
        return scale_form(b, ca)
    if cb is not None:
        return scale_form(a, cb)
    if isinstance(a, PolynomialForm) and isinstance(b, PolynomialForm):
        return polynomial_form((a.poly * b.poly).coef)
    if isinstance(a, ExpForm) and isinstance(b, ExpForm):
        return exp_form(a.scale * b.scale, a.rate + b.rate)
    if isinstance(a, ExpOfForm) and isinstance(b, ExpOfForm):
        return exp_of_form(add_forms(a.inner, b.inner), a.scale * b.scale)
    return ProductForm(a, b)


def div_forms(a: SegmentForm, b: SegmentForm) -> SegmentForm:
    cb = _constant_value(b)
    if cb is not None and cb != 0.0:
        return scale_form(a, 1.0 / cb)
    if _constant_value(a) == 0.0:
        return ConstantForm(0.0)
    if isinstance(a, ExpForm) and isinstance(b, ExpForm):
        return exp_form(a.scale / b.scale, a.rate - b.rate)
    if isinstance(b, ExpForm):
        return mul_forms(a, ExpForm(1.0 / b.scale, -b.rate))
    if isinstance(a, ExpOfForm) and isinstance(b, ExpOfForm):
        return exp_of_form(add_forms(a.inner, scale_form(b.inner, -1.0)), a.scale / b.scale)
    return QuotientForm(a, b)


def is_nondecreasing(form: SegmentForm, lo: float, hi: float, samples: int = 1024) -> bool:
    """
    检查形式在 [lo,hi] 上单调不减

    Args:
        form: 段表达式
        lo: 左端点
        hi: 右端点
        samples: 抽样点数（对黑盒函数）

    Returns:
        是否单调不减
    """
    if isinstance(form, AffineForm):
        return form.slope >= 0.0
    if isinstance(form, ExpForm):
        return form.scale * form.rate >= 0.0
    if isinstance(form, CantorIterateForm):
        return form.y_hi >= form.y_lo
    ts = np.linspace(lo, hi, samples)
    values = form(ts)
    if not np.all(np.isfinite(values)):
        return False
    steps = np.diff(values)
    if isinstance(form, CustomForm):
        return bool(np.all(steps >= 0.0))
    slack = 1e-14 * max(1.0, float(np.max(np.abs(values))))
    return bool(np.all(steps >= -slack))


class SegmentTable:
    """
    一组段表达式的批量求值

    全部为一次多项式时用数组一次算完，否则按段分组调用。
    """

    def __init__(self, forms: Sequence[SegmentForm]):
        self.forms = list(forms)
        self._affine = None
        if all(isinstance(f, AffineForm) for f in self.forms):
            self._affine = (
                np.array([f.x0 for f in self.forms]),
                np.array([f.y0 for f in self.forms]),
                np.array([f.slope for f in self.forms]),
            )

    def evaluate(self, idx: np.ndarray, ts: np.ndarray) -> np.ndarray:
        if self._affine is not None:
            x0, y0, slope = self._affine
            return y0[idx] + slope[idx] * (ts - x0[idx])
        if ts.ndim != 1:
            return self.evaluate(np.ravel(idx), np.ravel(ts)).reshape(ts.shape)
        out = np.empty(ts.shape, dtype=float)
        order = np.argsort(idx, kind="stable")
        sorted_idx = idx[order]
        present, starts = np.unique(sorted_idx, return_index=True)
        ends = list(starts[1:]) + [sorted_idx.size]
        for seg, start, end in zip(present, starts, ends):
            positions = order[start:end]
            out[positions] = self.forms[seg](ts[positions])
        return out


def expand_segments(bps: Sequence[float], forms: Sequence[SegmentForm]) -> Tuple[List[float], List[SegmentForm]]:
    """
    把 Cantor 迭代段展开为常值段与仿射段

    Args:
        bps: 断点
        forms: 每段表达式

    Returns:
        展开后的 (断点, 段表达式)
    """
    if len(forms) != len(bps) - 1:
        raise ValueError(f"段数 {len(forms)} 与断点数 {len(bps)} 不匹配")
    out_bps, out_forms = [float(bps[0])], []
    for lo, hi, form in zip(bps[:-1], bps[1:], forms):
        if isinstance(form, CantorIterateForm):
            bound = CantorIterateForm(form.depth, lo, hi, form.y_lo, form.y_hi)
            for _, piece_hi, piece_form in bound.expand():
                out_forms.append(piece_form)
                out_bps.append(piece_hi)
            out_bps[-1] = float(hi)
        else:
            out_forms.append(form)
            out_bps.append(float(hi))
    return out_bps, out_forms
