"""
JSON 规格加载模块
导子与分段函数的 JSON 读写，以及命令行参数（文件路径、目录名或常数）的解析
"""

import json
import logging
import os
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .catalog import NAMED_DERIVATORS, NAMED_FUNCTIONS, named_derivator, named_function
from .derivator import Derivator
from .piecewise import PiecewiseMap
from .segments import (
    CUSTOM_FUNCTIONS,
    AffineForm,
    CantorIterateForm,
    ConstantForm,
    SegmentForm,
    custom_form,
    exp_form,
    polynomial_form,
)
from ..utils.config import ValidationConfig
from ..utils.exceptions import SpecFormatError

logger = logging.getLogger(__name__)


def segment_from_dict(spec: Mapping[str, Any], lo: float, hi: float) -> SegmentForm:
    """
    由 JSON 段描述构造段表达式

    Args:
        spec: {"form": ..., 参数}
        lo: 段左端点
        hi: 段右端点

    Raises:
        SpecFormatError: 形式未知或参数缺失
    """
    form = spec.get("form")
    try:
        if form == "affine":
            return AffineForm(float(spec["slope"]), float(spec.get("intercept", 0.0)))
        if form == "constant":
            return ConstantForm(float(spec["level"]))
        if form == "polynomial":
            return polynomial_form([float(c) for c in spec["coeffs"]])
        if form == "exp":
            return exp_form(float(spec["scale"]), float(spec["rate"]))
        if form == "cantor":
            return CantorIterateForm(int(spec["depth"]), lo, hi, float(spec.get("y0", 0.0)), float(spec.get("y1", 1.0)))
        if form == "custom":
            return custom_form(
                spec["name"],
                float(spec.get("scale", 1.0)),
                float(spec.get("shift", 0.0)),
                float(spec.get("offset", 0.0)),
            )
    except KeyError as e:
        if form == "custom" and spec.get("name") not in CUSTOM_FUNCTIONS:
            raise SpecFormatError(f"未注册的自定义函数: {spec.get('name')}", {"known": sorted(CUSTOM_FUNCTIONS)})
        raise SpecFormatError(f"段描述缺少字段: {e}", {"segment": dict(spec)})
    except (TypeError, ValueError) as e:
        raise SpecFormatError(f"段描述格式错误: {e}", {"segment": dict(spec)})
    raise SpecFormatError(f"未知的段形式: {form}", {"segment": dict(spec)})


def _float_map(raw: Optional[Mapping[str, Any]], what: str) -> Dict[float, float]:
    try:
        return {float(k): float(v) for k, v in (raw or {}).items()}
    except (TypeError, ValueError) as e:
        raise SpecFormatError(f"{what}格式错误: {e}")


def _layout(spec: Mapping[str, Any]) -> Tuple[Tuple[float, float], List[float], List[SegmentForm]]:
    for key in ("domain", "breakpoints", "segments"):
        if key not in spec:
            raise SpecFormatError(f"规格缺少字段: {key}")
    try:
        domain = (float(spec["domain"][0]), float(spec["domain"][1]))
        bps = [float(x) for x in spec["breakpoints"]]
    except (TypeError, ValueError, IndexError) as e:
        raise SpecFormatError(f"定义域或断点格式错误: {e}")
    raw_segments = spec["segments"]
    if len(raw_segments) != len(bps) - 1:
        raise SpecFormatError(f"段数 {len(raw_segments)} 与断点数 {len(bps)} 不匹配")
    forms = [segment_from_dict(s, lo, hi) for s, lo, hi in zip(raw_segments, bps[:-1], bps[1:])]
    return domain, bps, forms


def derivator_from_dict(
    spec: Mapping[str, Any],
    validation: Optional[ValidationConfig] = None,
    match_tol: float = 1e-9,
) -> Derivator:
    """
    {"domain", "breakpoints", "segments", "jumps"} → Derivator

    Args:
        spec: 规格字典，或 {"catalog": 名称}
        validation: 自定义段抽样点数与目录见证的截断深度
        match_tol: 断点处连续性匹配容差
    """
    validation = validation or ValidationConfig()
    if "catalog" in spec:
        return _catalog_derivator(spec["catalog"], validation.truncation_depth)
    domain, bps, forms = _layout(spec)
    return Derivator(
        domain,
        bps,
        forms,
        _float_map(spec.get("jumps"), "跳跃"),
        label=spec.get("label", "g"),
        truncation_depth=spec.get("truncation_depth"),
        validation_samples=validation.custom_samples,
        match_tol=match_tol,
    )


def function_from_dict(spec: Mapping[str, Any], truncation_depth: Optional[int] = None) -> PiecewiseMap:
    """导子规格加上 "point_values" 与 "right_limits" → PiecewiseMap"""
    if "catalog" in spec:
        return _catalog_function(spec["catalog"], truncation_depth)
    domain, bps, forms = _layout(spec)
    return PiecewiseMap(
        domain,
        bps,
        forms,
        _float_map(spec.get("point_values"), "点值"),
        _float_map(spec.get("right_limits"), "右极限"),
        label=spec.get("label", "f"),
    )


def _catalog_derivator(name: str, truncation_depth: Optional[int] = None) -> Derivator:
    try:
        return named_derivator(name, truncation_depth)
    except KeyError:
        raise SpecFormatError(f"未知的导子名称: {name}", {"known": sorted(NAMED_DERIVATORS)})


def _catalog_function(name: str, truncation_depth: Optional[int] = None) -> PiecewiseMap:
    try:
        return named_function(name, truncation_depth)
    except KeyError:
        raise SpecFormatError(f"未知的函数名称: {name}", {"known": sorted(NAMED_FUNCTIONS)})


def _read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise SpecFormatError(f"规格文件不存在: {path}", {"path": path})
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"JSON 格式错误: {e}", {"path": path})


def load_derivator(ref: str, validation: Optional[ValidationConfig] = None, match_tol: float = 1e-9) -> Derivator:
    """
    解析 --g 参数：目录中的名称或 JSON 文件路径

    Args:
        ref: 名称或路径
        validation: 导子验证配置
        match_tol: 断点匹配容差

    Returns:
        导子
    """
    validation = validation or ValidationConfig()
    if ref in NAMED_DERIVATORS:
        return named_derivator(ref, validation.truncation_depth)
    return derivator_from_dict(_read_json(ref), validation, match_tol)


def load_function(ref: str, g: Optional[Derivator] = None, truncation_depth: Optional[int] = None) -> PiecewiseMap:
    """
    解析 --f/--h/--beta/--forcing 参数

    可以是数值常数（需要 g 给出定义域）、目录名称、"g"（把导子当作函数）或 JSON 文件路径。
    """
    if g is not None:
        if ref == "g":
            return PiecewiseMap.from_derivator(g)
        try:
            c = float(ref)
        except ValueError:
            pass
        else:
            return PiecewiseMap.constant(g.domain, c, label=ref)
    if ref in NAMED_FUNCTIONS:
        return named_function(ref, truncation_depth)
    return function_from_dict(_read_json(ref), truncation_depth)


def dump_spec(obj, path: str) -> None:
    """把导子或函数写成 JSON 规格"""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
    logger.info("已写出规格: %s", path)
