"""
基础命令类
提供子命令共同的依赖、参数解析辅助和输出逻辑
"""

import argparse
import json
import logging
import sys
from typing import Any, Iterable, List, Optional

import numpy as np

from ..core.derivator import Derivator
from ..core.gdiff import StieltjesDifferentiator
from ..core.measure import StieltjesMeasure
from ..core.piecewise import PiecewiseMap
from ..core.spec_loader import load_derivator, load_function
from ..reporting import CurveExporter
from ..utils.config import AppConfig
from ..utils.exceptions import DomainMismatch

logger = logging.getLogger(__name__)


def _default(obj: Any):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"无法序列化 {type(obj).__name__}")


class UsageError(Exception):
    """参数组合不合法，命令行以退出码 2 结束"""

    pass


def parse_floats(text: str) -> List[float]:
    """"1,2.5,-3" → [1.0, 2.5, -3.0]"""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无法解析数值列表: {text}")


class BaseCommand:
    """基础命令类"""

    name = ""
    help = ""

    def __init__(self, config: AppConfig, stream=None):
        self.config = config
        self.exporter = CurveExporter(config.export)
        self.stream = stream or sys.stdout

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        pass

    def execute(self, args: argparse.Namespace) -> int:
        raise NotImplementedError

    # ---- 计算对象 ----

    def differentiator(self, g: Derivator) -> StieltjesDifferentiator:
        return StieltjesDifferentiator(g, self.config.derivative, self.config.tolerance.tol)

    def measure(self, g: Derivator) -> StieltjesMeasure:
        return StieltjesMeasure(g, self.config.tolerance.quad_tol)

    def grid(self, g: Derivator, n: Optional[int] = None) -> List[float]:
        return np.linspace(g.a, g.b, n or self.config.grid.grid_size).tolist()

    def load_g(self, ref: str) -> Derivator:
        g = load_derivator(ref, self.config.validation, self.config.tolerance.breakpoint_match)
        logger.debug("已加载导子 %r", g)
        return g

    def load_fn(self, ref: str, g: Derivator) -> PiecewiseMap:
        """加载函数并检查定义域与 g 一致"""
        f = load_function(ref, g, self.config.validation.truncation_depth)
        if f.domain != g.domain:
            raise DomainMismatch(
                f"{f.label} 的定义域 {f.domain} 与 g 的 {g.domain} 不一致",
                {"f_domain": list(f.domain), "g_domain": list(g.domain)},
            )
        return f

    # ---- 输出 ----

    def emit_json(self, obj: Any) -> None:
        self.stream.write(json.dumps(obj, ensure_ascii=False, default=_default) + "\n")

    def emit_lines(self, items: Iterable[Any]) -> None:
        for item in items:
            self.emit_json(item)

    def emit_frame(self, df, args: argparse.Namespace) -> None:
        fmt = getattr(args, "emit", None) or getattr(args, "format", "csv")
        self.exporter.emit(df, fmt, self.stream)
