"""
曲线导出模块
把分段函数在网格上的取值整理成 pandas 表格并写出 CSV 或 JSON
"""

import json
import logging
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
import pandas as pd

from ..core.piecewise import PiecewiseMap
from ..utils.config import ExportConfig

logger = logging.getLogger(__name__)


class CurveExporter:
    """曲线导出器"""

    def __init__(self, config: Optional[ExportConfig] = None):
        self.config = config or ExportConfig()

    @staticmethod
    def curve_points(f: PiecewiseMap, grid: Iterable[float] = ()) -> np.ndarray:
        """网格点与 f 的全部断点"""
        pts = {float(x) for x in grid if f.a <= x <= f.b}
        pts.update(f.breakpoints)
        return np.array(sorted(pts))

    def curve_frame(self, f: PiecewiseMap, grid: Iterable[float] = ()) -> pd.DataFrame:
        """
        (t, value, right_limit) 表格

        right_limit 只在与点值不同的点上填写，其余留空。

        Args:
            f: 分段函数
            grid: 采样网格

        Returns:
            DataFrame
        """
        ts = self.curve_points(f, grid)
        values = f.values(ts)
        rights = np.array([f.right_limit(t) if t < f.b else v for t, v in zip(ts, values)])
        df = pd.DataFrame({"t": ts, "value": values, "right_limit": rights})
        df.loc[df["right_limit"] == df["value"], "right_limit"] = np.nan
        logger.debug("%s: 导出 %d 行", f.label, len(df))
        return df

    @staticmethod
    def rows_frame(rows: Sequence[Tuple[float, float]], columns: Sequence[str]) -> pd.DataFrame:
        return pd.DataFrame(list(rows), columns=list(columns))

    @staticmethod
    def records_frame(results: List[Dict[str, Any]]) -> pd.DataFrame:
        return pd.DataFrame(results)

    def to_csv(self, df: pd.DataFrame, path: Optional[str] = None) -> Optional[str]:
        """
        写出 CSV；path 为空时返回 CSV 文本

        Args:
            df: 表格
            path: 输出路径
        """
        kwargs = dict(index=False, sep=self.config.csv_separator, float_format=self.config.float_format)
        if path is None:
            return df.to_csv(**kwargs)
        try:
            df.to_csv(path, encoding=self.config.csv_encoding, **kwargs)
        except OSError as e:
            raise ValueError(f"写出 CSV 失败: {e}")
        logger.info("已写出 %s（%d 行）", path, len(df))
        return None

    @staticmethod
    def to_records(df: pd.DataFrame) -> List[Dict[str, Any]]:
        """JSON 友好的行记录，空值写成 null"""
        clean = df.astype(object).where(pd.notna(df), None)
        return clean.to_dict(orient="records")

    def emit(self, df: pd.DataFrame, fmt: str = "csv", stream: Optional[TextIO] = None) -> None:
        """
        按格式写到标准输出

        Args:
            df: 表格
            fmt: csv 或 json
            stream: 输出流，缺省为 sys.stdout
        """
        stream = stream or sys.stdout
        if fmt == "json":
            for record in self.to_records(df):
                stream.write(json.dumps(record, ensure_ascii=False) + "\n")
        else:
            stream.write(self.to_csv(df))
