"""
结果导出模块
提供曲线与表格的 CSV/JSON 导出
"""

from .curve_export import CurveExporter

__all__ = ["CurveExporter"]
