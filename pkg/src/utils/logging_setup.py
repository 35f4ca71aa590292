"""
日志配置
标准输出留给计算结果，日志统一写到标准错误
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO", debug_mode: bool = False) -> None:
    """
    配置根日志器

    Args:
        level: 日志级别名称
        debug_mode: 为 True 时强制 DEBUG
    """
    resolved = logging.DEBUG if debug_mode else getattr(logging, level.upper(), logging.INFO)
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(resolved)
