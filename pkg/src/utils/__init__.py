# 工具模块
from .config import AppConfig
from .exceptions import StieltjesError
from .logging_setup import setup_logging

__all__ = ["AppConfig", "StieltjesError", "setup_logging"]
