"""
配置管理模块
使用数据类来管理各种配置参数
支持从YAML文件加载配置，并允许环境变量覆盖默认容差
"""

import os
import yaml
from dataclasses import dataclass, asdict
from typing import Dict, Any, Optional

CONFIG_ENV_VAR = "STIELTJES_CONFIG"
DEFAULT_CONFIG_PATH = "config.yaml"


@dataclass
class GridConfig:
    """网格配置"""

    grid_size: int = 1024
    triadic_power: int = 6
    random_seed: int = 20240601


@dataclass
class ToleranceConfig:
    """容差配置"""

    tol: float = 1e-8
    quad_tol: float = 1e-10
    kernel_tol: float = 1e-9
    continuity_tol: float = 1e-9
    breakpoint_match: float = 1e-9


@dataclass
class DerivativeConfig:
    """Stieltjes 导数极限估计配置"""

    max_h0: float = 1e-2
    max_halvings: int = 40
    stabilization: int = 3
    mismatch_factor: float = 10.0
    closed_form: bool = True


@dataclass
class ContinuityConfig:
    """g-连续性抽样检查配置"""

    offsets: int = 64
    ratio: float = 0.5


@dataclass
class MetricConfig:
    """Γ 与度量 d 的采样配置"""

    pair_grid: int = 256
    near_diagonal_depth: int = 40
    uniform_dedup: bool = True


@dataclass
class ValidationConfig:
    """导子验证配置"""

    custom_samples: int = 1024
    truncation_depth: int = 20


@dataclass
class ExportConfig:
    """导出配置"""

    csv_encoding: str = "utf-8"
    csv_separator: str = ","
    float_format: Optional[str] = None  # None 时按最短往返表示写出


@dataclass
class AppConfig:
    """应用总配置"""

    grid: GridConfig = None
    tolerance: ToleranceConfig = None
    derivative: DerivativeConfig = None
    continuity: ContinuityConfig = None
    metric: MetricConfig = None
    validation: ValidationConfig = None
    export: ExportConfig = None
    debug_mode: bool = False
    log_level: str = "INFO"

    def __post_init__(self):
        if self.grid is None:
            self.grid = GridConfig()
        if self.tolerance is None:
            self.tolerance = ToleranceConfig()
        if self.derivative is None:
            self.derivative = DerivativeConfig()
        if self.continuity is None:
            self.continuity = ContinuityConfig()
        if self.metric is None:
            self.metric = MetricConfig()
        if self.validation is None:
            self.validation = ValidationConfig()
        if self.export is None:
            self.export = ExportConfig()

    @classmethod
    def from_dict(cls, config_dict: Optional[Dict[str, Any]]) -> "AppConfig":
        """从字典创建配置对象"""
        config_dict = config_dict or {}
        app_config = config_dict.get("app", {})
        return cls(
            grid=GridConfig(**config_dict.get("grid", {})),
            tolerance=ToleranceConfig(**config_dict.get("tolerance", {})),
            derivative=DerivativeConfig(**config_dict.get("derivative", {})),
            continuity=ContinuityConfig(**config_dict.get("continuity", {})),
            metric=MetricConfig(**config_dict.get("metric", {})),
            validation=ValidationConfig(**config_dict.get("validation", {})),
            export=ExportConfig(**config_dict.get("export", {})),
            debug_mode=app_config.get("debug_mode", False),
            log_level=app_config.get("log_level", "INFO"),
        )

    @classmethod
    def from_yaml(cls, yaml_path: str) -> "AppConfig":
        """从YAML文件加载配置"""
        if not os.path.exists(yaml_path):
            raise FileNotFoundError(f"配置文件不存在: {yaml_path}")

        try:
            with open(yaml_path, "r", encoding="utf-8") as f:
                config_dict = yaml.safe_load(f)
            return cls.from_dict(config_dict)
        except yaml.YAMLError as e:
            raise ValueError(f"YAML配置文件格式错误: {e}")
        except Exception as e:
            raise ValueError(f"加载配置文件失败: {e}")

    @classmethod
    def load(cls, yaml_path: Optional[str] = None) -> "AppConfig":
        """
        按优先级加载配置：显式路径 > STIELTJES_CONFIG > config.yaml > 默认值，
        最后应用环境变量覆盖

        Args:
            yaml_path: 配置文件路径

        Returns:
            配置对象
        """
        path = yaml_path or os.environ.get(CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH)
        if yaml_path is None and not os.path.exists(path):
            config = cls()
        else:
            config = cls.from_yaml(path)
        config.apply_env_overrides(os.environ)
        return config

    def apply_env_overrides(self, environ: Dict[str, str]) -> None:
        """应用环境变量覆盖"""
        try:
            if "STIELTJES_TOL" in environ:
                self.tolerance.tol = float(environ["STIELTJES_TOL"])
            if "STIELTJES_QUAD_TOL" in environ:
                self.tolerance.quad_tol = float(environ["STIELTJES_QUAD_TOL"])
            if "STIELTJES_GRID" in environ:
                self.grid.grid_size = int(environ["STIELTJES_GRID"])
        except ValueError as e:
            raise ValueError(f"环境变量格式错误: {e}")
        if "STIELTJES_LOG_LEVEL" in environ:
            self.log_level = environ["STIELTJES_LOG_LEVEL"].upper()

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典"""
        return {
            "grid": asdict(self.grid),
            "tolerance": asdict(self.tolerance),
            "derivative": asdict(self.derivative),
            "continuity": asdict(self.continuity),
            "metric": asdict(self.metric),
            "validation": asdict(self.validation),
            "export": asdict(self.export),
            "app": {
                "debug_mode": self.debug_mode,
                "log_level": self.log_level,
            },
        }

    def to_yaml(self, yaml_path: str) -> None:
        """保存配置到YAML文件"""
        try:
            with open(yaml_path, "w", encoding="utf-8") as f:
                yaml.dump(
                    self.to_dict(),
                    f,
                    default_flow_style=False,
                    allow_unicode=True,
                    indent=2,
                )
        except Exception as e:
            raise ValueError(f"保存配置文件失败: {e}")
