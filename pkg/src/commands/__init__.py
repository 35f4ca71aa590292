"""
命令模块
每个子命令一个类，共享 BaseCommand 中的配置与计算对象
"""

from .base_command import BaseCommand, UsageError
from .analysis_commands import ClassifyCommand, DerivCommand, IntegrateCommand, MvtCommand
from .ode_commands import ExpgCommand, ReproduceCommand, SolveCommand
from .kernel_command import KernelCommand
from .metric_commands import GammaCommand, MetricCommand
from .cantor_command import CantorCommand
from .suite_command import SuiteCommand

COMMANDS = (
    ClassifyCommand,
    DerivCommand,
    IntegrateCommand,
    ExpgCommand,
    SolveCommand,
    KernelCommand,
    GammaCommand,
    MetricCommand,
    MvtCommand,
    CantorCommand,
    ReproduceCommand,
    SuiteCommand,
)

__all__ = ["BaseCommand", "UsageError", "COMMANDS"] + [c.__name__ for c in COMMANDS]
