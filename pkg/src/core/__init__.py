# 核心模块
from .derivator import Derivator, PointClass
from .piecewise import PiecewiseMap
from .measure import GInterval, StieltjesMeasure
from .gdiff import StieltjesDifferentiator
from .interval_families import family_I1, family_I2, mvt_dominance_check
from .kernel_space import is_kernel_member, step_kernel
from .gexp_ode import LinearProblem, g_exponential, solve_forced, solve_homogeneous_ac
from .metric_bd import bd1_distance, chordal, gamma
from .cantor import cantor_derivator, cantor_iterate

__all__ = [
    "Derivator",
    "PointClass",
    "PiecewiseMap",
    "GInterval",
    "StieltjesMeasure",
    "StieltjesDifferentiator",
    "family_I1",
    "family_I2",
    "mvt_dominance_check",
    "is_kernel_member",
    "step_kernel",
    "LinearProblem",
    "g_exponential",
    "solve_forced",
    "solve_homogeneous_ac",
    "bd1_distance",
    "chordal",
    "gamma",
    "cantor_derivator",
    "cantor_iterate",
]
