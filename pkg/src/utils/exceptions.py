"""
自定义异常类
所有数值失败都携带 details 字典，供命令行输出 JSON 诊断信息
"""

from typing import Any, Dict, Optional


class StieltjesError(Exception):
    """Stieltjes 计算基础异常"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """转换为诊断字典"""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class SpecFormatError(StieltjesError):
    """JSON 规格格式错误"""

    pass


class DerivatorError(StieltjesError):
    """导子构造异常"""

    pass


class MonotonicityViolation(DerivatorError):
    """导子不是单调不减"""

    pass


class LeftContinuityViolation(DerivatorError):
    """导子在断点处不左连续"""

    pass


class EndpointHypothesisViolation(DerivatorError):
    """端点假设 a∉N_g⁻, b∉N_g⁺∪D_g∪C_g 不成立"""

    pass


class OutOfDomain(StieltjesError):
    """点不在定义域内"""

    pass


class DomainMismatch(StieltjesError):
    """两个函数的定义域不一致"""

    pass


class IntegrationError(StieltjesError):
    """积分异常"""

    pass


class UnboundedIntegrand(IntegrationError):
    """被积函数无界"""

    pass


class IntegrationFailure(IntegrationError):
    """数值积分失败"""

    pass


class DifferentiationError(StieltjesError):
    """Stieltjes 求导异常"""

    pass


class DerivativeMissing(DifferentiationError):
    """导数在某些点不存在"""

    pass


class CaseUndetermined(DifferentiationError):
    """无法从表示中判断链式法则的情形"""

    pass


class DenominatorVanishes(DifferentiationError):
    """商法则分母为零"""

    pass


class RegressivityViolation(StieltjesError):
    """系数不满足 g-正则性 1+p(t)Δg(t)≠0"""

    pass


class KernelError(StieltjesError):
    """核空间异常"""

    pass


class KernelViolation(KernelError):
    """函数不在核空间中"""

    pass


class ClosureConditionFailed(KernelError):
    """闭包条件 N_g′∖N_g, D_g′ ⊆ D_g 不成立"""

    pass


class RightContinuityViolation(KernelError):
    """阶梯函数在跳跃点不右连续"""

    pass


class SolverError(StieltjesError):
    """方程求解异常"""

    pass


class InitialValueMismatch(SolverError):
    """初值不匹配"""

    pass


class ResidualTooLarge(SolverError):
    """残差超出容差"""

    pass


class HypothesisFailed(StieltjesError):
    """中值定理的假设不成立"""

    pass


class DegenerateDenominator(StieltjesError):
    """g(b)=g(a)，平均斜率无定义"""

    pass


class ZeroDenominator(StieltjesError):
    """f(t*) 为零"""

    pass
