# 数值 Stieltjes 微积分工具包
__version__ = "1.0.0"
__author__ = "Stieltjes Calculus Tool"
