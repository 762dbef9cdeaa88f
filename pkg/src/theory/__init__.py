"""
Theory 模块 - 解析检测能力、最小传感器数与蒙特卡洛交叉验证
"""

from .capability import analytic_capability, capability_curve, min_sensors
from .monte_carlo import confidence_interval, mc_capability, mc_curve, mc_samples
from .validation import build_curve, crossing_verdict, validate_green_modes

__all__ = [
    "analytic_capability",
    "build_curve",
    "capability_curve",
    "confidence_interval",
    "crossing_verdict",
    "mc_capability",
    "mc_curve",
    "mc_samples",
    "min_sensors",
    "validate_green_modes",
]
