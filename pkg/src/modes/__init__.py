"""
Modes 模块 - Blue/Green 工作模式与能耗
"""

from .energy import energy_savings, energy_savings_weighted, f1_reduction
from .modes import BLUE, build_modes, evaluate_mode, evaluate_modes, green_name

__all__ = [
    "BLUE",
    "build_modes",
    "energy_savings",
    "energy_savings_weighted",
    "evaluate_mode",
    "evaluate_modes",
    "f1_reduction",
    "green_name",
]
