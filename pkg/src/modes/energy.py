"""
能耗节省

均匀功耗假设下：savings = 1 - active / total
给定每个传感器功耗时：savings = 1 - Σ(active 功耗) / Σ(全部功耗)
"""

from typing import Mapping, Sequence

from src.core.errors import ParameterError, ShapeError


def energy_savings(active: int, total: int) -> float:
    """
    Raises:
        ParameterError: 不满足 1 <= active <= total
    """
    if total < 1 or not 1 <= active <= total:
        raise ParameterError(f"need 1 <= active <= total, got active={active}, total={total}")
    return 1.0 - active / total


def energy_savings_weighted(active_ids: Sequence[str], power: Mapping[str, float]) -> float:
    """
    Args:
        active_ids: 工作中的传感器
        power: 全部传感器的功耗（> 0）
    """
    if not active_ids:
        raise ParameterError("at least one sensor must be active")
    unknown = sorted(set(active_ids) - set(power))
    if unknown:
        raise ShapeError(f"no power figure for sensors {unknown}")
    if any(v <= 0 for v in power.values()):
        raise ParameterError("sensor power figures must be positive")
    total = sum(power.values())
    used = sum(power[sid] for sid in set(active_ids))
    return 1.0 - used / total


def f1_reduction(blue_f1: float, mode_f1: float) -> float:
    """blue - mode，子集更好时为负，原样返回"""
    for name, value in (("blue_f1", blue_f1), ("mode_f1", mode_f1)):
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return blue_f1 - mode_f1
