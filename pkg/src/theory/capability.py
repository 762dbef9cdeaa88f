"""
解析检测能力与最小传感器数

单个传感器以概率 mu_frac 检测到每种分析物，n 个传感器覆盖全部 m 种分析物的概率：

    C(n) = [1 - (1 - mu_frac)^n]^m

反解得到最小传感器数：

    n >= ln(1 - C^{1/m}) / ln(1 - mu_frac)
"""

import logging
import math
from typing import List, Sequence

from src.core.errors import CapabilityDomainError, ParameterError
from src.core.models import CapabilityModel

logger = logging.getLogger(__name__)


def analytic_capability(n: int, model: CapabilityModel) -> float:
    """[1 - (1 - mu_frac)^n]^m，n = 0 时为 0"""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    miss = (1.0 - model.mu_frac) ** n
    return float(min(max((1.0 - miss) ** model.m, 0.0), 1.0))


def capability_curve(n_values: Sequence[int], model: CapabilityModel) -> List[float]:
    return [analytic_capability(int(n), model) for n in n_values]


def min_sensors(C: float, model: CapabilityModel) -> int:
    """
    达到检测能力 C 所需的最少传感器数

    结果满足 analytic_capability(n) >= C 且 analytic_capability(n - 1) < C。

    Raises:
        CapabilityDomainError: mu_frac = 1 或 C 不在 (0, 1) 内（对数奇异）
    """
    if not 0.0 < C < 1.0:
        raise CapabilityDomainError(f"capability target must lie strictly inside (0, 1), got {C}")
    if not 0.0 < model.mu_frac < 1.0:
        raise CapabilityDomainError(f"mu_frac must lie strictly inside (0, 1), got {model.mu_frac}")

    bound = math.log(1.0 - C ** (1.0 / model.m)) / math.log(1.0 - model.mu_frac)
    n = max(0, math.ceil(bound))
    # ceil 附近的浮点误差：按闭式重新核对两侧
    while analytic_capability(n, model) < C:
        n += 1
    while n > 0 and analytic_capability(n - 1, model) >= C:
        n -= 1
    logger.debug(f"min_sensors(C={C}, mu={model.mu_frac}, m={model.m}) = {n} (bound {bound:.4f})")
    return n
