"""
解析曲线与 MC 曲线的交叉验证

对每个目标能力，比较两条曲线第一次达到目标的 n；
差距不超过 1 个传感器即通过。没达到目标的曲线按 n_max + 1 计。
工作模式点叠加在曲线上，标记在解析曲线之上还是之下。
"""

import logging
from typing import Optional, Sequence

from src.core.errors import ShapeError
from src.core.models import (
    CapabilityModel,
    CrossingVerdict,
    Estimator,
    GreenPoint,
    TheoryCurve,
    TheoryValidation,
)
from .capability import analytic_capability, capability_curve
from .monte_carlo import mc_curve

logger = logging.getLogger(__name__)

DEFAULT_TARGETS = (0.5, 0.8, 0.9, 0.95)
MAX_CROSSING_GAP = 1


def build_curve(model: CapabilityModel, n_max: int, trials: int, seed: int,
                estimator: Estimator = Estimator.ALL_DETECTED, workers: int = 1) -> TheoryCurve:
    """n = 1..n_max 的解析曲线和 MC 曲线"""
    n_values = list(range(1, max(1, n_max) + 1))
    means, lows, highs = mc_curve(n_values, model, trials, seed, estimator, workers)
    return TheoryCurve(
        mu_frac=model.mu_frac,
        sigma_frac=model.sigma_frac,
        m=model.m,
        estimator=estimator,
        trials=trials,
        n_values=n_values,
        analytic=capability_curve(n_values, model),
        mc_mean=means,
        mc_ci_low=lows,
        mc_ci_high=highs,
    )


def crossing_verdict(curve: TheoryCurve, target: float) -> CrossingVerdict:
    n_a = TheoryCurve.crossing(curve.n_values, curve.analytic, target)
    n_mc = TheoryCurve.crossing(curve.n_values, curve.mc_mean, target)
    beyond = curve.n_values[-1] + 1
    gap = abs((n_a if n_a is not None else beyond) - (n_mc if n_mc is not None else beyond))
    return CrossingVerdict(target=target, n_analytic=n_a, n_mc=n_mc, passed=gap <= MAX_CROSSING_GAP)


def validate_green_modes(ns: Sequence[int], capabilities: Sequence[float], model: CapabilityModel,
                         trials: int, seed: int, n_max: Optional[int] = None,
                         targets: Sequence[float] = DEFAULT_TARGETS,
                         estimator: Estimator = Estimator.ALL_DETECTED,
                         workers: int = 1) -> TheoryValidation:
    """
    Args:
        ns: 各工作模式的传感器数
        capabilities: 各工作模式的实测能力（与 ns 对齐）
        model: 高斯能力模型
        trials: 每个 n 的 MC 试验次数
        seed: master seed
        n_max: 曲线的最大 n（默认取 ns 的最大值）
        targets: 要比较交点的目标能力
    Raises:
        ShapeError: ns 与 capabilities 长度不一致
    """
    if len(ns) != len(capabilities):
        raise ShapeError(f"{len(ns)} sensor counts but {len(capabilities)} capabilities")
    n_max = n_max if n_max is not None else max([int(n) for n in ns] or [1])
    curve = build_curve(model, n_max, trials, seed, estimator, workers)

    crossings = [crossing_verdict(curve, t) for t in targets]
    points = []
    for n, cap in zip(ns, capabilities):
        reference = analytic_capability(int(n), model)
        points.append(GreenPoint(n=int(n), capability=float(cap), analytic_at_n=reference, above_curve=cap >= reference))

    for v in crossings:
        status = "✓" if v.passed else "✗"
        logger.info(f"{status} mu={model.mu_frac} target {v.target}: analytic n={v.n_analytic}, MC n={v.n_mc}")
    return TheoryValidation(curve=curve, crossings=crossings, points=points)
