"""
检测能力的蒙特卡洛模拟

每次试验：
1. 为 n 个传感器各抽一个 C_i/m ~ N(mu_frac, sigma_frac²)，截断到 [0, 1]
2. 每个传感器以概率 C_i/m 独立检测每种分析物
3. 统计量：全部 m 种都被检测到（all_detected，与解析式一致）或被检测到的比例（fraction）

第 t 次试验的随机源为 (seed, "mc", n, t)，按试验分块并行，结果与 worker 数无关。
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from src.core.errors import ParameterError
from src.core.models import CapabilityModel, Estimator
from src.core.parallel import run_parallel
from src.core.seeding import make_rng

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95


def trial_statistic(n: int, model: CapabilityModel, rng: np.random.Generator, estimator: Estimator) -> float:
    """单次试验"""
    if n == 0:
        return 0.0
    per_sensor = np.clip(rng.normal(model.mu_frac, model.sigma_frac, size=n), 0.0, 1.0)
    detected = rng.random((n, model.m)) < per_sensor[:, None]
    covered = detected.any(axis=0)
    if estimator == Estimator.FRACTION_DETECTED:
        return float(covered.mean())
    return float(covered.all())


def _trial_block(n: int, model: CapabilityModel, start: int, stop: int, seed: int,
                 estimator: Estimator) -> np.ndarray:
    return np.array([trial_statistic(n, model, make_rng(seed, "mc", n, t), estimator) for t in range(start, stop)])


def confidence_interval(values: np.ndarray, confidence: float = CONFIDENCE) -> Tuple[float, float, float]:
    """
    正态近似置信区间 mean ± z·s/√T，截断到 [0, 1]

    只有一次试验时区间为 [0, 1]。
    """
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0, 1.0
    z = float(norm.ppf(0.5 + confidence / 2.0))
    half = z * float(np.std(values, ddof=1)) / np.sqrt(values.size)
    return mean, max(0.0, mean - half), min(1.0, mean + half)


def mc_samples(n: int, model: CapabilityModel, trials: int, seed: int,
               estimator: Estimator = Estimator.ALL_DETECTED, workers: int = 1) -> np.ndarray:
    """全部试验的统计量（按试验编号排列）"""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    blocks = max(1, min(workers, trials))
    edges = np.linspace(0, trials, blocks + 1).astype(int)
    tasks = [(n, model, int(a), int(b), seed, estimator) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    return np.concatenate(run_parallel(_trial_block, tasks, workers))


def mc_capability(n: int, model: CapabilityModel, trials: int, seed: int,
                  estimator: Estimator = Estimator.ALL_DETECTED,
                  workers: int = 1) -> Tuple[float, Tuple[float, float]]:
    """
    Returns:
        (均值, (95% 置信下限, 上限))
    """
    mean, lo, hi = confidence_interval(mc_samples(n, model, trials, seed, estimator, workers))
    return mean, (lo, hi)


def mc_curve(n_values: Sequence[int], model: CapabilityModel, trials: int, seed: int,
             estimator: Estimator = Estimator.ALL_DETECTED,
             workers: int = 1) -> Tuple[List[float], List[float], List[float]]:
    """对一组 n 做模拟，返回 (均值, 下限, 上限) 三个列表"""
    means, lows, highs = [], [], []
    for n in n_values:
        mean, (lo, hi) = mc_capability(int(n), model, trials, seed, estimator, workers)
        means.append(mean)
        lows.append(lo)
        highs.append(hi)
    logger.debug(f"MC curve mu={model.mu_frac}: {len(means)} points, {trials} trials each")
    return means, lows, highs
