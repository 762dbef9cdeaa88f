"""
矩阵测量模型与合成数据

测量模型：
- 灵敏度矩阵 D (n × m)，稀疏、非负
- 样本矩阵 X = diag(A_11 ... A_mm)
- 单次测量 M = D·X，第 i 个传感器的读数 R_i = Σ_j M_ij（可加高斯噪声）

线性、无交叉反应、无漂移/饱和，这些都是模型本身的假设。
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import ParameterError, ShapeError
from src.core.seeding import derive_seed
from .dataset import LabeledDataset
from .labels import ANALYTE_ORDER, MixtureLabel

logger = logging.getLogger(__name__)

# 非零判定的绝对容差
NONZERO_TOL = 1e-12

SENSITIVITY_LOW = 0.5
SENSITIVITY_HIGH = 1.5


# ==================== 数据结构 ====================

@dataclass(frozen=True, eq=False)
class SensitivityMatrix:
    """灵敏度矩阵 D，mask 为 False 的位置必为 0"""
    entries: np.ndarray
    sparsity_mask: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float, copy=True)
        mask = np.array(self.sparsity_mask, dtype=bool, copy=True)
        if entries.ndim != 2 or entries.shape != mask.shape:
            raise ShapeError(f"entries {entries.shape} and mask {mask.shape} must be equal 2-D shapes")
        if np.any(entries < 0):
            raise ParameterError("sensitivities must be non-negative")
        if np.any(entries[~mask] != 0):
            raise ParameterError("entries outside the sparsity mask must be zero")
        entries.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "sparsity_mask", mask)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def from_entries(cls, entries: np.ndarray) -> "SensitivityMatrix":
        entries = np.asarray(entries, dtype=float)
        return cls(entries=entries, sparsity_mask=np.abs(entries) > NONZERO_TOL)


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """样本矩阵 X 的对角线（分析物含量，非负）"""
    diagonal: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diagonal, dtype=float, copy=True).ravel()
        if np.any(diag < 0):
            raise ParameterError("analyte amounts must be non-negative")
        diag.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)

    @property
    def m(self) -> int:
        return self.diagonal.shape[0]

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def scaled(self, alpha: float) -> "SampleMatrix":
        return SampleMatrix(self.diagonal * alpha)


@dataclass(frozen=True, eq=False)
class Measurement:
    """单次测量：response = D·X，readouts 为行和"""
    response: np.ndarray
    readouts: np.ndarray


# ==================== 合成 ====================

def synth_sensitivity(n: int, m: int, density: float, seed: int,
                      mask: Optional[np.ndarray] = None) -> SensitivityMatrix:
    """
    生成稀疏灵敏度矩阵。

    每个元素以概率 density 非零，非零幅值 ~ U(0.5, 1.5)。

    Args:
        n: 传感器数
        m: 分析物数
        density: 非零概率，(0, 1]
        seed: 随机种子
        mask: 强制使用的稀疏模式（比如单位阵），给定时忽略 density 抽样
    """
    if n < 1 or m < 1:
        raise ParameterError(f"n and m must be >= 1, got n={n}, m={m}")
    if not 0.0 < density <= 1.0:
        raise ParameterError(f"density must lie in (0, 1], got {density}")

    rng = np.random.default_rng(seed)
    drawn_mask = rng.random((n, m)) < density
    magnitudes = rng.uniform(SENSITIVITY_LOW, SENSITIVITY_HIGH, size=(n, m))
    if mask is not None:
        drawn_mask = np.asarray(mask, dtype=bool)
        if drawn_mask.shape != (n, m):
            raise ShapeError(f"forced mask must be {n}x{m}, got {drawn_mask.shape}")
    return SensitivityMatrix(entries=np.where(drawn_mask, magnitudes, 0.0), sparsity_mask=drawn_mask)


def synth_measure(D: SensitivityMatrix, X: SampleMatrix, noise_sd: float, seed: int) -> Measurement:
    """
    M = D·X，读数为行和加 N(0, noise_sd²) 噪声。
    """
    if D.m != X.m:
        raise ShapeError(f"D is {D.n}x{D.m} but X has {X.m} diagonal entries")
    if noise_sd < 0:
        raise ParameterError(f"noise_sd must be >= 0, got {noise_sd}")
    # 对角矩阵右乘 = 按列缩放
    response = D.entries * X.diagonal[None, :]
    readouts = response.sum(axis=1)
    if noise_sd > 0:
        readouts = readouts + np.random.default_rng(seed).normal(0.0, noise_sd, size=D.n)
    return Measurement(response=response, readouts=readouts)


def default_sensor_ids(n: int) -> Tuple[str, ...]:
    return tuple(f"S{i + 1}" for i in range(n))


def synth_dataset(D: SensitivityMatrix, mixtures: Sequence[Tuple[SampleMatrix, MixtureLabel]],
                  repeats: int, noise_sd: float, seed: int,
                  sensor_ids: Optional[Sequence[str]] = None) -> LabeledDataset:
    """
    每个混合物重复测量 repeats 次，读数作为特征。

    行顺序：混合物优先，重复次数其次。每次测量的噪声种子由 (seed, 混合物序号, 重复序号) 派生。
    """
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    if not mixtures:
        raise ParameterError("mixture list is empty")

    rows: List[np.ndarray] = []
    labels: List[MixtureLabel] = []
    conc: List[np.ndarray] = []
    for i, (sample, label) in enumerate(mixtures):
        padded = np.zeros(len(ANALYTE_ORDER))
        padded[: min(sample.m, len(ANALYTE_ORDER))] = sample.diagonal[: len(ANALYTE_ORDER)]
        for r in range(repeats):
            meas = synth_measure(D, sample, noise_sd, derive_seed(seed, "measure", i, r))
            rows.append(meas.readouts)
            labels.append(label)
            conc.append(padded)

    ids = tuple(sensor_ids) if sensor_ids is not None else default_sensor_ids(D.n)
    return LabeledDataset(
        sensor_ids=ids,
        features=np.vstack(rows),
        labels=tuple(labels),
        concentrations=np.vstack(conc) if D.m <= len(ANALYTE_ORDER) else None,
    )


def factorial_mixtures(m: int, ranges: Dict[str, Sequence[float]], seed: int,
                       include_empty: bool = True, scale: float = 1.0) -> List[Tuple[SampleMatrix, MixtureLabel]]:
    """
    前 m 种分析物的全因子存在性设计。

    每个混合物里存在的分析物浓度 ~ U(range) × scale，整个混合物只抽一次。
    """
    if not 1 <= m <= len(ANALYTE_ORDER):
        raise ParameterError(f"m must lie in [1, {len(ANALYTE_ORDER)}], got {m}")
    codes = ANALYTE_ORDER[:m]
    rng = np.random.default_rng(seed)
    mixtures: List[Tuple[SampleMatrix, MixtureLabel]] = []
    for presence in itertools.product((False, True), repeat=m):
        if not any(presence) and not include_empty:
            continue
        diag = np.zeros(m)
        for j, (code, on) in enumerate(zip(codes, presence)):
            lo, hi = ranges.get(code.value, (1.0, 1.0))
            value = rng.uniform(lo, hi)
            if on:
                diag[j] = value * scale
        label = MixtureLabel(frozenset(c for c, on in zip(codes, presence) if on))
        mixtures.append((SampleMatrix(diag), label))
    return mixtures


def planted_sensitivity(n: int, m: int, informative: Sequence[int], density: float, seed: int) -> SensitivityMatrix:
    """
    只有 informative 中的传感器有响应，其余行全 0。

    有响应的行保证至少一个非零元素，每种分析物至少被一个有响应的传感器检测到。
    """
    informative = sorted(set(int(i) for i in informative))
    if any(i < 0 or i >= n for i in informative):
        raise ParameterError(f"informative sensor indices must lie in [0, {n}), got {informative}")
    if not informative:
        raise ParameterError("at least one informative sensor is required")

    live = synth_sensitivity(len(informative), m, density, seed)
    entries = np.array(live.entries)
    rng = np.random.default_rng(derive_seed(seed, "planted-fill"))
    for row in range(entries.shape[0]):
        if not np.any(entries[row] > 0):
            entries[row, rng.integers(m)] = rng.uniform(SENSITIVITY_LOW, SENSITIVITY_HIGH)
    for col in range(m):
        if not np.any(entries[:, col] > 0):
            entries[rng.integers(entries.shape[0]), col] = rng.uniform(SENSITIVITY_LOW, SENSITIVITY_HIGH)

    full = np.zeros((n, m))
    full[informative] = entries
    return SensitivityMatrix.from_entries(full)


# ==================== 检测能力 ====================

def perfect_measurement(M: Measurement, k: int) -> bool:
    """
    前 k 个传感器的响应按列求和后，每一列都非零即为完美测量。
    """
    n = M.response.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    column_sums = M.response[:k].sum(axis=0)
    return bool(np.all(np.abs(column_sums) > NONZERO_TOL))


def sensor_capability(D: SensitivityMatrix) -> np.ndarray:
    """单个传感器的检测能力 = 所在行非零元素的比例"""
    return (np.abs(D.entries) > NONZERO_TOL).mean(axis=1)


def array_capability(M: Measurement, k: Optional[int] = None) -> float:
    """阵列检测能力 = 前 k 行响应列和中非零元素的比例"""
    k = M.response.shape[0] if k is None else k
    column_sums = M.response[:k].sum(axis=0)
    return float(np.mean(np.abs(column_sums) > NONZERO_TOL))
