"""
数据模型

定义流水线各模块之间传递、需要序列化成 JSON 的核心数据结构。

设计亮点：
1. Pydantic BaseModel - 类型校验 + 一键 model_dump_json()
2. 枚举类型 - ModelKind 限制只有八种模型
3. 不可变 - 报告类模型 frozen，构造后可以放心跨线程共享

带 numpy 矩阵的数据（LabeledDataset、SensitivityMatrix 等）放在 src.data，
这里只放报告和策略类模型。
"""

from enum import Enum
from typing import ClassVar, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ==================== 模型种类 ====================

class ModelKind(str, Enum):
    """八种可解释分类器"""
    LR = "LR"
    EN = "EN"
    L_SVC = "L-SVC"
    RBF_SVC = "RBF-SVC"
    DT = "DT"
    ET = "ET"
    RF = "RF"
    XGB = "XGB"


ALL_KINDS: Tuple[ModelKind, ...] = tuple(ModelKind)


# ==================== 数据划分 ====================

class SplitSpec(BaseModel):
    """分层划分参数"""
    model_config = ConfigDict(frozen=True)

    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)


# ==================== 评估相关模型 ====================

class ConfusionMatrix(BaseModel):
    """
    混淆矩阵

    行 = 真实类别，列 = 预测类别
    """
    model_config = ConfigDict(frozen=True)

    classes: List[str]
    counts: List[List[int]]

    @model_validator(mode="after")
    def _check_square(self) -> "ConfusionMatrix":
        c = len(self.classes)
        if len(self.counts) != c or any(len(row) != c for row in self.counts):
            raise ValueError(f"counts must be {c}x{c}")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64).reshape(len(self.classes), len(self.classes))

    @property
    def total(self) -> int:
        return int(self.as_array().sum())

    @property
    def row_normalized(self) -> List[List[float]]:
        """每行归一化；没有真实样本的类别整行为 0"""
        counts = self.as_array().astype(float)
        sums = counts.sum(axis=1, keepdims=True)
        normalized = np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)
        return normalized.tolist()


class ModelScorecard(BaseModel):
    """单个模型的宏/微平均指标"""
    model_config = ConfigDict(frozen=True)

    accuracy: float = Field(ge=0.0, le=1.0)
    macro_precision: float = Field(ge=0.0, le=1.0)
    macro_recall: float = Field(ge=0.0, le=1.0)
    macro_f1: float = Field(ge=0.0, le=1.0)
    micro_precision: float = Field(ge=0.0, le=1.0)
    micro_recall: float = Field(ge=0.0, le=1.0)
    micro_f1: float = Field(ge=0.0, le=1.0)

    GATE_FIELDS: ClassVar[Tuple[str, ...]] = (
        "macro_precision", "macro_recall", "macro_f1",
        "micro_precision", "micro_recall", "micro_f1",
    )

    def gate(self, metric: str = "min_all") -> float:
        """
        委员会准入用的门控指标。

        "min_all" 取六个宏/微指标的最小值，否则取同名字段。
        """
        if metric == "min_all":
            return min(getattr(self, name) for name in self.GATE_FIELDS)
        if metric not in self.model_fields:
            raise ValueError(f"unknown scorecard metric: {metric}")
        return getattr(self, metric)

    @classmethod
    def mean_of(cls, cards: List["ModelScorecard"]) -> "ModelScorecard":
        """逐字段平均"""
        if not cards:
            raise ValueError("cannot average an empty list of scorecards")
        fields = {
            name: float(np.mean([getattr(card, name) for card in cards]))
            for name in cls.model_fields
        }
        return cls(**fields)

    @classmethod
    def std_of(cls, cards: List["ModelScorecard"]) -> Dict[str, float]:
        """逐字段标准差（总体标准差）"""
        return {
            name: float(np.std([getattr(card, name) for card in cards]))
            for name in cls.model_fields
        }


# ==================== 委员会相关模型 ====================

class CommitteePolicy(BaseModel):
    """委员会准入与投票策略"""
    model_config = ConfigDict(frozen=True)

    admission_threshold: float = Field(default=0.7, ge=0.0, le=1.0)
    metric: str = "min_all"
    rank_depth: int = Field(default=5, ge=1)
    repeats: int = Field(default=5, ge=1)
    kinds: Tuple[ModelKind, ...] = ALL_KINDS
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)

    @field_validator("metric")
    @classmethod
    def _known_metric(cls, value: str) -> str:
        if value != "min_all" and value not in ModelScorecard.model_fields:
            raise ValueError(f"unknown gating metric: {value}")
        return value


class SensorRanking(BaseModel):
    """
    委员会投票结果

    selected 包含全部传感器，按加权得分降序，得分相同按 sensor_ids 中的列顺序。
    """
    model_config = ConfigDict(frozen=True)

    sensor_ids: List[str]
    rank_depth: int
    per_model_ranks: Dict[str, List[str]]
    model_f1: Dict[str, float]
    weighted_scores: Dict[str, float]
    selected: List[str]

    def top(self, k: int) -> List[str]:
        return list(self.selected[:k])


# ==================== 工作模式相关模型 ====================

class ModeConfig(BaseModel):
    """工作模式：blue 全开，green-k 只开前 k 个传感器"""
    model_config = ConfigDict(frozen=True)

    name: str
    active_sensors: List[str]
    readout_model_kind: ModelKind = ModelKind.XGB

    @property
    def is_blue(self) -> bool:
        return self.name == "blue"


class ModeEntry(BaseModel):
    """单个模式的评估结果"""
    model_config = ConfigDict(frozen=True)

    mode: ModeConfig
    repeats: List[ModelScorecard]
    mean: ModelScorecard
    std: Dict[str, float]
    f1_reduction_vs_blue: float = 0.0
    energy_savings: float = Field(default=0.0, ge=0.0, le=1.0)


class ModeReport(BaseModel):
    """Blue/Green 模式对比报告"""
    model_config = ConfigDict(frozen=True)

    total_sensors: int
    entries: List[ModeEntry]

    def entry(self, name: str) -> ModeEntry:
        for e in self.entries:
            if e.mode.name == name:
                return e
        raise KeyError(name)


# ==================== 理论相关模型 ====================

class Estimator(str, Enum):
    """MC 单次试验统计量"""
    ALL_DETECTED = "all_detected"      # m 个分析物全部被至少一个传感器检测到
    FRACTION_DETECTED = "fraction"     # 被检测到的分析物比例


class CapabilityModel(BaseModel):
    """
    传感器检测能力的高斯模型

    C_i/m ~ N(mu_frac, sigma_frac²)，采样后截断到 [0, 1]
    """
    model_config = ConfigDict(frozen=True)

    mu_frac: float = Field(default=0.62, gt=0.0, le=1.0)
    sigma_frac: float = Field(default=0.1, ge=0.0)
    m: int = Field(default=6, ge=1)
    epsilon: float = Field(default=0.05, gt=0.0, lt=1.0)

    @property
    def capability(self) -> float:
        """定义关系 1 - ε = C"""
        return 1.0 - self.epsilon

    @classmethod
    def from_sensitivity(cls, sensitivity, sigma_frac: float = 0.1, **kwargs) -> "CapabilityModel":
        """
        从灵敏度矩阵估计 mu_frac。

        单个传感器的检测能力 = 其所在行非零元素的比例，mu_frac 取所有传感器的平均。
        只接受合成的 SensitivityMatrix（或同形状数组），不从原始电阻曲线拟合。
        """
        entries = np.asarray(getattr(sensitivity, "entries", sensitivity), dtype=float)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError("sensitivity must be a non-empty n x m matrix")
        per_sensor = (np.abs(entries) > 1e-12).mean(axis=1)
        mu = float(per_sensor.mean())
        if mu <= 0.0:
            raise ValueError("sensitivity matrix has no nonzero entries")
        return cls(mu_frac=mu, sigma_frac=sigma_frac, m=entries.shape[1], **kwargs)


class TheoryCurve(BaseModel):
    """解析曲线与 MC 曲线"""
    model_config = ConfigDict(frozen=True)

    mu_frac: float
    sigma_frac: float
    m: int
    estimator: Estimator
    trials: int
    n_values: List[int]
    analytic: List[float]
    mc_mean: List[float]
    mc_ci_low: List[float]
    mc_ci_high: List[float]

    @staticmethod
    def crossing(n_values: List[int], values: List[float], target: float) -> Optional[int]:
        """曲线第一次达到 target 的 n，未达到返回 None"""
        for n, v in zip(n_values, values):
            if v >= target:
                return n
        return None


class CrossingVerdict(BaseModel):
    """某个目标能力下解析/MC 交点的一致性"""
    model_config = ConfigDict(frozen=True)

    target: float
    n_analytic: Optional[int]
    n_mc: Optional[int]
    passed: bool


class GreenPoint(BaseModel):
    """叠加到理论曲线上的工作模式点"""
    model_config = ConfigDict(frozen=True)

    n: int
    capability: float
    analytic_at_n: float
    above_curve: bool


class TheoryValidation(BaseModel):
    """validate_green_modes 的输出"""
    model_config = ConfigDict(frozen=True)

    curve: TheoryCurve
    crossings: List[CrossingVerdict]
    points: List[GreenPoint]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.crossings)


