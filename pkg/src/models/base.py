"""
分类器抽象基类

设计原则：
1. 统一接口 - 八种模型都只暴露 fit / decision_function / feature_importance
2. 状态可导出 - get_state / set_state 只用 JSON 友好的类型，持久化不依赖 pickle
3. 训练好的模型不可变 - TrainedModel 构造后可以跨线程共享，predict 可重入

标签在这一层已经是整数下标（对应 TrainedModel.classes），
字符串标签的转换放在 TrainedModel 里做。
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import ShapeError
from src.core.models import ModelKind
from src.data.labels import MixtureLabel
from .params import HyperParams

logger = logging.getLogger(__name__)


def normalize_importance(raw: np.ndarray) -> np.ndarray:
    """负值截为 0 后归一化到和为 1；全 0 时返回均匀分布"""
    values = np.clip(np.nan_to_num(np.asarray(raw, dtype=float)), 0.0, None)
    total = values.sum()
    if values.size == 0:
        return values
    if total <= 0.0:
        return np.full(values.shape, 1.0 / values.size)
    return values / total


class BaseClassifier(ABC):
    """
    分类器抽象基类

    子类实现具体训练算法，y 是 0..n_classes-1 的整数下标
    """

    kind: ClassVar[ModelKind]

    def __init__(self, params: HyperParams):
        self.params = params
        self.n_features: int = 0
        self.n_classes: int = 0
        self.converged: bool = True
        self.warnings: List[str] = []

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int, workers: int = 1) -> "BaseClassifier":
        """
        训练

        Args:
            X: 特征矩阵 rows × n（原始尺度）
            y: 类别下标
            n_classes: 类别数
            workers: 可用 worker 数（树集成按树并行）
        """

    @abstractmethod
    def decision_function(self, X: np.ndarray) -> np.ndarray:
        """每个类别的得分 rows × n_classes，argmax 即预测"""

    def predict_indices(self, X: np.ndarray) -> np.ndarray:
        # argmax 取第一个最大值：平票给下标最小的类别
        scores = self.decision_function(X)
        if scores.shape[0] == 0:
            return np.zeros(0, dtype=int)
        return np.argmax(scores, axis=1)

    def feature_importance(self) -> Optional[np.ndarray]:
        """模型自带的原始重要性；返回 None 表示由调用方做置换重要性"""
        return None

    @abstractmethod
    def get_state(self) -> Dict[str, Any]:
        """导出训练得到的参数（只含 list / float / int / str）"""

    @abstractmethod
    def set_state(self, state: Dict[str, Any]) -> None:
        """从 get_state 的结果恢复"""

    def _flag_not_converged(self, message: str) -> None:
        self.converged = False
        self.warnings.append(message)
        logger.warning(f"⚠️  {self.kind.value}: {message}")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """
    训练好的模型

    classes 是排好序的标签字符串，importance 长度等于传感器数、非负、和为 1。
    """
    kind: ModelKind
    params: HyperParams
    classes: Tuple[str, ...]
    sensor_ids: Tuple[str, ...]
    estimator: BaseClassifier
    importance: np.ndarray
    converged: bool = True
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        importance = np.array(self.importance, dtype=float, copy=True)
        if importance.shape != (len(self.sensor_ids),):
            raise ShapeError(f"importance has shape {importance.shape}, expected ({len(self.sensor_ids)},)")
        importance.setflags(write=False)
        object.__setattr__(self, "importance", importance)

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_ids)

    def _check_width(self, features: np.ndarray) -> np.ndarray:
        X = np.asarray(features, dtype=float)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, self.n_sensors)
        if X.ndim != 2 or X.shape[1] != self.n_sensors:
            raise ShapeError(f"expected {self.n_sensors} feature columns, got shape {X.shape}")
        return X

    def predict_indices(self, features: np.ndarray) -> np.ndarray:
        X = self._check_width(features)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=int)
        return self.estimator.predict_indices(X)

    def predict_strings(self, features: np.ndarray) -> List[str]:
        return [self.classes[i] for i in self.predict_indices(features)]

    def predict(self, features: np.ndarray) -> List[MixtureLabel]:
        """每行一个标签，只会返回 classes 中的标签"""
        return [MixtureLabel.parse(s) for s in self.predict_strings(features)]
