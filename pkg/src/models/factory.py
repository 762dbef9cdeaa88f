"""
模型工厂

根据 ModelKind 创建具体分类器，并提供 fit / predict / feature_importance 三个统一入口。
业务代码（委员会、工作模式）只认 ModelKind，不直接 import 具体算法。
"""

import logging
from dataclasses import replace
from typing import Any, Dict, List, Optional, Type

import numpy as np

from src.core.errors import DegenerateDataError
from src.core.models import ModelKind
from src.data.dataset import LabeledDataset
from src.data.labels import MixtureLabel
from .base import BaseClassifier, TrainedModel, normalize_importance
from .boosting import GradientBoostingClassifier
from .ensemble import ExtraTreesClassifier, RandomForestClassifier
from .importance import permutation_importance
from .kernel import RBFSVCClassifier
from .linear import ElasticNetClassifier, LinearSVCClassifier, LogisticRegressionClassifier
from .params import PARAMS_BY_KIND, HyperParams, make_params
from .tree import DecisionTreeClassifier

logger = logging.getLogger(__name__)


class ModelFactory:
    """
    模型工厂类

    负责根据种类创建分类器实例
    """

    _registry: Dict[ModelKind, Type[BaseClassifier]] = {
        ModelKind.LR: LogisticRegressionClassifier,
        ModelKind.EN: ElasticNetClassifier,
        ModelKind.L_SVC: LinearSVCClassifier,
        ModelKind.RBF_SVC: RBFSVCClassifier,
        ModelKind.DT: DecisionTreeClassifier,
        ModelKind.ET: ExtraTreesClassifier,
        ModelKind.RF: RandomForestClassifier,
        ModelKind.XGB: GradientBoostingClassifier,
    }

    @classmethod
    def create(cls, kind: ModelKind, params: Optional[HyperParams] = None) -> BaseClassifier:
        """
        创建未训练的分类器

        Raises:
            ValueError: 种类未注册
            TypeError: 超参数类型与种类不符
        """
        kind = ModelKind(kind)
        if kind not in cls._registry:
            raise ValueError(f"Unknown model kind: {kind}. Available: {cls.list_kinds()}")
        params = params if params is not None else make_params(kind)
        expected = PARAMS_BY_KIND[kind]
        if not isinstance(params, expected):
            raise TypeError(f"{kind.value} expects {expected.__name__}, got {type(params).__name__}")
        return cls._registry[kind](params)

    @classmethod
    def register(cls, kind: ModelKind, classifier_class: Type[BaseClassifier]) -> None:
        """替换某个种类的实现"""
        cls._registry[ModelKind(kind)] = classifier_class

    @classmethod
    def list_kinds(cls) -> List[str]:
        return [k.value for k in cls._registry]


def fit(kind: ModelKind, params: Optional[HyperParams], train: LabeledDataset, workers: int = 1) -> TrainedModel:
    """
    训练一个模型

    Args:
        kind: 模型种类
        params: 超参数（None = 默认值）
        train: 训练集
        workers: 树集成可用的 worker 数，不影响结果
    Returns:
        TrainedModel
    Raises:
        DegenerateDataError: 训练集为空或只有一个类别
    """
    kind = ModelKind(kind)
    if train.n_rows == 0:
        raise DegenerateDataError(f"{kind.value}: training set is empty")
    classes = tuple(train.classes)
    if len(classes) < 2:
        raise DegenerateDataError(f"{kind.value}: training set has a single class {classes}")

    estimator = ModelFactory.create(kind, params)
    lookup = {c: i for i, c in enumerate(classes)}
    y = np.asarray([lookup[s] for s in train.label_strings], dtype=np.int64)
    estimator.fit(np.asarray(train.features), y, len(classes), workers=workers)

    model = TrainedModel(
        kind=kind,
        params=estimator.params,
        classes=classes,
        sensor_ids=train.sensor_ids,
        estimator=estimator,
        importance=np.full(train.n_sensors, 1.0 / train.n_sensors),
        converged=estimator.converged,
        warnings=tuple(estimator.warnings),
    )

    raw = estimator.feature_importance()
    if raw is None:
        repeats = getattr(estimator.params, "perm_repeats", 5)
        importance = permutation_importance(model, train, repeats, estimator.params.seed)
    else:
        importance = normalize_importance(raw)
    return replace(model, importance=importance)


def predict(model: TrainedModel, features: np.ndarray) -> List[MixtureLabel]:
    """
    Raises:
        ShapeError: 列数与模型传感器数不一致
    """
    return model.predict(features)


def feature_importance(model: TrainedModel) -> np.ndarray:
    """长度为传感器数、非负、和为 1"""
    return np.array(model.importance)


def fit_with_overrides(kind: ModelKind, overrides: Optional[Dict[str, Any]], seed: int,
                       train: LabeledDataset, workers: int = 1) -> TrainedModel:
    """按配置覆盖项和派生种子训练（委员会和工作模式共用）"""
    return fit(kind, make_params(kind, overrides, seed=seed), train, workers=workers)


__all__ = ["ModelFactory", "feature_importance", "fit", "fit_with_overrides", "predict"]
