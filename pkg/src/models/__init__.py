"""
Model 模块 - 八种可解释分类器

统一契约：fit / predict / feature_importance
"""

from .base import BaseClassifier, TrainedModel, normalize_importance
from .factory import ModelFactory, feature_importance, fit, fit_with_overrides, predict
from .importance import permutation_importance
from .params import HyperParams, make_params
from .persistence import load_model, save_model

__all__ = [
    "BaseClassifier",
    "HyperParams",
    "ModelFactory",
    "TrainedModel",
    "feature_importance",
    "fit",
    "fit_with_overrides",
    "load_model",
    "make_params",
    "normalize_importance",
    "permutation_importance",
    "predict",
    "save_model",
]
