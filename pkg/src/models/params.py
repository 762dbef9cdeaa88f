"""
超参数

每种模型一个 Pydantic 模型，构造时按取值范围校验，未知键直接报错。
论文没有公布超参数，这里的默认值就是文档化的默认值，都可以通过配置覆盖。
"""

from typing import Any, Dict, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.core.models import ModelKind


class HyperParams(BaseModel):
    """所有模型共有的参数"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=0, ge=0)


# ==================== 线性模型 ====================

class LogisticParams(HyperParams):
    """LR：一对多逻辑回归 + L2"""
    l2: float = Field(default=1e-4, ge=0.0)
    max_iter: int = Field(default=200, ge=1, le=100_000)
    tol: float = Field(default=1e-6, gt=0.0)


class ElasticNetParams(HyperParams):
    """EN：一对多逻辑回归 + L1/L2（近端梯度）"""
    l1: float = Field(default=1e-3, ge=0.0)
    l2: float = Field(default=1e-4, ge=0.0)
    max_iter: int = Field(default=200, ge=1, le=100_000)
    tol: float = Field(default=1e-6, gt=0.0)


class LinearSVCParams(HyperParams):
    """L-SVC：一对多 hinge 损失，次梯度下降"""
    l2: float = Field(default=1e-3, gt=0.0)
    eta0: float = Field(default=1.0, gt=0.0)
    max_iter: int = Field(default=200, ge=1, le=100_000)
    tol: float = Field(default=1e-6, gt=0.0)
    patience: int = Field(default=20, ge=1)


class RBFSVCParams(HyperParams):
    """RBF-SVC：核化对偶坐标上升"""
    C: float = Field(default=10.0, gt=0.0)
    gamma: Optional[float] = Field(default=None, gt=0.0)  # None = 中位数距离启发式
    max_iter: int = Field(default=50, ge=1, le=10_000)    # epoch 数
    tol: float = Field(default=1e-3, gt=0.0)
    max_samples: int = Field(default=2000, ge=2)
    perm_repeats: int = Field(default=5, ge=1)


# ==================== 树模型 ====================

MaxFeatures = Union[None, int, str]


def _check_max_features(value: MaxFeatures) -> MaxFeatures:
    if value is None:
        return value
    if isinstance(value, str):
        if value != "sqrt":
            raise ValueError(f"max_features must be 'sqrt', a positive int or None, got {value!r}")
        return value
    if value < 1:
        raise ValueError(f"max_features must be >= 1, got {value}")
    return value


class DecisionTreeParams(HyperParams):
    """DT：CART + Gini"""
    max_depth: Optional[int] = Field(default=None, ge=1, le=64)
    min_samples_split: int = Field(default=2, ge=2)
    min_samples_leaf: int = Field(default=1, ge=1)
    max_features: MaxFeatures = None

    @field_validator("max_features")
    @classmethod
    def _max_features_ok(cls, value: MaxFeatures) -> MaxFeatures:
        return _check_max_features(value)


class ForestParams(DecisionTreeParams):
    """RF：bootstrap + 特征子采样，多数投票"""
    n_estimators: int = Field(default=100, ge=1, le=5000)
    max_features: MaxFeatures = "sqrt"
    bootstrap: bool = True


class ExtraTreesParams(ForestParams):
    """ET：随机阈值树，默认不做 bootstrap"""
    bootstrap: bool = False


class BoostingParams(HyperParams):
    """XGB：softmax 目标的二阶梯度提升树"""
    n_estimators: int = Field(default=100, ge=1, le=5000)
    max_depth: int = Field(default=6, ge=1, le=16)
    learning_rate: float = Field(default=0.3, gt=0.0, le=1.0)
    reg_lambda: float = Field(default=1.0, ge=0.0)
    gamma: float = Field(default=0.0, ge=0.0)
    min_child_weight: float = Field(default=1.0, ge=0.0)
    max_bin: int = Field(default=64, ge=2, le=1024)


PARAMS_BY_KIND: Dict[ModelKind, Type[HyperParams]] = {
    ModelKind.LR: LogisticParams,
    ModelKind.EN: ElasticNetParams,
    ModelKind.L_SVC: LinearSVCParams,
    ModelKind.RBF_SVC: RBFSVCParams,
    ModelKind.DT: DecisionTreeParams,
    ModelKind.ET: ExtraTreesParams,
    ModelKind.RF: ForestParams,
    ModelKind.XGB: BoostingParams,
}


def make_params(kind: ModelKind, overrides: Optional[Dict[str, Any]] = None, seed: Optional[int] = None) -> HyperParams:
    """
    按种类构造超参数。

    Args:
        kind: 模型种类
        overrides: 覆盖默认值的键值（未知键会被拒绝）
        seed: 若给定，覆盖 overrides 里的 seed
    Raises:
        pydantic.ValidationError: 取值超出范围或键未知
    """
    values = dict(overrides or {})
    if seed is not None:
        values["seed"] = seed
    return PARAMS_BY_KIND[ModelKind(kind)].model_validate(values)
