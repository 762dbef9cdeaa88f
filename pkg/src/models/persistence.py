"""
模型持久化

带版本号的 JSON 文档：种类、超参数、类别列表、传感器、重要性、训练得到的参数。
读回后的模型与原模型预测完全一致。
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from src.core.models import ModelKind
from .base import TrainedModel
from .factory import ModelFactory
from .params import make_params

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind.value,
        "params": model.params.model_dump(mode="json"),
        "classes": list(model.classes),
        "sensor_ids": list(model.sensor_ids),
        "importance": model.importance.tolist(),
        "converged": model.converged,
        "warnings": list(model.warnings),
        "state": model.estimator.get_state(),
    }


def model_from_dict(doc: Dict[str, Any]) -> TrainedModel:
    """
    Raises:
        ValueError: 版本号不支持
    """
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}, expected {FORMAT_VERSION}")
    kind = ModelKind(doc["kind"])
    params = make_params(kind, doc["params"])
    estimator = ModelFactory.create(kind, params)
    estimator.set_state(doc["state"])
    estimator.converged = bool(doc.get("converged", True))
    estimator.warnings = list(doc.get("warnings", []))
    return TrainedModel(
        kind=kind,
        params=params,
        classes=tuple(doc["classes"]),
        sensor_ids=tuple(doc["sensor_ids"]),
        estimator=estimator,
        importance=np.asarray(doc["importance"], dtype=float),
        converged=estimator.converged,
        warnings=tuple(estimator.warnings),
    )


def save_model(model: TrainedModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model)), encoding="utf-8")
    logger.debug(f"saved {model.kind.value} model to {path}")
    return path


def load_model(path: Union[str, Path]) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as f:
        return model_from_dict(json.load(f))
