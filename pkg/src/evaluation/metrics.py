"""
混淆矩阵与宏/微平均指标

约定：
- 类别 = 真实标签与预测标签的并集，按字符串排序
- 0/0 的精确率或召回率记为 0（不跳过），缺席的类别会拉低宏平均
- 单标签多分类下，微平均 P = R = F1 = 准确率
"""

from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from src.core.errors import ShapeError
from src.core.models import ConfusionMatrix, ModelScorecard
from src.data.labels import MixtureLabel, label_text

LabelLike = Union[str, MixtureLabel]


def _texts(labels: Sequence[LabelLike]) -> List[str]:
    return [label_text(lb) for lb in labels]


def confusion(truth: Sequence[LabelLike], pred: Sequence[LabelLike]) -> ConfusionMatrix:
    """
    计算混淆矩阵（行 = 真实，列 = 预测）

    Raises:
        ShapeError: 长度不一致或为空
    """
    t, p = _texts(truth), _texts(pred)
    if len(t) != len(p):
        raise ShapeError(f"truth has {len(t)} labels but pred has {len(p)}")
    if not t:
        raise ShapeError("cannot build a confusion matrix from zero rows")

    classes = sorted(set(t) | set(p))
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    np.add.at(counts, ([index[v] for v in t], [index[v] for v in p]), 1)
    return ConfusionMatrix(classes=classes, counts=counts.tolist())


def per_class_scores(cm: ConfusionMatrix) -> Dict[str, np.ndarray]:
    """逐类别 precision / recall / f1"""
    counts = cm.as_array().astype(float)
    tp = np.diag(counts)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    f1 = np.divide(2.0 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)
    return {"precision": precision, "recall": recall, "f1": f1}


def _unit(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def score(cm: ConfusionMatrix) -> ModelScorecard:
    """七项指标"""
    counts = cm.as_array()
    total = counts.sum()
    if total == 0:
        raise ShapeError("confusion matrix is empty")
    per_class = per_class_scores(cm)
    accuracy = _unit(np.trace(counts) / total)
    return ModelScorecard(
        accuracy=accuracy,
        macro_precision=_unit(per_class["precision"].mean()),
        macro_recall=_unit(per_class["recall"].mean()),
        macro_f1=_unit(per_class["f1"].mean()),
        micro_precision=accuracy,
        micro_recall=accuracy,
        micro_f1=accuracy,
    )


def macro_f1(truth: Sequence[LabelLike], pred: Sequence[LabelLike]) -> float:
    return score(confusion(truth, pred)).macro_f1


def prediction_rows(truth: Sequence[LabelLike], pred: Sequence[LabelLike]) -> pd.DataFrame:
    """逐行预测明细，用于导出"""
    t, p = _texts(truth), _texts(pred)
    if len(t) != len(p):
        raise ShapeError(f"truth has {len(t)} labels but pred has {len(p)}")
    return pd.DataFrame({
        "row": np.arange(len(t)),
        "truth": t,
        "pred": p,
        "correct": [a == b for a, b in zip(t, p)],
    })


def confusion_frame(cm: ConfusionMatrix, normalized: bool = False) -> pd.DataFrame:
    """画图用的宽表：行 = 真实类别，列 = 预测类别"""
    data = cm.row_normalized if normalized else cm.counts
    frame = pd.DataFrame(data, index=cm.classes, columns=cm.classes)
    frame.index.name = "truth"
    return frame
