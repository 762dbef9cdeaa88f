"""
Evaluation 模块 - 混淆矩阵与宏/微平均指标
"""

from .evaluator import evaluate
from .metrics import confusion, confusion_frame, macro_f1, per_class_scores, prediction_rows, score

__all__ = [
    "confusion",
    "confusion_frame",
    "evaluate",
    "macro_f1",
    "per_class_scores",
    "prediction_rows",
    "score",
]
