"""
置换重要性（与模型无关）

importance[j] = 各次打乱第 j 列后宏 F1 下降量的平均，截到 >= 0 后归一化。
第 r 次打乱第 j 列的随机源由 (seed, "perm", r, j) 派生。
"""

import logging

import numpy as np

from src.core.errors import ParameterError
from src.core.seeding import make_rng
from src.data.dataset import LabeledDataset
from src.evaluation.metrics import macro_f1
from .base import TrainedModel, normalize_importance

logger = logging.getLogger(__name__)


def permutation_drops(model: TrainedModel, data: LabeledDataset, repeats: int, seed: int) -> np.ndarray:
    """未归一化的平均宏 F1 下降量（可能为负）"""
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    truth = list(data.label_strings)
    X = np.array(data.features)
    baseline = macro_f1(truth, model.predict_strings(X))

    drops = np.zeros(data.n_sensors)
    for j in range(data.n_sensors):
        original = X[:, j].copy()
        total = 0.0
        for r in range(repeats):
            X[:, j] = original[make_rng(seed, "perm", r, j).permutation(original.size)]
            total += baseline - macro_f1(truth, model.predict_strings(X))
        X[:, j] = original
        drops[j] = total / repeats
    logger.debug(f"permutation importance: baseline macro F1 {baseline:.4f}, max drop {drops.max():.4f}")
    return drops


def permutation_importance(model: TrainedModel, data: LabeledDataset, repeats: int, seed: int) -> np.ndarray:
    """
    置换重要性

    Args:
        model: 训练好的模型
        data: 评估用数据（传感器列须与模型一致）
        repeats: 每列打乱次数
        seed: 随机种子
    Returns:
        长度为传感器数、非负、和为 1 的向量（全 0 时为均匀分布）
    """
    return normalize_importance(permutation_drops(model, data, repeats, seed))
