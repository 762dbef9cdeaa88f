"""
分层划分

每个类别单独洗牌，取 ceil(fraction * count) 行进训练集，
并保证两边至少各 1 行。同一 seed 永远得到同一划分。
"""

import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from src.core.models import SplitSpec
from .dataset import LabeledDataset

logger = logging.getLogger(__name__)


def train_count(count: int, fraction: float) -> int:
    """某类别进训练集的行数：clamp(ceil(fraction·count), 1, count-1)"""
    raw = math.ceil(fraction * count - 1e-9)
    return min(max(raw, 1), count - 1)


def stratified_indices(labels: np.ndarray, spec: SplitSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    计算分层划分的行号。

    Returns:
        (train_rows, test_rows)，各自升序
    """
    rng = np.random.default_rng(spec.seed)
    by_class: Dict[str, List[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)

    train: List[int] = []
    test: List[int] = []
    for label in sorted(by_class):
        rows = np.asarray(by_class[label])
        shuffled = rows[rng.permutation(len(rows))]
        k = train_count(len(rows), spec.train_fraction)
        train.extend(shuffled[:k].tolist())
        test.extend(shuffled[k:].tolist())
    return np.sort(np.asarray(train, dtype=int)), np.sort(np.asarray(test, dtype=int))


def stratified_split(ds: LabeledDataset, spec: SplitSpec) -> Tuple[LabeledDataset, LabeledDataset]:
    """
    分层划分训练/测试集。

    Raises:
        StratificationError: 存在只有 1 行的类别
    """
    ds.check_stratifiable()
    train_rows, test_rows = stratified_indices(ds.label_strings, spec)
    logger.debug(f"split seed={spec.seed}: train={len(train_rows)} test={len(test_rows)}")
    return ds.subset(train_rows), ds.subset(test_rows)
