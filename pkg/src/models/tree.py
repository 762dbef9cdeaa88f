"""
CART 决策树（Gini）

树用扁平数组存储（feature / threshold / left / right / value），
预测时对整批样本按层向下走，不做逐样本递归。

分裂规则：
- 左子树取 x <= threshold
- 精确分裂的阈值取相邻两个不同取值的中点
- 增益相同（容差 1e-12）时取特征下标最小者，再取阈值最小者
- 节点不纯且存在合法分裂就分裂，哪怕增益为 0（XOR 需要这一步）
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.models import ModelKind
from .base import BaseClassifier
from .params import DecisionTreeParams, MaxFeatures

logger = logging.getLogger(__name__)

GAIN_TOL = 1e-12
VALUE_TOL = 1e-12


# ==================== 扁平树结构 ====================

def descend(feature: np.ndarray, threshold: np.ndarray, left: np.ndarray, right: np.ndarray,
            start: np.ndarray, X: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """
    从 start 节点出发走到叶子。

    Args:
        start: 每个 (树, 样本) 组合的起始节点
        rows: 与 start 对齐的样本行号
    Returns:
        叶子节点下标，形状同 start
    """
    node = np.array(start, dtype=np.int64, copy=True)
    while True:
        f = feature[node]
        active = np.flatnonzero(f >= 0)
        if active.size == 0:
            return node
        nd = node[active]
        go_left = X[rows[active], f[active]] <= threshold[nd]
        node[active] = np.where(go_left, left[nd], right[nd])


@dataclass
class TreeArrays:
    """单棵树；叶子的 feature 为 -1，value 每行一个节点"""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def apply(self, X: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        return descend(self.feature, self.threshold, self.left, self.right,
                       np.zeros(n, dtype=np.int64), X, np.arange(n))

    def to_state(self) -> Dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "TreeArrays":
        value = np.asarray(state["value"], dtype=float)
        if value.ndim == 1:
            value = value.reshape(-1, 1)
        return cls(
            feature=np.asarray(state["feature"], dtype=np.int64),
            threshold=np.asarray(state["threshold"], dtype=float),
            left=np.asarray(state["left"], dtype=np.int64),
            right=np.asarray(state["right"], dtype=np.int64),
            value=value,
        )


class PackedTrees:
    """多棵树拼成一组数组，一次走完所有树"""

    def __init__(self, trees: Sequence[TreeArrays]):
        sizes = [t.n_nodes for t in trees]
        offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64) if trees else np.zeros(0, np.int64)
        self.n_trees = len(trees)
        self.roots = offsets
        if trees:
            self.feature = np.concatenate([t.feature for t in trees])
            self.threshold = np.concatenate([t.threshold for t in trees])
            self.left = np.concatenate([np.where(t.left >= 0, t.left + off, -1) for t, off in zip(trees, offsets)])
            self.right = np.concatenate([np.where(t.right >= 0, t.right + off, -1) for t, off in zip(trees, offsets)])
            self.value = np.concatenate([t.value for t in trees], axis=0)
        else:
            self.feature = np.zeros(0, np.int64)
            self.threshold = np.zeros(0)
            self.left = self.right = np.zeros(0, np.int64)
            self.value = np.zeros((0, 1))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """返回 (n_trees, rows) 的全局叶子下标"""
        n = X.shape[0]
        start = np.repeat(self.roots, n)
        rows = np.tile(np.arange(n), self.n_trees)
        return descend(self.feature, self.threshold, self.left, self.right, start, X, rows).reshape(self.n_trees, n)


# ==================== 分裂搜索 ====================

def resolve_max_features(max_features: MaxFeatures, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    return min(int(max_features), n_features)


def _pick(gain: np.ndarray, valid: np.ndarray) -> Optional[Tuple[int, int]]:
    """
    在 (位置, 候选特征) 的增益表里选最优。

    列按特征下标升序排列，行按阈值升序排列，所以“第一列、第一行”即平票规则。
    """
    if not valid.any():
        return None
    masked = np.where(valid, gain, -np.inf)
    best = masked.max()
    cand = valid & (masked >= best - GAIN_TOL)
    col = int(np.flatnonzero(cand.any(axis=0))[0])
    row = int(np.flatnonzero(cand[:, col])[0])
    return row, col


def _child_impurity(n: float, left_counts: np.ndarray, n_left: np.ndarray, total: np.ndarray) -> np.ndarray:
    """左右子节点 Gini 之和（按样本数加权，未除以 n）"""
    right_counts = total - left_counts
    n_right = n - n_left
    with np.errstate(divide="ignore", invalid="ignore"):
        left_term = np.where(n_left > 0, (left_counts ** 2).sum(-1) / np.maximum(n_left, 1), 0.0)
        right_term = np.where(n_right > 0, (right_counts ** 2).sum(-1) / np.maximum(n_right, 1), 0.0)
    return n - left_term - right_term


def best_exact_split(Xn: np.ndarray, Yn: np.ndarray, feats: np.ndarray,
                     min_leaf: int) -> Optional[Tuple[int, float, float]]:
    """
    精确 CART 分裂。

    Returns:
        (feature, threshold, impurity_decrease) 或 None
    """
    n = Xn.shape[0]
    sub = Xn[:, feats]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    cum = np.cumsum(Yn[order], axis=0)[:-1]          # (n-1, f, c)
    total = Yn.sum(axis=0)
    n_left = np.arange(1, n, dtype=float)[:, None]

    parent = n - (total ** 2).sum() / n
    gain = parent - _child_impurity(float(n), cum, n_left, total)
    valid = (xs[1:] - xs[:-1] > VALUE_TOL) & (n_left >= min_leaf) & (n - n_left >= min_leaf)

    picked = _pick(gain, valid)
    if picked is None:
        return None
    row, col = picked
    threshold = 0.5 * (xs[row, col] + xs[row + 1, col])
    return int(feats[col]), float(threshold), float(max(gain[row, col], 0.0))


def best_random_split(Xn: np.ndarray, Yn: np.ndarray, feats: np.ndarray, min_leaf: int,
                      rng: np.random.Generator) -> Optional[Tuple[int, float, float]]:
    """
    ExtraTrees 分裂：每个候选特征在 [min, max) 内随机取一个阈值，再选增益最大者。
    """
    n = Xn.shape[0]
    sub = Xn[:, feats]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    u = rng.random(len(feats))
    thresholds = lo + u * (hi - lo)

    go_left = sub <= thresholds[None, :]
    left_counts = go_left.T.astype(float) @ Yn        # (f, c)
    n_left = go_left.sum(axis=0).astype(float)
    total = Yn.sum(axis=0)

    parent = n - (total ** 2).sum() / n
    gain = parent - _child_impurity(float(n), left_counts, n_left, total)
    valid = (hi - lo > VALUE_TOL) & (n_left >= min_leaf) & (n - n_left >= min_leaf)

    picked = _pick(gain[None, :], valid[None, :])
    if picked is None:
        return None
    _, col = picked
    return int(feats[col]), float(thresholds[col]), float(max(gain[col], 0.0))


# ==================== 建树 ====================

def grow_tree(X: np.ndarray, y: np.ndarray, n_classes: int, params: DecisionTreeParams,
              rng: np.random.Generator, random_thresholds: bool = False) -> Tuple[TreeArrays, np.ndarray]:
    """
    深度优先生长一棵分类树。

    Args:
        X: 特征（可含 bootstrap 重复行）
        y: 类别下标
        n_classes: 类别总数（叶子概率向量长度）
        params: 深度、叶子大小、特征子采样
        rng: 特征子采样与随机阈值用的随机源
        random_thresholds: True = ExtraTrees 随机阈值
    Returns:
        (树, 每个特征的不纯度下降总量)
    """
    n_total, d = X.shape
    Y = np.eye(n_classes)[y]
    k = resolve_max_features(params.max_features, d)
    importance = np.zeros(d)

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[np.ndarray] = []

    def new_node(counts: np.ndarray) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts / max(counts.sum(), 1.0))
        return len(feature) - 1

    root_rows = np.arange(n_total)
    stack = [(new_node(Y.sum(axis=0)), root_rows, 0)]
    while stack:
        node, rows, depth = stack.pop()
        n = rows.size
        counts = Y[rows].sum(axis=0)
        if (
            (params.max_depth is not None and depth >= params.max_depth)
            or n < params.min_samples_split
            or n < 2 * params.min_samples_leaf
            or counts.max() >= n
        ):
            continue

        Xn, Yn = X[rows], Y[rows]
        feats = np.arange(d) if k >= d else np.sort(rng.choice(d, size=k, replace=False))
        split = _search(Xn, Yn, feats, params.min_samples_leaf, rng, random_thresholds)
        if split is None and feats.size < d:
            # 抽到的特征都无法分裂时，继续在剩下的特征里找
            rest = np.setdiff1d(np.arange(d), feats)
            split = _search(Xn, Yn, rest, params.min_samples_leaf, rng, random_thresholds)
        if split is None:
            continue

        f, thr, gain = split
        importance[f] += gain
        mask = Xn[:, f] <= thr
        left_rows, right_rows = rows[mask], rows[~mask]
        left_id = new_node(Y[left_rows].sum(axis=0))
        right_id = new_node(Y[right_rows].sum(axis=0))
        feature[node], threshold[node] = f, thr
        left[node], right[node] = left_id, right_id
        stack.append((right_id, right_rows, depth + 1))
        stack.append((left_id, left_rows, depth + 1))

    tree = TreeArrays(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.vstack(value),
    )
    return tree, importance


def _search(Xn, Yn, feats, min_leaf, rng, random_thresholds):
    if random_thresholds:
        return best_random_split(Xn, Yn, feats, min_leaf, rng)
    return best_exact_split(Xn, Yn, feats, min_leaf)


# ==================== 估计器 ====================

class DecisionTreeClassifier(BaseClassifier):
    """DT：单棵 CART 树，叶子存类别概率"""

    kind = ModelKind.DT

    def __init__(self, params: DecisionTreeParams):
        super().__init__(params)
        self.tree: Optional[TreeArrays] = None
        self._importance: Optional[np.ndarray] = None

    def fit(self, X, y, n_classes, workers=1):
        self.n_features = X.shape[1]
        self.n_classes = n_classes
        rng = np.random.default_rng(self.params.seed)
        self.tree, self._importance = grow_tree(X, y, n_classes, self.params, rng)
        logger.debug(f"DT: {self.tree.n_nodes} nodes, {self.tree.n_leaves} leaves")
        return self

    def decision_function(self, X):
        return self.tree.value[self.tree.apply(X)]

    def feature_importance(self):
        return self._importance

    def get_state(self):
        return {
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "tree": self.tree.to_state(),
            "importance": self._importance.tolist(),
        }

    def set_state(self, state):
        self.n_features = int(state["n_features"])
        self.n_classes = int(state["n_classes"])
        self.tree = TreeArrays.from_state(state["tree"])
        self._importance = np.asarray(state["importance"], dtype=float)
