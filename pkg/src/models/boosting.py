"""
XGB：softmax 目标的二阶梯度提升树

每一轮为每个类别长一棵回归树：
- g = p - y，h = max(2p(1-p), 1e-16)
- 分裂增益 ½[G_L²/(H_L+λ) + G_R²/(H_R+λ) - G²/(H+λ)] - γ
- 叶子权重 -G/(H+λ)，再乘学习率

特征先按分位点分箱（取值少时直接用相邻取值中点），
同一轮所有类别的树按层一起生长，每层只做一次直方图累加。
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from src.core.models import ModelKind
from .base import BaseClassifier
from .params import BoostingParams
from .tree import GAIN_TOL, PackedTrees, TreeArrays

logger = logging.getLogger(__name__)

HESSIAN_FLOOR = 1e-16


def make_cuts(X: np.ndarray, max_bin: int) -> List[np.ndarray]:
    """每个特征的候选切分点（升序）"""
    cuts: List[np.ndarray] = []
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        if values.size <= max_bin:
            cuts.append(0.5 * (values[:-1] + values[1:]))
        else:
            qs = np.quantile(X[:, j], np.linspace(0.0, 1.0, max_bin + 1)[1:-1])
            cuts.append(np.unique(qs))
    return cuts


def bin_features(X: np.ndarray, cuts: List[np.ndarray]) -> np.ndarray:
    """bin = 严格小于 x 的切分点个数，于是 x <= cuts[b] 等价于 bin <= b"""
    return np.column_stack([np.searchsorted(c, X[:, j], side="left") for j, c in enumerate(cuts)]) \
        if cuts else np.zeros((X.shape[0], 0), dtype=np.int64)


def softmax_loss(margins: np.ndarray, y: np.ndarray) -> float:
    """平均 softmax 交叉熵"""
    return float(-np.mean(log_softmax(margins, axis=1)[np.arange(y.size), y]))


class _ClassTree:
    """单个类别在当前轮的树，按节点追加"""

    def __init__(self):
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def to_arrays(self) -> TreeArrays:
        return TreeArrays(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=float),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=float).reshape(-1, 1),
        )


class GradientBoostingClassifier(BaseClassifier):
    """XGB 风格的多分类提升树"""

    kind = ModelKind.XGB

    def __init__(self, params: BoostingParams):
        super().__init__(params)
        self.trees: List[TreeArrays] = []
        self.loss_history: List[float] = []
        self._importance: Optional[np.ndarray] = None
        self._packed: Optional[PackedTrees] = None

    # ==================== 训练 ====================

    def fit(self, X, y, n_classes, workers=1):
        p = self.params
        n, d = X.shape
        self.n_features, self.n_classes = d, n_classes

        cuts = make_cuts(X, p.max_bin)
        n_bins = max((c.size for c in cuts), default=0) + 1
        padded = np.full((d, n_bins - 1), np.inf)
        for j, c in enumerate(cuts):
            padded[j, : c.size] = c
        cut_ok = np.isfinite(padded)
        bins = bin_features(X, cuts)

        Y = np.eye(n_classes)[y]
        margins = np.zeros((n, n_classes))
        gain_total = np.zeros(d)
        self.trees, self.loss_history = [], []

        for _ in range(p.n_estimators):
            prob = softmax(margins, axis=1)
            grad = prob - Y
            hess = np.maximum(2.0 * prob * (1.0 - prob), HESSIAN_FLOOR)
            round_trees, leaf_values = self._grow_round(bins, padded, cut_ok, grad, hess, gain_total)
            margins += leaf_values
            self.trees.extend(round_trees)
            self.loss_history.append(softmax_loss(margins, y))

        self._importance = gain_total
        self._pack()
        logger.debug(
            f"XGB: {p.n_estimators} rounds × {n_classes} classes, "
            f"loss {self.loss_history[0]:.4f} → {self.loss_history[-1]:.4f}"
        )
        return self

    def _grow_round(self, bins: np.ndarray, cuts: np.ndarray, cut_ok: np.ndarray,
                    grad: np.ndarray, hess: np.ndarray, gain_total: np.ndarray) -> Tuple[List[TreeArrays], np.ndarray]:
        """
        一轮：所有类别的树按层同时生长。

        Returns:
            (本轮 n_classes 棵树, 每个样本每个类别的叶子输出 rows × classes)
        """
        p = self.params
        n, d = bins.shape
        c = self.n_classes
        n_bins = cuts.shape[1] + 1
        lam = p.reg_lambda

        trees = [_ClassTree() for _ in range(c)]
        # frontier[j] = (类别, 该类别树里的节点号)
        frontier: List[Tuple[int, int]] = [(k, trees[k].add()) for k in range(c)]
        pos = np.tile(np.arange(c)[:, None], (1, n))       # (classes, rows) → frontier 下标，-1 = 已落叶
        leaf_of = np.zeros((c, n), dtype=np.int64)

        for depth in range(p.max_depth + 1):
            n_front = len(frontier)
            ks, rows = np.nonzero(pos >= 0)
            fr = pos[ks, rows]
            g = grad[rows, ks]
            h = hess[rows, ks]
            G = np.bincount(fr, weights=g, minlength=n_front)
            H = np.bincount(fr, weights=h, minlength=n_front)

            split_f = np.full(n_front, -1, dtype=np.int64)
            split_b = np.zeros(n_front, dtype=np.int64)
            if depth < p.max_depth and n_bins > 1:
                keys = (fr[:, None] * d + np.arange(d)[None, :]) * n_bins + bins[rows]
                size = n_front * d * n_bins
                hist_g = np.bincount(keys.ravel(), weights=np.repeat(g, d), minlength=size).reshape(n_front, d, n_bins)
                hist_h = np.bincount(keys.ravel(), weights=np.repeat(h, d), minlength=size).reshape(n_front, d, n_bins)
                GL = np.cumsum(hist_g, axis=2)[:, :, :-1]
                HL = np.cumsum(hist_h, axis=2)[:, :, :-1]
                Gt, Ht = G[:, None, None], H[:, None, None]
                GR, HR = Gt - GL, Ht - HL
                with np.errstate(divide="ignore", invalid="ignore"):
                    gain = 0.5 * (GL ** 2 / (HL + lam) + GR ** 2 / (HR + lam) - Gt ** 2 / (Ht + lam)) - p.gamma
                ok = cut_ok[None] & (HL >= p.min_child_weight) & (HR >= p.min_child_weight)
                gain = np.where(ok & np.isfinite(gain), gain, -np.inf).reshape(n_front, -1)
                best = gain.max(axis=1)
                # 第一个达到最大值的位置：特征下标最小，再阈值最小
                first = np.argmax(gain >= (best - GAIN_TOL)[:, None], axis=1)
                do_split = best > GAIN_TOL
                split_f = np.where(do_split, first // (n_bins - 1), -1)
                split_b = np.where(do_split, first % (n_bins - 1), 0)
                for j in np.flatnonzero(do_split):
                    gain_total[split_f[j]] += best[j]

            next_frontier: List[Tuple[int, int]] = []
            left_new = np.full(n_front, -1, dtype=np.int64)
            right_new = np.full(n_front, -1, dtype=np.int64)
            for j, (k, node) in enumerate(frontier):
                tree = trees[k]
                if split_f[j] >= 0:
                    f, b = int(split_f[j]), int(split_b[j])
                    tree.feature[node] = f
                    tree.threshold[node] = float(cuts[f, b])
                    tree.left[node] = tree.add()
                    tree.right[node] = tree.add()
                    left_new[j] = len(next_frontier)
                    next_frontier.append((k, tree.left[node]))
                    right_new[j] = len(next_frontier)
                    next_frontier.append((k, tree.right[node]))
                else:
                    tree.value[node] = float(-G[j] / (H[j] + lam) * p.learning_rate)

            is_split = split_f[fr] >= 0
            done = ~is_split
            node_ids = np.asarray([node for _, node in frontier], dtype=np.int64)
            leaf_of[ks[done], rows[done]] = node_ids[fr[done]]
            pos[ks[done], rows[done]] = -1
            if is_split.any():
                sk, sr, sj = ks[is_split], rows[is_split], fr[is_split]
                go_left = bins[sr, split_f[sj]] <= split_b[sj]
                pos[sk, sr] = np.where(go_left, left_new[sj], right_new[sj])
            frontier = next_frontier
            if not frontier:
                break

        outputs = np.zeros((n, c))
        for k in range(c):
            outputs[:, k] = np.asarray(trees[k].value)[leaf_of[k]]
        return [t.to_arrays() for t in trees], outputs

    # ==================== 预测 ====================

    def _pack(self) -> None:
        self._packed = PackedTrees(self.trees)

    def decision_function(self, X):
        """softmax 之前的 margin"""
        n = X.shape[0]
        if n == 0 or not self.trees:
            return np.zeros((n, self.n_classes))
        leaves = self._packed.apply(X)                                   # (rounds·classes, rows)
        contrib = self._packed.value[leaves, 0].reshape(-1, self.n_classes, n)
        return contrib.sum(axis=0).T

    def feature_importance(self):
        return self._importance

    def get_state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "trees": [t.to_state() for t in self.trees],
            "importance": self._importance.tolist(),
            "loss_history": list(self.loss_history),
        }

    def set_state(self, state: Dict[str, Any]) -> None:
        self.n_features = int(state["n_features"])
        self.n_classes = int(state["n_classes"])
        self.trees = [TreeArrays.from_state(s) for s in state["trees"]]
        self._importance = np.asarray(state["importance"], dtype=float)
        self.loss_history = [float(v) for v in state.get("loss_history", [])]
        self._pack()
