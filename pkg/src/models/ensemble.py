"""
树集成：随机森林（RF）与极端随机树（ET）

每棵树的种子由 (seed, "tree", i) 派生，所以按树并行时结果与 worker 数无关。
预测为多数投票，票数相同给下标最小的类别。
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from src.core.models import ModelKind
from src.core.parallel import run_parallel
from src.core.seeding import make_rng
from .base import BaseClassifier, normalize_importance
from .params import ExtraTreesParams, ForestParams
from .tree import PackedTrees, TreeArrays, grow_tree

logger = logging.getLogger(__name__)


class RandomForestClassifier(BaseClassifier):
    """RF：bootstrap + 特征子采样"""

    kind = ModelKind.RF
    random_thresholds = False

    def __init__(self, params: ForestParams):
        super().__init__(params)
        self.trees: List[TreeArrays] = []
        self._importance: Optional[np.ndarray] = None
        self._packed: Optional[PackedTrees] = None
        self._leaf_class: Optional[np.ndarray] = None

    def _grow_one(self, index: int, X: np.ndarray, y: np.ndarray, n_classes: int) -> Tuple[TreeArrays, np.ndarray]:
        rng = make_rng(self.params.seed, "tree", index)
        n = X.shape[0]
        rows = rng.integers(0, n, size=n) if self.params.bootstrap else np.arange(n)
        tree, raw = grow_tree(X[rows], y[rows], n_classes, self.params, rng, self.random_thresholds)
        # 单叶子树没有分裂，不参与重要性平均
        per_tree = raw / raw.sum() if raw.sum() > 0 else np.zeros_like(raw)
        return tree, per_tree

    def fit(self, X, y, n_classes, workers=1):
        self.n_features = X.shape[1]
        self.n_classes = n_classes
        tasks = [(i, X, y, n_classes) for i in range(self.params.n_estimators)]
        results = run_parallel(self._grow_one, tasks, workers)
        self.trees = [tree for tree, _ in results]
        self._importance = normalize_importance(np.mean([imp for _, imp in results], axis=0))
        self._pack()
        logger.debug(
            f"{self.kind.value}: {len(self.trees)} trees, "
            f"mean leaves {np.mean([t.n_leaves for t in self.trees]):.1f}"
        )
        return self

    def _pack(self) -> None:
        self._packed = PackedTrees(self.trees)
        self._leaf_class = np.argmax(self._packed.value, axis=1)

    def decision_function(self, X):
        """每个类别得到的票数"""
        n = X.shape[0]
        if n == 0:
            return np.zeros((0, self.n_classes))
        leaves = self._packed.apply(X)                      # (trees, rows)
        votes = self._leaf_class[leaves]
        flat = np.arange(n)[None, :] * self.n_classes + votes
        counts = np.bincount(flat.ravel(), minlength=n * self.n_classes)
        return counts.reshape(n, self.n_classes).astype(float)

    def feature_importance(self):
        return self._importance

    def get_state(self):
        return {
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "trees": [t.to_state() for t in self.trees],
            "importance": self._importance.tolist(),
        }

    def set_state(self, state):
        self.n_features = int(state["n_features"])
        self.n_classes = int(state["n_classes"])
        self.trees = [TreeArrays.from_state(s) for s in state["trees"]]
        self._importance = np.asarray(state["importance"], dtype=float)
        self._pack()


class ExtraTreesClassifier(RandomForestClassifier):
    """ET：阈值在节点取值范围内随机抽取"""

    kind = ModelKind.ET
    random_thresholds = True

    def __init__(self, params: ExtraTreesParams):
        super().__init__(params)
