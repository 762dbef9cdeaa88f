"""
RBF 核 SVM（一对多，核化对偶坐标上升）

偏置并入核：K'(x, z) = exp(-γ‖x - z‖²) + 1，于是对偶问题只剩盒约束 0 ≤ α ≤ C。
每次访问一个样本时，所有一对多子问题一起更新（同一行核向量复用）。

γ 默认取 1/(2σ²)，σ 为标准化后训练样本两两距离的中位数。
样本数超过 max_samples 时先分层抽样作为工作集。
"""

import logging
from typing import Any, Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist

from src.core.models import ModelKind, SplitSpec
from src.data.split import stratified_indices
from .base import BaseClassifier
from .linear import Standardizer
from .params import RBFSVCParams

logger = logging.getLogger(__name__)


def median_heuristic_gamma(Z: np.ndarray) -> float:
    """γ = 1 / (2·median(‖z_i - z_j‖)²)，距离全为 0 时取 1"""
    if Z.shape[0] < 2:
        return 1.0
    dists = pdist(Z)
    dists = dists[dists > 0]
    if dists.size == 0:
        return 1.0
    sigma = float(np.median(dists))
    return 1.0 / (2.0 * sigma * sigma)


class RBFSVCClassifier(BaseClassifier):
    """RBF-SVC"""

    kind = ModelKind.RBF_SVC

    def __init__(self, params: RBFSVCParams):
        super().__init__(params)
        self.scaler = Standardizer()
        self.gamma: float = 1.0
        self.support: Optional[np.ndarray] = None    # 标准化后的工作集样本
        self.coef: Optional[np.ndarray] = None       # α ⊙ t，(samples, classes)
        self.n_epochs: int = 0

    def kernel(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return np.exp(-self.gamma * cdist(A, B, "sqeuclidean")) + 1.0

    def _working_set(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        if n <= self.params.max_samples:
            return np.arange(n)
        spec = SplitSpec(train_fraction=self.params.max_samples / n, seed=self.params.seed)
        rows, _ = stratified_indices(np.asarray([str(v) for v in y], dtype=object), spec)
        # 单行类别会被分层抽样整类划走，补回每类的第一行
        _, first = np.unique(y, return_index=True)
        rows = np.union1d(rows, first)
        logger.info(f"RBF-SVC: working set capped at {rows.size} of {n} rows")
        return rows

    def fit(self, X, y, n_classes, workers=1):
        p = self.params
        self.n_features, self.n_classes = X.shape[1], n_classes
        rows = self._working_set(X, y)
        Z = self.scaler.fit(X).transform(X)[rows]
        t = 2.0 * np.eye(n_classes)[y[rows]] - 1.0
        self.gamma = p.gamma if p.gamma is not None else median_heuristic_gamma(Z)

        K = self.kernel(Z, Z)
        diag = np.diag(K)
        m = Z.shape[0]
        alpha = np.zeros((m, n_classes))
        f = np.zeros((m, n_classes))                  # f = K (α ⊙ t)
        rng = np.random.default_rng(p.seed)

        converged = False
        for epoch in range(1, p.max_iter + 1):
            max_step = 0.0
            for i in rng.permutation(m):
                grad = 1.0 - t[i] * f[i]
                new = np.clip(alpha[i] + grad / diag[i], 0.0, p.C)
                delta = new - alpha[i]
                if not delta.any():
                    continue
                alpha[i] = new
                f += np.outer(K[:, i], delta * t[i])
                max_step = max(max_step, float(np.abs(delta).max()))
            self.n_epochs = epoch
            if max_step < p.tol:
                converged = True
                break

        self.support = Z
        self.coef = alpha * t
        logger.debug(f"RBF-SVC: γ={self.gamma:.4g}, {int((alpha > 0).any(axis=1).sum())} support vectors")
        if not converged:
            self._flag_not_converged(f"dual coordinate ascent still moving after {p.max_iter} epochs")
        return self

    def decision_function(self, X):
        Zq = self.scaler.transform(X)
        return self.kernel(Zq, self.support) @ self.coef

    def get_state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "scaler": self.scaler.to_state(),
            "gamma": self.gamma,
            "support": self.support.tolist(),
            "coef": self.coef.tolist(),
        }

    def set_state(self, state: Dict[str, Any]) -> None:
        self.n_features = int(state["n_features"])
        self.n_classes = int(state["n_classes"])
        self.scaler = Standardizer.from_state(state["scaler"])
        self.gamma = float(state["gamma"])
        self.support = np.asarray(state["support"], dtype=float).reshape(-1, self.n_features)
        self.coef = np.asarray(state["coef"], dtype=float).reshape(-1, self.n_classes)
