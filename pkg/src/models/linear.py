"""
线性模型：LR、EN、L-SVC（一对多）

特征先用训练集统计量做 z-score 标准化，再拼一列常数 1 作为偏置，
权重矩阵 W 形状为 (n_features + 1, n_classes)，最后一行是偏置，不参与正则化。

- LR / EN：逻辑损失 + L2（EN 再加 L1），加速近端梯度，步长 1/L
- L-SVC：hinge 损失 + L2，次梯度下降，步长 eta0/sqrt(t)，保留目标最小的迭代点

objective / gradient 对外公开，用于有限差分梯度检查。
"""

import logging
import math
from typing import Any, Dict, Optional

import numpy as np

from src.core.models import ModelKind
from .base import BaseClassifier
from .params import ElasticNetParams, LinearSVCParams, LogisticParams

logger = logging.getLogger(__name__)

SCALE_FLOOR = 1e-12


class Standardizer:
    """按列 z-score，方差为 0 的列只做平移"""

    def __init__(self, mean: Optional[np.ndarray] = None, scale: Optional[np.ndarray] = None):
        self.mean = mean
        self.scale = scale

    def fit(self, X: np.ndarray) -> "Standardizer":
        self.mean = X.mean(axis=0)
        scale = X.std(axis=0)
        self.scale = np.where(scale < SCALE_FLOOR, 1.0, scale)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def to_state(self) -> Dict[str, Any]:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "Standardizer":
        return cls(np.asarray(state["mean"], dtype=float), np.asarray(state["scale"], dtype=float))


def add_bias(Z: np.ndarray) -> np.ndarray:
    return np.hstack([Z, np.ones((Z.shape[0], 1))])


def _penalty_mask(W: np.ndarray) -> np.ndarray:
    mask = np.ones_like(W)
    mask[-1] = 0.0
    return mask


class _OneVsRestLinear(BaseClassifier):
    """一对多线性模型的公共部分"""

    def __init__(self, params):
        super().__init__(params)
        self.scaler = Standardizer()
        self.weights: Optional[np.ndarray] = None
        self.n_iter: int = 0

    def design(self, X: np.ndarray) -> np.ndarray:
        return add_bias(self.scaler.transform(X))

    def decision_function(self, X):
        return self.design(X) @ self.weights

    def feature_importance(self):
        """各类别系数绝对值的平均（标准化特征上）"""
        return np.abs(self.weights[:-1]).mean(axis=1)

    def get_state(self):
        return {
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "scaler": self.scaler.to_state(),
            "weights": self.weights.tolist(),
            "n_iter": self.n_iter,
        }

    def set_state(self, state):
        self.n_features = int(state["n_features"])
        self.n_classes = int(state["n_classes"])
        self.scaler = Standardizer.from_state(state["scaler"])
        self.weights = np.asarray(state["weights"], dtype=float)
        self.n_iter = int(state.get("n_iter", 0))


# ==================== LR / EN ====================

class ElasticNetClassifier(_OneVsRestLinear):
    """EN：逻辑损失 + l1‖W‖₁ + (l2/2)‖W‖²"""

    kind = ModelKind.EN

    def __init__(self, params: ElasticNetParams):
        super().__init__(params)

    @property
    def l1(self) -> float:
        return self.params.l1

    @property
    def l2(self) -> float:
        return self.params.l2

    @staticmethod
    def targets(y: np.ndarray, n_classes: int) -> np.ndarray:
        return np.eye(n_classes)[y]

    def smooth_objective(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> float:
        S = A @ W
        loss = np.sum(np.logaddexp(0.0, S) - T * S) / A.shape[0]
        return float(loss + 0.5 * self.l2 * np.sum((W * _penalty_mask(W)) ** 2))

    def smooth_gradient(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> np.ndarray:
        S = A @ W
        P = 0.5 * (1.0 + np.tanh(0.5 * S))   # 数值稳定的 sigmoid
        return A.T @ (P - T) / A.shape[0] + self.l2 * W * _penalty_mask(W)

    def objective(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> float:
        """训练目标（A 为带偏置列的标准化设计矩阵，T 为 0/1 目标）"""
        return self.smooth_objective(W, A, T) + self.l1 * float(np.sum(np.abs(W * _penalty_mask(W))))

    def gradient(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> np.ndarray:
        """目标的（次）梯度；W 元素非零时即为梯度"""
        return self.smooth_gradient(W, A, T) + self.l1 * np.sign(W) * _penalty_mask(W)

    def _prox(self, W: np.ndarray, step: float) -> np.ndarray:
        if self.l1 <= 0.0:
            return W
        shrunk = np.sign(W) * np.maximum(np.abs(W) - step * self.l1, 0.0)
        shrunk[-1] = W[-1]
        return shrunk

    def fit(self, X, y, n_classes, workers=1):
        self.n_features, self.n_classes = X.shape[1], n_classes
        A = add_bias(self.scaler.fit(X).transform(X))
        T = self.targets(y, n_classes)
        n = A.shape[0]
        lipschitz = 0.25 * np.linalg.norm(A, 2) ** 2 / n + self.l2
        step = 1.0 / lipschitz

        W = np.zeros((A.shape[1], n_classes))
        Z = W.copy()
        t = 1.0
        f_prev = self.objective(W, A, T)
        converged = False
        for it in range(1, self.params.max_iter + 1):
            W_new = self._prox(Z - step * self.smooth_gradient(Z, A, T), step)
            f_new = self.objective(W_new, A, T)
            if f_new > f_prev:
                # 目标上升：丢掉动量，从 W 重新走一步
                t = 1.0
                W_new = self._prox(W - step * self.smooth_gradient(W, A, T), step)
                f_new = self.objective(W_new, A, T)
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            Z = W_new + ((t - 1.0) / t_next) * (W_new - W)
            W, t = W_new, t_next
            self.n_iter = it
            if abs(f_prev - f_new) <= self.params.tol * max(1.0, abs(f_new)):
                converged = True
                break
            f_prev = f_new

        self.weights = W
        if not converged:
            self._flag_not_converged(
                f"did not converge in {self.params.max_iter} iterations (objective {f_new:.6g})"
            )
        return self


class LogisticRegressionClassifier(ElasticNetClassifier):
    """LR：EN 的 l1 = 0 特例"""

    kind = ModelKind.LR

    def __init__(self, params: LogisticParams):
        super().__init__(params)

    @property
    def l1(self) -> float:
        return 0.0


# ==================== L-SVC ====================

class LinearSVCClassifier(_OneVsRestLinear):
    """L-SVC：mean hinge + (l2/2)‖W‖²"""

    kind = ModelKind.L_SVC

    def __init__(self, params: LinearSVCParams):
        super().__init__(params)

    @staticmethod
    def targets(y: np.ndarray, n_classes: int) -> np.ndarray:
        return 2.0 * np.eye(n_classes)[y] - 1.0

    def objective(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> float:
        margins = T * (A @ W)
        hinge = np.maximum(0.0, 1.0 - margins).sum() / A.shape[0]
        return float(hinge + 0.5 * self.params.l2 * np.sum((W * _penalty_mask(W)) ** 2))

    def gradient(self, W: np.ndarray, A: np.ndarray, T: np.ndarray) -> np.ndarray:
        active = (T * (A @ W) < 1.0).astype(float)
        return -A.T @ (active * T) / A.shape[0] + self.params.l2 * W * _penalty_mask(W)

    def fit(self, X, y, n_classes, workers=1):
        p = self.params
        self.n_features, self.n_classes = X.shape[1], n_classes
        A = add_bias(self.scaler.fit(X).transform(X))
        T = self.targets(y, n_classes)

        W = np.zeros((A.shape[1], n_classes))
        best_W, best_f = W.copy(), self.objective(W, A, T)
        since_best = 0
        converged = False
        for it in range(1, p.max_iter + 1):
            W = W - (p.eta0 / math.sqrt(it)) * self.gradient(W, A, T)
            f = self.objective(W, A, T)
            self.n_iter = it
            if f < best_f - p.tol * max(1.0, abs(best_f)):
                best_W, best_f, since_best = W.copy(), f, 0
            else:
                since_best += 1
                if since_best >= p.patience:
                    converged = True
                    break

        self.weights = best_W
        if not converged:
            self._flag_not_converged(f"objective still improving after {p.max_iter} iterations (best {best_f:.6g})")
        return self
