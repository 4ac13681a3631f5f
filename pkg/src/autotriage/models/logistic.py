"""L2-regularized logistic regression fit by full-batch gradient descent."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .artifact import ModelArtifact, sigmoid
from .data import TrainingSet, check_trainable


@dataclass(frozen=True)
class LogisticParams:
    l2: float = 1e-4
    learning_rate: float = 0.5
    n_iter: int = 500
    seed: int = 0


def loss_and_gradient(X: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float,
                      l2: float) -> tuple[float, np.ndarray, float]:
    """Mean logistic loss with L2 penalty on the weights (not the bias)."""
    margins = X @ weights + bias
    p = sigmoid(margins)
    eps = 1e-12
    loss = float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
    loss += 0.5 * l2 * float(weights @ weights)
    residual = p - y
    grad_w = X.T @ residual / len(y) + l2 * weights
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


def train_logistic(data: TrainingSet, params: LogisticParams | None = None) -> ModelArtifact:
    """Features are standardized internally; constant columns are left at
    zero weight so degenerate inputs collapse to the class prior."""
    params = params or LogisticParams()
    check_trainable(data)
    X, y = data.X, data.y.astype(np.float64)
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds > 0, stds, 1.0)
    Xs = (X - means) / stds

    weights = np.zeros(X.shape[1])
    bias = 0.0
    for _ in range(params.n_iter):
        _, grad_w, grad_b = loss_and_gradient(Xs, y, weights, bias, params.l2)
        weights -= params.learning_rate * grad_w
        bias -= params.learning_rate * grad_b

    return ModelArtifact(
        kind="logistic",
        feature_names=list(data.feature_names),
        params=asdict(params),
        payload={
            "weights": [float(w) for w in weights],
            "bias": float(bias),
            "means": [float(m) for m in means],
            "stds": [float(s) for s in stds],
        },
        metadata={"n_rows": len(X)},
    )
