"""Gradient-boosted trees for binary classification under logistic loss."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .artifact import MARGIN_CLIP, ModelArtifact, sigmoid
from .data import TrainingSet, check_trainable
from .trees import build_tree, presort_columns


@dataclass(frozen=True)
class GbdtParams:
    n_trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    subsample: float = 1.0
    min_leaf: int = 20
    seed: int = 0


def train_gbdt(data: TrainingSet, params: GbdtParams | None = None) -> ModelArtifact:
    """Stagewise additive model: each tree fits the current negative gradient
    of the logistic loss and leaves take a one-step Newton value.

    Deterministic for a fixed seed; per-stage training loss is kept in the
    artifact metadata so monotonicity is checkable after the fact.
    """
    params = params or GbdtParams()
    check_trainable(data)
    X, y = data.X, data.y.astype(np.float64)
    n = len(X)
    rng = np.random.default_rng(params.seed)

    prior = float(np.clip(y.mean(), 1e-12, 1 - 1e-12))
    base_margin = float(np.log(prior / (1.0 - prior)))
    margins = np.full(n, base_margin)
    orders_full = presort_columns(X)

    trees = []
    losses = []
    min_leaf = max(1, params.min_leaf)
    for _ in range(params.n_trees):
        p = sigmoid(margins)
        g = y - p
        h = p * (1.0 - p)
        if params.subsample < 1.0:
            take = rng.random(n) < params.subsample
            if take.sum() < 2 * min_leaf:
                take = np.ones(n, dtype=bool)
            orders = [order[take[order]] for order in orders_full]
        else:
            orders = [order.copy() for order in orders_full]
        tree = build_tree(X, g, h, orders, params.max_depth, min_leaf)
        margins = margins + params.learning_rate * tree.predict_matrix(X)
        trees.append(tree)
        p_now = sigmoid(np.clip(margins, -MARGIN_CLIP, MARGIN_CLIP))
        losses.append(float(-np.mean(y * np.log(p_now) + (1 - y) * np.log(1 - p_now))))

    return ModelArtifact(
        kind="gbdt",
        feature_names=list(data.feature_names),
        params=asdict(params),
        payload={
            "base_margin": base_margin,
            "learning_rate": params.learning_rate,
            "trees": [t.to_payload() for t in trees],
        },
        metadata={"training_loss": losses, "n_rows": n},
    )
