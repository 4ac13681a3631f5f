"""Bagged-tree comparator: bootstrap samples, probability averaging."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .artifact import ModelArtifact
from .data import TrainingSet, check_trainable
from .trees import build_tree


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 50
    max_depth: int = 12
    min_leaf: int = 2
    seed: int = 0


def train_forest(data: TrainingSet, params: ForestParams | None = None) -> ModelArtifact:
    params = params or ForestParams()
    check_trainable(data)
    X, y = data.X, data.y.astype(np.float64)
    n = len(X)
    rng = np.random.default_rng(params.seed)
    ones = np.ones(n)
    trees = []
    for _ in range(params.n_trees):
        sample = np.sort(rng.integers(0, n, size=n))
        Xb, yb = X[sample], y[sample]
        orders = [np.argsort(Xb[:, j], kind="stable") for j in range(X.shape[1])]
        trees.append(build_tree(Xb, yb, ones[: len(Xb)], orders,
                                params.max_depth, params.min_leaf))
    return ModelArtifact(
        kind="forest",
        feature_names=list(data.feature_names),
        params=asdict(params),
        payload={"trees": [t.to_payload() for t in trees]},
        metadata={"n_rows": n},
    )
