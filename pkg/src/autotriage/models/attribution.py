"""Per-prediction feature attributions.

Trees use deterministic path attribution: walking an input down a tree,
each split credits the change in node value to the split feature, so the
per-tree contributions telescope to leaf minus root. Logistic models
attribute each feature its weighted offset from the training mean. In both
cases base value plus contributions reproduces the raw margin exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import UnsupportedModel
from .artifact import ModelArtifact


@dataclass(frozen=True)
class Attribution:
    contributions: np.ndarray
    base_value: float

    def ranked(self, names: Sequence[str], top_k: int | None = None):
        """(name, contribution) pairs sorted by |contribution| descending."""
        order = sorted(
            range(len(self.contributions)),
            key=lambda i: (-abs(self.contributions[i]), i),
        )
        if top_k is not None:
            order = order[:top_k]
        return [(names[i], float(self.contributions[i])) for i in order]


def attribute(artifact: ModelArtifact, fv: Sequence[float]) -> Attribution:
    fv = np.asarray(fv, dtype=np.float64)
    if artifact.kind == "gbdt":
        lr = artifact.payload["learning_rate"]
        contributions = np.zeros(artifact.n_features)
        base = artifact.payload["base_margin"]
        for tree in artifact.trees():
            base += lr * tree.value[0]
            node = 0
            while tree.feature[node] >= 0:
                feat = tree.feature[node]
                child = (
                    tree.left[node]
                    if fv[feat] <= tree.threshold[node]
                    else tree.right[node]
                )
                contributions[feat] += lr * (tree.value[child] - tree.value[node])
                node = child
        return Attribution(contributions=contributions, base_value=float(base))
    if artifact.kind == "logistic":
        weights = np.asarray(artifact.payload["weights"])
        means = np.asarray(artifact.payload["means"])
        stds = np.asarray(artifact.payload["stds"])
        contributions = weights * (fv - means) / stds
        return Attribution(contributions=contributions,
                           base_value=float(artifact.payload["bias"]))
    raise UnsupportedModel(f"no attribution for model kind {artifact.kind!r}")
