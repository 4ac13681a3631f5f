"""Binary regression trees with exact greedy split finding.

Trees are stored as flat parallel arrays (feature, threshold, left, right,
value). ``feature == -1`` marks a leaf; the split rule is
``x[feature] <= threshold`` goes left. Every node, internal or leaf,
carries the value it would predict, which is what path attribution walks.

Split search uses per-feature presorted row orders carried down the tree,
so each level costs one pass over the node's rows per feature. Candidate
thresholds are midpoints between distinct consecutive sorted values; the
best split is the candidate maximizing the second-order gain, with ties
resolved by scan order so training is deterministic. Splits with zero gain
are allowed (a node is only closed when its targets are constant), which
lets deeper trees pick up interactions that show no marginal signal.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_LAMBDA = 1e-9  # denominator regularizer for node values and gains


@dataclass
class FlatTree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def add_node(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def predict_one(self, x) -> float:
        node = 0
        feature = self.feature
        while feature[node] >= 0:
            node = self.left[node] if x[feature[node]] <= self.threshold[node] else self.right[node]
        return self.value[node]

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        n = len(X)
        idx = np.zeros(n, dtype=np.int64)
        feature = np.asarray(self.feature, dtype=np.int64)
        threshold = np.asarray(self.threshold, dtype=np.float64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        value = np.asarray(self.value, dtype=np.float64)
        while True:
            feats = feature[idx]
            internal = feats >= 0
            if not internal.any():
                break
            rows = np.flatnonzero(internal)
            xv = X[rows, feats[rows]]
            goes_left = xv <= threshold[idx[rows]]
            idx[rows] = np.where(goes_left, left[idx[rows]], right[idx[rows]])
        return value[idx]

    def to_payload(self) -> dict:
        return {
            "feature": list(self.feature),
            "threshold": [float(v) for v in self.threshold],
            "left": list(self.left),
            "right": list(self.right),
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "FlatTree":
        return cls(
            feature=[int(v) for v in payload["feature"]],
            threshold=[float(v) for v in payload["threshold"]],
            left=[int(v) for v in payload["left"]],
            right=[int(v) for v in payload["right"]],
            value=[float(v) for v in payload["value"]],
        )


def presort_columns(X: np.ndarray) -> list[np.ndarray]:
    return [np.argsort(X[:, j], kind="stable").astype(np.int64) for j in range(X.shape[1])]


def _node_value(g_sum: float, h_sum: float) -> float:
    return g_sum / (h_sum + _LAMBDA)


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                orders: list[np.ndarray], min_leaf: int):
    """Return (feature, threshold, gain) for the best candidate, or None."""
    best_gain = -np.inf
    best: tuple[int, float] | None = None
    for j, order in enumerate(orders):
        xs = X[order, j]
        if xs[0] == xs[-1]:
            continue
        gs = np.cumsum(g[order])
        hs = np.cumsum(h[order])
        total_g, total_h = gs[-1], hs[-1]
        n = len(order)
        k = np.arange(1, n)
        valid = (xs[1:] != xs[:-1]) & (k >= min_leaf) & (n - k >= min_leaf)
        if not valid.any():
            continue
        gl, hl = gs[:-1], hs[:-1]
        gain = gl * gl / (hl + _LAMBDA) + (total_g - gl) ** 2 / (total_h - hl + _LAMBDA)
        gain = np.where(valid, gain, -np.inf)
        pos = int(np.argmax(gain))
        if gain[pos] > best_gain:
            best_gain = float(gain[pos])
            best = (j, float((xs[pos] + xs[pos + 1]) / 2.0))
    if best is None:
        return None
    return best[0], best[1], best_gain


def build_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray,
               orders: list[np.ndarray], max_depth: int, min_leaf: int) -> FlatTree:
    """Fit one regression tree to gradient/hessian targets.

    ``orders`` are presorted row-index arrays per feature covering exactly
    the rows to train on; they are consumed (partitioned) by the build.
    """
    tree = FlatTree()
    goes_left_buf = np.zeros(len(X), dtype=bool)

    def grow(node_orders: list[np.ndarray], depth: int) -> int:
        rows = node_orders[0]
        g_sum = float(g[rows].sum())
        h_sum = float(h[rows].sum())
        node = tree.add_node(_node_value(g_sum, h_sum))
        if depth >= max_depth or len(rows) < 2 * min_leaf:
            return node
        g_rows = g[rows]
        if np.all(g_rows == g_rows[0]):
            return node
        found = _best_split(X, g, h, node_orders, min_leaf)
        if found is None:
            return node
        feature, threshold, _ = found
        goes_left_buf[rows] = X[rows, feature] <= threshold
        left_orders, right_orders = [], []
        for order in node_orders:
            sel = goes_left_buf[order]
            left_orders.append(order[sel])
            right_orders.append(order[~sel])
        tree.feature[node] = feature
        tree.threshold[node] = threshold
        tree.left[node] = grow(left_orders, depth + 1)
        tree.right[node] = grow(right_orders, depth + 1)
        return node

    grow(orders, 0)
    return tree
