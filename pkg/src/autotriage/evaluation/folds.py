"""Expanding-window time-series cross validation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TooFewRows


@dataclass(frozen=True)
class Fold:
    train: np.ndarray  # row indices, time order
    test: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: list[Fold]
    boundaries: list[float]  # timestamps at each test-block start


def plan_time_series_folds(timestamps, labels, k: int,
                           require_both_classes: bool = True) -> FoldPlan:
    """Split rows into k equal-count contiguous test blocks after an initial
    train block; fold i trains on everything before its test block.

    Rows are sorted by timestamp internally, so caller order is irrelevant.
    Remainder rows go to the initial train block, keeping test blocks equal.
    """
    timestamps = np.asarray(timestamps, dtype=np.float64)
    labels = np.asarray(labels)
    n = len(timestamps)
    if k < 2:
        raise ValueError("k must be at least 2")
    block = n // (k + 1)
    if block < 2:
        raise TooFewRows(f"{n} rows cannot form {k} test blocks of at least 2 rows")
    order = np.argsort(timestamps, kind="stable")
    folds = []
    boundaries = []
    for i in range(k):
        test_start = n - (k - i) * block
        test_end = test_start + block
        train_idx = order[:test_start]
        test_idx = order[test_start:test_end]
        if require_both_classes:
            for name, idx in (("train", train_idx), ("test", test_idx)):
                seen = np.unique(labels[idx])
                if len(seen) < 2:
                    raise TooFewRows(
                        f"fold {i} {name} block holds a single class {seen.tolist()}"
                    )
        folds.append(Fold(train=train_idx, test=test_idx))
        boundaries.append(float(timestamps[order[test_start]]))
    return FoldPlan(k=k, folds=folds, boundaries=boundaries)
