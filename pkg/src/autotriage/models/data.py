"""Training data container."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import DegenerateLabels, EmptyData


@dataclass
class TrainingSet:
    """Feature matrix with labels, ordered by timestamp.

    Labels are 0/1; rows keep their alert ids so provenance checks can
    trace every training sample back to its source.
    """

    X: np.ndarray
    y: np.ndarray
    timestamps: np.ndarray
    alert_ids: list[str]
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        if self.X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        n = len(self.X)
        if not (len(self.y) == len(self.timestamps) == len(self.alert_ids) == n):
            raise ValueError("all columns must have the same length")
        if n and not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.X.shape[1])]
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names must match the matrix width")

    def __len__(self) -> int:
        return len(self.X)

    def sorted_by_time(self) -> "TrainingSet":
        order = np.argsort(self.timestamps, kind="stable")
        return TrainingSet(
            X=self.X[order],
            y=self.y[order],
            timestamps=self.timestamps[order],
            alert_ids=[self.alert_ids[i] for i in order],
            feature_names=list(self.feature_names),
        )

    def subset(self, indices: Sequence[int] | np.ndarray) -> "TrainingSet":
        indices = np.asarray(indices)
        return TrainingSet(
            X=self.X[indices],
            y=self.y[indices],
            timestamps=self.timestamps[indices],
            alert_ids=[self.alert_ids[i] for i in indices],
            feature_names=list(self.feature_names),
        )


def check_trainable(data: TrainingSet, min_rows: int = 2) -> None:
    if len(data) < min_rows:
        raise EmptyData(f"need at least {min_rows} rows, got {len(data)}")
    classes = np.unique(data.y)
    if len(classes) < 2:
        raise DegenerateLabels(f"single class present: {classes.tolist()}")
