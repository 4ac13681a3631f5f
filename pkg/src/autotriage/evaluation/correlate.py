"""Pearson correlation report for lookback-window pruning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CorrelationReport:
    columns: list[str]
    matrix: np.ndarray
    constant_columns: list[str]

    def table(self) -> str:
        lines = ["," + ",".join(self.columns)]
        for name, row in zip(self.columns, self.matrix):
            lines.append(name + "," + ",".join(repr(float(v)) for v in row))
        if self.constant_columns:
            lines.append("# constant columns (correlation set to 0): "
                         + ",".join(self.constant_columns))
        return "\n".join(lines) + "\n"


def window_correlation_report(columns: list[str], matrix: np.ndarray) -> CorrelationReport:
    """Pearson correlations between every pair of columns.

    Constant columns cannot be normalized; their correlations are reported
    as 0 (self-correlation included) and the columns are listed.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != len(columns):
        raise ValueError("matrix width must match column names")
    stds = matrix.std(axis=0)
    constant = stds == 0
    centered = matrix - matrix.mean(axis=0)
    safe_stds = np.where(constant, 1.0, stds)
    normed = centered / safe_stds
    corr = normed.T @ normed / len(matrix)
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    return CorrelationReport(
        columns=list(columns),
        matrix=corr,
        constant_columns=[c for c, bad in zip(columns, constant) if bad],
    )
