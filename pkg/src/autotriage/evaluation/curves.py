"""Alert-reduction vs false-negative-rate tradeoff curves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import compute_metrics


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    reduction: float
    fnr: float


def reduction_fnr_curve(scores, labels, thresholds) -> list[CurvePoint]:
    """One (reduction, fnr) point per threshold; thresholds must ascend."""
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    points = []
    for threshold in thresholds:
        report = compute_metrics(scores, labels, threshold)
        points.append(CurvePoint(threshold=float(threshold),
                                 reduction=report.alert_reduction, fnr=report.fnr))
    return points


def curve_table(points: list[CurvePoint]) -> str:
    lines = ["threshold,reduction,fnr"]
    lines += [f"{p.threshold!r},{p.reduction!r},{p.fnr!r}" for p in points]
    return "\n".join(lines) + "\n"


def threshold_for_reduction(scores, target_reduction: float) -> float:
    """Smallest threshold whose alert reduction is closest to the target.

    Used to put the baseline at the same reduction operating point as the
    classifier before comparing false-negative rates.
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    if n == 0:
        return 0.0
    ordered = np.sort(scores)
    # candidate thresholds: just above each distinct score, plus 0
    candidates = np.unique(ordered)
    eps = 1e-12
    best_threshold = 0.0
    best_gap = abs(0.0 - target_reduction)
    for c in candidates:
        threshold = float(c + eps)
        reduction = np.count_nonzero(scores < threshold) / n
        gap = abs(reduction - target_reduction)
        if gap < best_gap:
            best_gap = gap
            best_threshold = threshold
    return best_threshold
