"""Offline experiment orchestration: featurize, fold, train, report."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..features import FeatureConfig
from ..features.windows import baseline_slot
from ..models import (
    ForestParams,
    GbdtParams,
    LogisticParams,
    ModelArtifact,
    TrainingSet,
    predict_matrix,
    serialize,
    train_forest,
    train_gbdt,
    train_logistic,
)
from .curves import threshold_for_reduction
from .folds import plan_time_series_folds
from .metrics import ZERO_CONVENTION, MetricsReport, compute_metrics, roc_auc
from .stream import FeatureTable, NormalizedStream, featurize

AVERAGED_METRICS = ("accuracy", "precision", "recall", "f1", "roc_auc",
                    "alert_reduction", "fnr")

_TRAINERS: dict[str, Callable] = {
    "gbdt": lambda data, params, seed: train_gbdt(
        data, params if isinstance(params, GbdtParams) else GbdtParams(seed=seed)),
    "logistic": lambda data, params, seed: train_logistic(
        data, params if isinstance(params, LogisticParams) else LogisticParams(seed=seed)),
    "forest": lambda data, params, seed: train_forest(
        data, params if isinstance(params, ForestParams) else ForestParams(seed=seed)),
}


@dataclass
class FoldOutcome:
    fold: int
    model_report: MetricsReport
    baseline_report: MetricsReport
    baseline_threshold: float


@dataclass
class ExperimentResult:
    model_kind: str
    outcomes: list[FoldOutcome]
    model_average: dict[str, float]
    baseline_average: dict[str, float]
    artifacts: list[bytes] = field(default_factory=list)
    table: Optional[FeatureTable] = None

    def metrics_table(self) -> str:
        """Deterministic CSV rendering of per-fold and averaged metrics."""
        lines = [f"# conventions: {ZERO_CONVENTION}",
                 "model,fold," + ",".join(AVERAGED_METRICS) + ",threshold"]
        for outcome in self.outcomes:
            report = outcome.model_report
            lines.append(
                f"{self.model_kind},{outcome.fold},"
                + ",".join(repr(getattr(report, m)) for m in AVERAGED_METRICS)
                + f",{report.threshold!r}"
            )
            base = outcome.baseline_report
            lines.append(
                f"baseline,{outcome.fold},"
                + ",".join(repr(getattr(base, m)) for m in AVERAGED_METRICS)
                + f",{base.threshold!r}"
            )
        lines.append(
            f"{self.model_kind},average,"
            + ",".join(repr(self.model_average[m]) for m in AVERAGED_METRICS) + ","
        )
        lines.append(
            "baseline,average,"
            + ",".join(repr(self.baseline_average[m]) for m in AVERAGED_METRICS) + ","
        )
        return "\n".join(lines) + "\n"


def training_set_from_table(table: FeatureTable, rows: np.ndarray) -> TrainingSet:
    return TrainingSet(
        X=table.X[rows],
        y=table.labels[rows],
        timestamps=table.timestamps[rows],
        alert_ids=[table.ids[i] for i in rows],
        feature_names=list(table.names),
    )


def run_experiment(stream: NormalizedStream, config: FeatureConfig, k: int = 2,
                   model_kind: str = "gbdt", params=None, threshold: float = 0.5,
                   seed: int = 0, warmup: Optional[float] = None,
                   table: Optional[FeatureTable] = None) -> ExperimentResult:
    """Time-series CV of one model against the rate baseline.

    The baseline scores each test alert with its own baseline feature slot
    (a global category rate) and is evaluated at the threshold that puts
    its alert reduction closest to the model's, which is the operating
    point the false-negative comparison is defined at.
    """
    if table is None:
        table = featurize(stream, config, warmup=warmup)
    rows = table.trainable_rows()
    plan = plan_time_series_folds(table.timestamps[rows], table.labels[rows], k)
    baseline_idx = table.names.index(baseline_slot(config))
    trainer = _TRAINERS[model_kind]

    outcomes = []
    artifacts = []
    for fold_no, fold in enumerate(plan.folds):
        train_rows = rows[fold.train]
        test_rows = rows[fold.test]
        artifact = trainer(training_set_from_table(table, train_rows), params, seed)
        artifacts.append(serialize(artifact))
        scores = predict_matrix(artifact, table.X[test_rows])
        y_test = table.labels[test_rows]
        model_report = compute_metrics(scores, y_test, threshold)
        baseline_scores = table.X[test_rows][:, baseline_idx]
        base_threshold = threshold_for_reduction(baseline_scores,
                                                 model_report.alert_reduction)
        baseline_report = compute_metrics(baseline_scores, y_test, base_threshold)
        outcomes.append(FoldOutcome(
            fold=fold_no,
            model_report=model_report,
            baseline_report=baseline_report,
            baseline_threshold=base_threshold,
        ))

    def average(reports: list[MetricsReport]) -> dict[str, float]:
        return {
            m: float(np.mean([getattr(r, m) for r in reports])) for m in AVERAGED_METRICS
        }

    return ExperimentResult(
        model_kind=model_kind,
        outcomes=outcomes,
        model_average=average([o.model_report for o in outcomes]),
        baseline_average=average([o.baseline_report for o in outcomes]),
        artifacts=artifacts,
        table=table,
    )


def baseline_scores(table: FeatureTable, config: FeatureConfig,
                    rows: Optional[np.ndarray] = None) -> np.ndarray:
    """The baseline is the raw global category rate feature, no classifier."""
    idx = table.names.index(baseline_slot(config))
    if rows is None:
        return table.X[:, idx].copy()
    return table.X[rows][:, idx].copy()


def permutation_importance(artifact: ModelArtifact, X: np.ndarray, y: np.ndarray,
                           seed: int = 0) -> list[tuple[str, float]]:
    """AUC drop per feature after shuffling that column, largest first."""
    rng = np.random.default_rng(seed)
    base_auc = roc_auc(predict_matrix(artifact, X), y)
    drops = []
    for j, name in enumerate(artifact.feature_names):
        shuffled = X.copy()
        rng_col = np.random.default_rng(rng.integers(2**32))
        shuffled[:, j] = rng_col.permutation(shuffled[:, j])
        drops.append((name, base_auc - roc_auc(predict_matrix(artifact, shuffled), y)))
    drops.sort(key=lambda item: -item[1])
    return drops
