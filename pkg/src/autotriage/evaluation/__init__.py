from .ait import IngestStats, discover_files, ingest_ait
from .correlate import CorrelationReport, window_correlation_report
from .curves import CurvePoint, curve_table, reduction_fnr_curve, threshold_for_reduction
from .folds import Fold, FoldPlan, plan_time_series_folds
from .metrics import MetricsReport, auc_pairwise_oracle, compute_metrics, roc_auc
from .pipeline import (
    ExperimentResult,
    baseline_scores,
    permutation_importance,
    run_experiment,
    training_set_from_table,
)
from .stream import FeatureTable, NormalizedStream, featurize, stream_from_jsonl, write_stream_jsonl
from .synth import generate_ait_like

__all__ = [
    "CorrelationReport",
    "CurvePoint",
    "ExperimentResult",
    "FeatureTable",
    "Fold",
    "FoldPlan",
    "IngestStats",
    "MetricsReport",
    "NormalizedStream",
    "auc_pairwise_oracle",
    "baseline_scores",
    "compute_metrics",
    "curve_table",
    "discover_files",
    "featurize",
    "generate_ait_like",
    "ingest_ait",
    "permutation_importance",
    "plan_time_series_folds",
    "reduction_fnr_curve",
    "roc_auc",
    "run_experiment",
    "stream_from_jsonl",
    "threshold_for_reduction",
    "training_set_from_table",
    "window_correlation_report",
    "write_stream_jsonl",
]
