"""Live scoring loop: score, auto-close or enqueue, ingest feedback, retrain.

State of record is an append-only event log (alerts, resolutions, config
changes) under the state directory; the feature store, the queue and the
sampler are derived state that a restart rebuilds from a checkpoint plus
the log tail. Scoring fails open: if the model is missing or the alert is
too stale for exact features, the alert goes to the analyst queue at
maximum priority rather than being dropped.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from queue import Queue
from typing import Callable, Iterable, Optional

import numpy as np

from ..alerts import ActionKind, Alert, LabelKind, ResolutionEvent, categorize, parse_alert
from ..errors import (
    DuplicateResolution,
    EmptyData,
    UnknownAlert,
    ValidationRegression,
)
from ..evaluation.folds import plan_time_series_folds
from ..evaluation.metrics import roc_auc
from ..features import ActionCountStore, FeatureAssembler, FeatureConfig
from ..models import (
    GbdtParams,
    ModelArtifact,
    TrainingSet,
    attribute,
    deserialize,
    predict,
    predict_matrix,
    serialize,
    train_gbdt,
)
from .config import ServiceConfig
from .sampler import StratifiedSampler

EVENT_LOG_NAME = "events.jsonl"
CHECKPOINT_NAME = "checkpoint.json"

PROVENANCE_HUMAN = "human"
PROVENANCE_AUTO_CLOSED = "auto_closed"


@dataclass
class QueueEntry:
    alert_id: str
    tenant: str
    category: str
    entities: list[str]
    created_at: float
    enqueued_at: float
    raw_probability: Optional[float]  # None = unscored fail-open entry
    threat_score: Optional[float]
    top_features: list[tuple[str, float, str]]
    sampled_for_review: bool
    model_version: int
    features: Optional[list[float]] = None

    def sort_key(self):
        unscored_first = 0 if self.raw_probability is None else 1
        return (unscored_first, -(self.raw_probability or 0.0), self.enqueued_at,
                self.alert_id)


@dataclass
class Disposition:
    alert_id: str
    disposition: str  # queued | auto_closed | failed_open
    raw_probability: Optional[float]
    threat_score: Optional[float]
    sampled_for_review: bool
    model_version: int
    entry: Optional[QueueEntry] = None


@dataclass
class TrainingRow:
    alert_id: str
    tenant: str
    timestamp: float
    features: list[float]
    investigated: int
    label: int  # -1 unlabeled
    provenance: str


class TriageService:
    def __init__(self, config: ServiceConfig, feature_config: Optional[FeatureConfig] = None,
                 model: Optional[ModelArtifact] = None, state_dir: Optional[str | Path] = None):
        self.config = config
        self.feature_config = feature_config or (
            FeatureConfig.ait() if config.workflow == "ait" else FeatureConfig.full()
        )
        self.store = ActionCountStore(self.feature_config, validate=True, auto_compact=False)
        self.assembler = FeatureAssembler(self.store)
        self._model = model
        self._model_version = 1 if model is not None else 0
        self._lock = threading.RLock()
        self.queue: dict[str, QueueEntry] = {}
        self.dispositions: dict[str, str] = {}
        self.sampler = StratifiedSampler(
            period_seconds=config.sample_period_seconds,
            budget_floor=config.sample_budget_floor,
            budget_fraction=config.sample_budget_fraction,
        )
        self.training_rows: list[TrainingRow] = []
        self._latencies: list[float] = []
        self.scored_total = 0
        self.auto_closed_total = 0
        self.sampled_total = 0
        self.failed_open_total = 0
        self._seq = 0
        self._subscribers: list[Queue] = []
        self._state_dir = Path(state_dir or config.state_dir)
        self._state_dir.mkdir(parents=True, exist_ok=True)
        self._log_fh = open(self._state_dir / EVENT_LOG_NAME, "a", encoding="utf-8")

    # ------------------------------------------------------------------ #
    # model management
    # ------------------------------------------------------------------ #

    @property
    def model(self) -> Optional[ModelArtifact]:
        return self._model

    @property
    def model_version(self) -> int:
        return self._model_version

    def swap_model(self, artifact: ModelArtifact) -> int:
        with self._lock:
            self._model = artifact
            self._model_version += 1
            return self._model_version

    @staticmethod
    def load_model(path: str | Path) -> ModelArtifact:
        return deserialize(Path(path).read_bytes())

    # ------------------------------------------------------------------ #
    # scoring
    # ------------------------------------------------------------------ #

    def score_record(self, record: dict) -> Disposition:
        alert = parse_alert(record)
        return self.score_alert(alert)

    def score_alert(self, alert: Alert) -> Disposition:
        """Score one alert and either enqueue it or auto-close it.

        The feature vector is assembled strictly before the alert itself is
        recorded. Order inside: assemble, predict, decide, then record the
        sighting (and, for counted auto-closures, a synthetic benign
        resolution at the same instant).
        """
        start = time.perf_counter()
        with self._lock:
            categorize(alert)
            t = alert.created_at
            model = self._model
            version = self._model_version
            stale = (
                self.store.watermark != float("-inf")
                and t < self.store.watermark - self.feature_config.lateness_bound
            )
            features: Optional[np.ndarray] = None
            probability: Optional[float] = None
            if model is not None and not stale:
                features = self.assembler.assemble(alert, t)
                probability = predict(model, features)

            if probability is None:
                disposition = self._enqueue(alert, None, None, [], False, version)
                disposition.disposition = "failed_open"
                self.failed_open_total += 1
            elif probability < self.config.close_threshold:
                if self.sampler.decide(alert.category.value, t):
                    top = self._top_features(model, features)
                    disposition = self._enqueue(alert, probability, features, top,
                                                True, version)
                    self.sampled_total += 1
                else:
                    disposition = self._auto_close(alert, probability, version)
            else:
                top = self._top_features(model, features)
                disposition = self._enqueue(alert, probability, features, top,
                                            False, version)

            if not stale:
                self.store.record_alert_created(alert)
                if disposition.disposition == "auto_closed" and not self.config.strict_counters:
                    self.store.record_resolution(ResolutionEvent(
                        alert_id=alert.id,
                        action=ActionKind.NOT_INVESTIGATED,
                        resolved_at=t,
                        label=LabelKind.BENIGN,
                    ))
            self.scored_total += 1
            self._append_log({
                "kind": "alert",
                "alert": _alert_payload(alert),
                "disposition": disposition.disposition,
                "probability": disposition.raw_probability,
                "sampled": disposition.sampled_for_review,
                "model_version": version,
            })
            self._latencies.append(time.perf_counter() - start)
            if len(self._latencies) > 200_000:
                del self._latencies[:100_000]
            return disposition

    def _top_features(self, model: ModelArtifact, features: np.ndarray
                      ) -> list[tuple[str, float, str]]:
        att = attribute(model, features)
        ranked = att.ranked(model.feature_names, top_k=self.config.top_k_features)
        return [(name, value, "increases" if value >= 0 else "decreases")
                for name, value in ranked]

    def _enqueue(self, alert: Alert, probability: Optional[float],
                 features: Optional[np.ndarray], top: list[tuple[str, float, str]],
                 sampled: bool, version: int) -> Disposition:
        entry = QueueEntry(
            alert_id=alert.id,
            tenant=alert.tenant_id,
            category=alert.category.value,
            entities=[e.identifier for e in alert.entities],
            created_at=alert.created_at,
            enqueued_at=alert.created_at,
            raw_probability=probability,
            threat_score=None if probability is None else round(probability * 10, 1),
            top_features=top,
            sampled_for_review=sampled,
            model_version=version,
            features=None if features is None else [float(v) for v in features],
        )
        self.queue[alert.id] = entry
        self.dispositions[alert.id] = "queued"
        self._emit({"type": "enqueued", "entry": entry_payload(entry)})
        return Disposition(
            alert_id=alert.id, disposition="queued",
            raw_probability=probability, threat_score=entry.threat_score,
            sampled_for_review=sampled, model_version=version, entry=entry,
        )

    def _auto_close(self, alert: Alert, probability: float, version: int) -> Disposition:
        self.auto_closed_total += 1
        self.dispositions[alert.id] = "auto_closed"
        self._emit({"type": "closed", "alert_id": alert.id})
        return Disposition(
            alert_id=alert.id, disposition="auto_closed",
            raw_probability=probability, threat_score=round(probability * 10, 1),
            sampled_for_review=False, model_version=version,
        )

    # ------------------------------------------------------------------ #
    # feedback and retraining
    # ------------------------------------------------------------------ #

    def ingest_feedback(self, resolution: ResolutionEvent) -> QueueEntry:
        with self._lock:
            entry = self.queue.get(resolution.alert_id)
            if entry is None:
                if resolution.alert_id in self.dispositions:
                    raise DuplicateResolution(resolution.alert_id)
                raise UnknownAlert(resolution.alert_id)
            try:
                self.store.record_resolution(resolution)
            except UnknownAlert:
                pass  # stale fail-open entries were never store-recorded
            del self.queue[resolution.alert_id]
            self.dispositions[resolution.alert_id] = "resolved"
            investigated = 1 if resolution.action == ActionKind.INVESTIGATED else 0
            label = -1
            if resolution.label is not None:
                label = 1 if resolution.label == LabelKind.MALICIOUS else 0
            if entry.features is not None:
                self.training_rows.append(TrainingRow(
                    alert_id=entry.alert_id,
                    tenant=entry.tenant,
                    timestamp=entry.created_at,
                    features=entry.features,
                    investigated=investigated,
                    label=label,
                    provenance=PROVENANCE_HUMAN,
                ))
            if entry.sampled_for_review:
                positive = investigated == 1
                self.sampler.record_outcome(entry.category, positive)
            self._append_log({
                "kind": "resolution",
                "alert_id": resolution.alert_id,
                "action": resolution.action.value,
                "label": None if resolution.label is None else resolution.label.value,
                "resolved_at": resolution.resolved_at,
                "analyst_id": resolution.analyst_id,
            })
            self._emit({"type": "removed", "alert_id": resolution.alert_id})
            return entry

    def training_set(self) -> TrainingSet:
        """Human-resolved alerts only; auto-closures never become samples."""
        rows = [r for r in self.training_rows if r.provenance == PROVENANCE_HUMAN]
        if not rows:
            raise EmptyData("no human-resolved training rows yet")
        target = (
            [r.label for r in rows] if self.feature_config.workflow.value == "ait"
            else [r.investigated for r in rows]
        )
        return TrainingSet(
            X=np.asarray([r.features for r in rows], dtype=np.float64),
            y=np.asarray(target, dtype=np.int64),
            timestamps=np.asarray([r.timestamp for r in rows]),
            alert_ids=[r.alert_id for r in rows],
            feature_names=list(self.assembler.names),
        )

    def retrain_job(self, params: Optional[GbdtParams] = None,
                    holdout_fraction: float = 0.2,
                    max_regression: float = 0.02) -> ModelArtifact:
        """Train a candidate on the human-label history and hot-swap it in,
        unless its holdout AUC regresses more than allowed."""
        with self._lock:
            data = self.training_set().sorted_by_time()
            current = self._model
        n = len(data)
        holdout_n = max(1, int(n * holdout_fraction))
        train = data.subset(np.arange(0, n - holdout_n))
        holdout = data.subset(np.arange(n - holdout_n, n))
        candidate = train_gbdt(train, params or GbdtParams())
        if current is not None and len(set(holdout.y.tolist())) == 2:
            new_auc = roc_auc(predict_matrix(candidate, holdout.X), holdout.y)
            old_auc = roc_auc(predict_matrix(current, holdout.X), holdout.y)
            if new_auc < old_auc - max_regression:
                raise ValidationRegression(
                    f"candidate holdout auc {new_auc:.4f} vs current {old_auc:.4f}"
                )
        self.swap_model(candidate)
        return candidate

    # ------------------------------------------------------------------ #
    # queue and metrics
    # ------------------------------------------------------------------ #

    def queue_listing(self, tenant: Optional[str] = None,
                      limit: Optional[int] = None) -> list[QueueEntry]:
        with self._lock:
            entries = [
                e for e in self.queue.values() if tenant is None or e.tenant == tenant
            ]
        entries.sort(key=QueueEntry.sort_key)
        return entries[:limit] if limit else entries

    def get_status(self, alert_id: str) -> Optional[dict]:
        with self._lock:
            status = self.dispositions.get(alert_id)
            if status is None:
                return None
            payload = {"alert_id": alert_id, "status": status}
            entry = self.queue.get(alert_id)
            if entry is not None:
                payload["entry"] = entry_payload(entry)
            return payload

    def latency_percentiles(self) -> dict[str, float]:
        if not self._latencies:
            return {"p50_ms": 0.0, "p95_ms": 0.0, "p99_ms": 0.0}
        arr = np.asarray(self._latencies) * 1000.0
        return {
            "p50_ms": float(np.percentile(arr, 50)),
            "p95_ms": float(np.percentile(arr, 95)),
            "p99_ms": float(np.percentile(arr, 99)),
        }

    def metrics(self) -> dict:
        with self._lock:
            fnr = self.sampler.fnr_estimate()
            return {
                "scored_total": self.scored_total,
                "auto_closed_total": self.auto_closed_total,
                "sampled_total": self.sampled_total,
                "failed_open_total": self.failed_open_total,
                "alert_reduction": (
                    self.auto_closed_total / self.scored_total if self.scored_total else 0.0
                ),
                "sampled_fnr": fnr,
                "queue_depth": len(self.queue),
                "close_threshold": self.config.close_threshold,
                "model_version": self._model_version,
                "watermark": (
                    None if self.store.watermark == float("-inf") else self.store.watermark
                ),
                **self.latency_percentiles(),
            }

    def set_threshold(self, threshold: float) -> None:
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        with self._lock:
            old = self.config.close_threshold
            self.config.close_threshold = threshold
            self._append_log({
                "kind": "config",
                "field": "close_threshold",
                "old": old,
                "new": threshold,
                "wall_time": time.time(),
            })

    # ------------------------------------------------------------------ #
    # event log, checkpointing, recovery
    # ------------------------------------------------------------------ #

    def _append_log(self, payload: dict) -> None:
        self._seq += 1
        payload["seq"] = self._seq
        self._log_fh.write(json.dumps(payload, sort_keys=True) + "\n")

    def flush(self) -> None:
        with self._lock:
            self._log_fh.flush()

    def close(self) -> None:
        with self._lock:
            self._log_fh.flush()
            self._log_fh.close()

    def checkpoint(self, path: Optional[str | Path] = None) -> Path:
        """Write derived state (store, queue, sampler, training rows) plus the
        log sequence number it covers."""
        target = Path(path) if path else self._state_dir / CHECKPOINT_NAME
        with self._lock:
            self.flush()
            document = {
                "version": 1,
                "seq": self._seq,
                "model_version": self._model_version,
                "store": self.store.checkpoint_bytes().decode(),
                "queue": [entry_payload(e, include_features=True)
                          for e in sorted(self.queue.values(), key=lambda e: e.alert_id)],
                "dispositions": dict(sorted(self.dispositions.items())),
                "sampler": self.sampler.state(),
                "training_rows": [_row_payload(r) for r in self.training_rows],
                "counters": {
                    "scored_total": self.scored_total,
                    "auto_closed_total": self.auto_closed_total,
                    "sampled_total": self.sampled_total,
                    "failed_open_total": self.failed_open_total,
                },
                "close_threshold": self.config.close_threshold,
            }
        tmp = target.with_suffix(".tmp")
        tmp.write_text(json.dumps(document, sort_keys=True, separators=(",", ":")))
        tmp.replace(target)
        return target

    @classmethod
    def recover(cls, config: ServiceConfig, state_dir: str | Path,
                model: Optional[ModelArtifact] = None,
                feature_config: Optional[FeatureConfig] = None) -> "TriageService":
        """Restore from the checkpoint (if any) and replay the log tail."""
        state_dir = Path(state_dir)
        checkpoint_path = state_dir / CHECKPOINT_NAME
        service = cls(config, feature_config=feature_config, model=model,
                      state_dir=state_dir)
        last_seq = 0
        if checkpoint_path.exists():
            document = json.loads(checkpoint_path.read_text())
            last_seq = document["seq"]
            service.store = ActionCountStore.from_checkpoint(document["store"].encode())
            service.assembler = FeatureAssembler(service.store)
            service.queue = {
                e["alert_id"]: _entry_from_payload(e) for e in document["queue"]
            }
            service.dispositions = dict(document["dispositions"])
            service.sampler = StratifiedSampler.restore(
                document["sampler"], config.sample_period_seconds,
                config.sample_budget_floor, config.sample_budget_fraction,
            )
            service.training_rows = [_row_from_payload(r)
                                     for r in document["training_rows"]]
            counters = document["counters"]
            service.scored_total = counters["scored_total"]
            service.auto_closed_total = counters["auto_closed_total"]
            service.sampled_total = counters["sampled_total"]
            service.failed_open_total = counters["failed_open_total"]
            service.config.close_threshold = document["close_threshold"]
            service._model_version = max(service._model_version,
                                         document["model_version"])
        log_path = state_dir / EVENT_LOG_NAME
        if log_path.exists():
            service._replay_log(log_path, after_seq=last_seq)
        return service

    def _replay_log(self, path: Path, after_seq: int) -> None:
        """Re-apply logged events without re-appending them."""
        original_fh = self._log_fh

        class _Null:
            def write(self, _):
                pass

            def flush(self):
                pass

        self._log_fh = _Null()  # type: ignore[assignment]
        max_seq = after_seq
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    event = json.loads(line)
                    seq = event.get("seq", 0)
                    max_seq = max(max_seq, seq)
                    if seq <= after_seq:
                        continue
                    kind = event.get("kind")
                    if kind == "alert":
                        self.score_record(event["alert"])
                    elif kind == "resolution":
                        try:
                            self.ingest_feedback(ResolutionEvent(
                                alert_id=event["alert_id"],
                                action=ActionKind(event["action"]),
                                resolved_at=event["resolved_at"],
                                label=(LabelKind(event["label"])
                                       if event.get("label") else None),
                                analyst_id=event.get("analyst_id"),
                            ))
                        except (UnknownAlert, DuplicateResolution):
                            pass
                    elif kind == "config":
                        self.config.close_threshold = event["new"]
        finally:
            self._log_fh = original_fh
            self._seq = max(self._seq, max_seq)

    # ------------------------------------------------------------------ #
    # replay driver and live stream
    # ------------------------------------------------------------------ #

    def replay_stream(self, events: Iterable[tuple[str, dict]],
                      feedback: bool = True) -> None:
        """Drive the service from (kind, payload) tuples in event-time order.

        ``alert`` payloads are normalized records; ``resolution`` payloads
        carry alert_id/action/label/resolved_at. Resolutions for alerts that
        were auto-closed are dropped, as no analyst ever saw them.
        """
        for kind, payload in events:
            if kind == "alert":
                self.score_record(payload)
            elif kind == "resolution" and feedback:
                try:
                    self.ingest_feedback(ResolutionEvent(
                        alert_id=payload["alert_id"],
                        action=ActionKind(payload["action"]),
                        resolved_at=payload["resolved_at"],
                        label=(LabelKind(payload["label"])
                               if payload.get("label") else None),
                        analyst_id=payload.get("analyst_id"),
                    ))
                except (UnknownAlert, DuplicateResolution):
                    continue

    def subscribe(self) -> Queue:
        q: Queue = Queue(maxsize=1000)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _emit(self, event: dict) -> None:
        for q in list(self._subscribers):
            try:
                q.put_nowait(event)
            except Exception:
                pass


def entry_payload(entry: QueueEntry, include_features: bool = False) -> dict:
    payload = {
        "alert_id": entry.alert_id,
        "tenant": entry.tenant,
        "category": entry.category,
        "entities": list(entry.entities),
        "created_at": entry.created_at,
        "enqueued_at": entry.enqueued_at,
        "raw_probability": entry.raw_probability,
        "threat_score": entry.threat_score,
        "top_features": [
            {"name": n, "contribution": c, "direction": d}
            for n, c, d in entry.top_features
        ],
        "sampled_for_review": entry.sampled_for_review,
        "model_version": entry.model_version,
    }
    if include_features:
        payload["features"] = entry.features
    return payload


def _entry_from_payload(payload: dict) -> QueueEntry:
    return QueueEntry(
        alert_id=payload["alert_id"],
        tenant=payload["tenant"],
        category=payload["category"],
        entities=list(payload.get("entities", [])),
        created_at=payload["created_at"],
        enqueued_at=payload["enqueued_at"],
        raw_probability=payload["raw_probability"],
        threat_score=payload["threat_score"],
        top_features=[(f["name"], f["contribution"], f["direction"])
                      for f in payload["top_features"]],
        sampled_for_review=payload["sampled_for_review"],
        model_version=payload["model_version"],
        features=payload.get("features"),
    )


def _row_payload(row: TrainingRow) -> dict:
    return {
        "alert_id": row.alert_id,
        "tenant": row.tenant,
        "timestamp": row.timestamp,
        "features": row.features,
        "investigated": row.investigated,
        "label": row.label,
        "provenance": row.provenance,
    }


def _row_from_payload(payload: dict) -> TrainingRow:
    return TrainingRow(**payload)


def _alert_payload(alert: Alert) -> dict:
    return {
        "id": alert.id,
        "tenant_id": alert.tenant_id,
        "created_at": alert.created_at,
        "title": alert.title,
        "detector": alert.detector,
        "rule": alert.rule,
        "severity": alert.severity,
        "entities": [{"identifier": e.identifier, "kind": e.kind} for e in alert.entities],
        "entity_relationship_count": alert.entity_relationship_count,
        "mitre_techniques": alert.mitre_techniques,
        "mitre_tactic_max": alert.mitre_tactic_max,
        "category": alert.category.value if alert.category else None,
    }
