"""Normalized event streams and feature-table construction.

A :class:`NormalizedStream` is the columnar form of an alert stream sorted
by creation time: one row per alert with its (optional) resolution. It is
what the offline pipeline replays through the feature store, one event at
a time in event-time order, assembling each alert's vector strictly before
the alert itself or anything later is recorded.
"""
from __future__ import annotations

import heapq
import json
import sys
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np

from ..alerts import ActionKind, LabelKind, categorize, extract_static_features, parse_alert
from ..features import ActionCountStore, FeatureAssembler, FeatureConfig, Workflow, slot_names


@dataclass
class NormalizedStream:
    """Alert rows sorted by creation time. ``investigated``/``label`` are
    -1 when the alert has no resolution; ``resolved_at`` is NaN then."""

    ids: list[str]
    tenants: list[str]
    categories: list[str]
    entities: list[tuple[str, ...]]
    created: np.ndarray
    resolved: np.ndarray
    investigated: np.ndarray  # int8: 1/0, -1 unresolved
    label: np.ndarray  # int8: 1 malicious, 0 benign, -1 none
    statics: Optional[np.ndarray] = None  # (n, 4) for the full workflow

    def __len__(self) -> int:
        return len(self.ids)

    def sort(self) -> "NormalizedStream":
        order = np.argsort(self.created, kind="stable")
        return self.take(order)

    def take(self, order: np.ndarray | list[int]) -> "NormalizedStream":
        order = np.asarray(order)
        return NormalizedStream(
            ids=[self.ids[i] for i in order],
            tenants=[self.tenants[i] for i in order],
            categories=[self.categories[i] for i in order],
            entities=[self.entities[i] for i in order],
            created=self.created[order],
            resolved=self.resolved[order],
            investigated=self.investigated[order],
            label=self.label[order],
            statics=None if self.statics is None else self.statics[order],
        )

    def subsample_per_tenant(self, fraction: float, seed: int) -> "NormalizedStream":
        """Seeded uniform subsample of alerts within each tenant."""
        rng = np.random.default_rng(seed)
        keep = np.zeros(len(self), dtype=bool)
        tenants = np.asarray(self.tenants, dtype=object)
        for tenant in sorted(set(self.tenants)):
            rows = np.flatnonzero(tenants == tenant)
            k = max(1, int(round(fraction * len(rows))))
            chosen = rng.choice(rows, size=k, replace=False)
            keep[chosen] = True
        return self.take(np.flatnonzero(keep))


@dataclass
class FeatureTable:
    ids: list[str]
    tenants: list[str]
    timestamps: np.ndarray
    labels: np.ndarray  # workflow target; -1 for unresolved rows
    X: np.ndarray
    names: list[str]
    warmup_mask: np.ndarray = field(default=None)  # True = seeded-only row

    def trainable_rows(self) -> np.ndarray:
        mask = self.labels >= 0
        if self.warmup_mask is not None:
            mask &= ~self.warmup_mask
        return np.flatnonzero(mask)


def stream_from_jsonl(fh: IO[str]) -> NormalizedStream:
    """Read normalized alert records (one JSON object per line)."""
    ids, tenants, categories, entities = [], [], [], []
    created, resolved, investigated, label = [], [], [], []
    statics = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        alert = parse_alert(record)
        categorize(alert)
        ids.append(alert.id)
        tenants.append(sys.intern(alert.tenant_id))
        categories.append(sys.intern(alert.category.value))
        entities.append(tuple(sys.intern(e.identifier) for e in alert.entities))
        created.append(alert.created_at)
        res = alert.resolution
        if res is None:
            resolved.append(float("nan"))
            investigated.append(-1)
            label.append(-1)
        else:
            resolved.append(res.resolved_at)
            investigated.append(1 if res.action == ActionKind.INVESTIGATED else 0)
            if res.label is None:
                label.append(-1)
            else:
                label.append(1 if res.label == LabelKind.MALICIOUS else 0)
        statics.append(extract_static_features(alert))
    stream = NormalizedStream(
        ids=ids, tenants=tenants, categories=categories, entities=entities,
        created=np.asarray(created, dtype=np.float64),
        resolved=np.asarray(resolved, dtype=np.float64),
        investigated=np.asarray(investigated, dtype=np.int8),
        label=np.asarray(label, dtype=np.int8),
        statics=np.asarray(statics, dtype=np.float64),
    )
    return stream.sort()


def write_stream_jsonl(fh: IO[str], stream: NormalizedStream) -> None:
    for i in range(len(stream)):
        record = {
            "id": stream.ids[i],
            "tenant_id": stream.tenants[i],
            "created_at": stream.created[i],
            "title": stream.categories[i],
            "category": stream.categories[i],
            "entities": [{"identifier": e} for e in stream.entities[i]],
        }
        if stream.statics is not None:
            record["entity_relationship_count"] = int(stream.statics[i][1])
            record["mitre_tactic_max"] = int(stream.statics[i][2])
            record["mitre_techniques"] = [f"T{j}" for j in range(int(stream.statics[i][3]))]
        if stream.investigated[i] >= 0:
            record["resolution"] = {
                "action": ("investigated" if stream.investigated[i] == 1
                           else "not_investigated"),
                "resolved_at": stream.resolved[i],
            }
            if stream.label[i] >= 0:
                record["resolution"]["label"] = (
                    "malicious" if stream.label[i] == 1 else "benign"
                )
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def featurize(stream: NormalizedStream, config: FeatureConfig,
              warmup: Optional[float] = None) -> FeatureTable:
    """Replay the stream through a fresh store and assemble every alert's
    feature vector at its creation time.

    Pending resolutions sit in a heap keyed by resolution time and are
    ingested as the replay clock passes them, so no vector ever sees an
    event at or after its own timestamp. Rows inside the warm-up prefix
    only seed counters and are flagged out of the training set.
    """
    if warmup is None:
        warmup = 30 * 86400.0 if config.workflow == Workflow.FULL else 0.0
    store = ActionCountStore(config, validate=False)
    assembler = FeatureAssembler(store)
    n = len(stream)
    names = slot_names(config)
    X = np.zeros((n, len(names)), dtype=np.float64)
    pending: list[tuple[float, int]] = []
    start = float(stream.created[0]) if n else 0.0
    warmup_mask = np.zeros(n, dtype=bool)
    target = stream.label if config.workflow == Workflow.AIT else stream.investigated

    for i in range(n):
        t = float(stream.created[i])
        while pending and pending[0][0] <= t:
            _, j = heapq.heappop(pending)
            _ingest_resolution(store, stream, j)
        in_warmup = t < start + warmup
        warmup_mask[i] = in_warmup
        if not in_warmup:
            X[i] = assembler.assemble_raw(
                t, stream.tenants[i], stream.categories[i], stream.entities[i]
            )
            if config.workflow == Workflow.FULL and stream.statics is not None:
                X[i, -4:] = stream.statics[i]
        store.record_created_raw(
            t, stream.tenants[i], stream.categories[i], stream.entities[i]
        )
        if stream.investigated[i] >= 0:
            heapq.heappush(pending, (float(stream.resolved[i]), i))

    return FeatureTable(
        ids=list(stream.ids),
        tenants=list(stream.tenants),
        timestamps=stream.created.copy(),
        labels=np.asarray(target, dtype=np.int64),
        X=X,
        names=names,
        warmup_mask=warmup_mask,
    )


def _ingest_resolution(store: ActionCountStore, stream: NormalizedStream, j: int) -> None:
    store.record_resolution_raw(
        float(stream.created[j]),
        float(stream.resolved[j]),
        stream.tenants[j],
        stream.categories[j],
        stream.entities[j],
        investigated=stream.investigated[j] == 1,
        label=None if stream.label[j] < 0 else bool(stream.label[j]),
    )
