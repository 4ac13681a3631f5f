"""Fixed-order feature vector assembly and the feature dump format."""
from __future__ import annotations

import csv
from typing import IO, Optional, Sequence

import numpy as np

from ..alerts import Alert, extract_static_features
from .store import ActionCountStore, ActionSet, Scope
from .windows import FeatureConfig, Workflow, slot_names


class FeatureAssembler:
    """Builds the per-alert feature vector from an :class:`ActionCountStore`.

    Every dynamic slot is computed strictly from events before the scoring
    time; the alert being scored must not have been recorded yet (or, if it
    has, the strict window bounds keep it invisible at its own timestamp).
    """

    def __init__(self, store: ActionCountStore, config: Optional[FeatureConfig] = None):
        self.store = store
        self.config = config or store.config
        self.names = slot_names(self.config)

    def assemble(self, alert: Alert, t: Optional[float] = None) -> np.ndarray:
        if alert.category is None:
            raise ValueError(f"alert {alert.id} must be categorized before scoring")
        if t is None:
            t = alert.created_at
        entities = [e.identifier for e in alert.entities]
        vec = self.assemble_raw(t, alert.tenant_id, alert.category.value, entities)
        if self.config.workflow == Workflow.FULL:
            vec[-4:] = extract_static_features(alert)
        return vec

    def assemble_raw(self, t: float, tenant: str, category: str,
                     entities: Sequence[str]) -> np.ndarray:
        store = self.store
        cfg = self.config
        deltas = cfg.windows.deltas
        short = cfg.windows.short_only
        out: list[float] = []
        if cfg.workflow == Workflow.FULL:
            for d in deltas:
                out.append(store.entity_rates(tenant, entities, ActionSet.INVESTIGATION, t, d))
            for d in deltas:
                out.append(store.entity_rates(tenant, entities, ActionSet.MALICIOUS_LABEL, t, d))
            for d in short:
                out.append(store.entity_resolved_rates(tenant, entities, t, d))
            for scope, tenant_arg in ((Scope.TENANT_CATEGORY, tenant), (Scope.GLOBAL_CATEGORY, None)):
                for d in deltas:
                    out.append(store.category_rates(scope, tenant_arg, category,
                                                    ActionSet.INVESTIGATION, t, d))
            for scope, tenant_arg in ((Scope.TENANT_CATEGORY, tenant), (Scope.GLOBAL_CATEGORY, None)):
                for d in deltas:
                    out.append(store.category_rates(scope, tenant_arg, category,
                                                    ActionSet.MALICIOUS_LABEL, t, d))
            ratios_totals: list[float] = []
            for d in short:
                ratios_totals.append(store.resolved_and_total(
                    Scope.TENANT_CATEGORY, t, d, tenant=tenant, category=category)[1])
            for d in short:
                ratios_totals.append(store.resolved_and_total(
                    Scope.GLOBAL_CATEGORY, t, d, category=category)[1])
            for d in short:
                ratios_totals.append(store.resolved_and_total(
                    Scope.TENANT_CATEGORY, t, d, tenant=tenant, category=category)[0])
            for d in short:
                ratios_totals.append(store.resolved_and_total(
                    Scope.GLOBAL_CATEGORY, t, d, category=category)[0])
            out += ratios_totals
            out += list(store.recency_deltas(tenant, category, entities, t))
            out += [0.0, 0.0, 0.0, 0.0]  # static slots, filled by assemble()
        else:
            for d in short:
                out.append(store.entity_resolved_rates(tenant, entities, t, d))
            for d in deltas:
                out.append(store.entity_rates(tenant, entities, ActionSet.MALICIOUS_LABEL, t, d))
            for scope, tenant_arg in ((Scope.TENANT_CATEGORY, tenant), (Scope.GLOBAL_CATEGORY, None)):
                for d in deltas:
                    out.append(store.category_rates(scope, tenant_arg, category,
                                                    ActionSet.MALICIOUS_LABEL, t, d))
            for d in short:
                out.append(store.resolved_and_total(
                    Scope.TENANT_CATEGORY, t, d, tenant=tenant, category=category)[1])
            for d in short:
                out.append(store.resolved_and_total(
                    Scope.GLOBAL_CATEGORY, t, d, category=category)[1])
            for d in short:
                out.append(store.resolved_and_total(
                    Scope.TENANT_CATEGORY, t, d, tenant=tenant, category=category)[0])
            for d in short:
                out.append(store.resolved_and_total(
                    Scope.GLOBAL_CATEGORY, t, d, category=category)[0])
            out += list(store.recency_deltas(tenant, category, entities, t))
        return np.asarray(out, dtype=np.float64)


DUMP_META_COLUMNS = ("alert_id", "tenant", "timestamp", "label")


def write_feature_dump(fh: IO[str], names: Sequence[str], alert_ids: Sequence[str],
                       tenants: Sequence[str], timestamps: Sequence[float],
                       labels: Sequence[int], matrix: np.ndarray) -> None:
    """CSV dump: metadata columns then one column per feature slot.

    Floats are written with repr so re-parsing reproduces them exactly and
    identical runs produce byte-identical files.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([*DUMP_META_COLUMNS, *names])
    for i in range(len(alert_ids)):
        row = [alert_ids[i], tenants[i], repr(float(timestamps[i])), int(labels[i])]
        row += [repr(float(v)) for v in matrix[i]]
        writer.writerow(row)


def read_feature_dump(fh: IO[str]) -> tuple[list[str], list[str], list[str],
                                            np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`write_feature_dump`.

    Returns (slot names, alert ids, tenants, timestamps, labels, matrix).
    """
    reader = csv.reader(fh)
    header = next(reader)
    n_meta = len(DUMP_META_COLUMNS)
    names = header[n_meta:]
    ids: list[str] = []
    tenants: list[str] = []
    timestamps: list[float] = []
    labels: list[int] = []
    rows: list[list[float]] = []
    for row in reader:
        ids.append(row[0])
        tenants.append(row[1])
        timestamps.append(float(row[2]))
        labels.append(int(row[3]))
        rows.append([float(v) for v in row[n_meta:]])
    matrix = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, len(names)))
    return names, ids, tenants, np.asarray(timestamps), np.asarray(labels, dtype=np.int64), matrix
