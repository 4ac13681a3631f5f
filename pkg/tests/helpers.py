"""Shared test utilities: random event logs and replay helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from autotriage.alerts import (
    ActionKind,
    Alert,
    CategoryId,
    CategorySource,
    EntityRef,
    LabelKind,
    ResolutionEvent,
)
from autotriage.features import ActionCountStore, FeatureAssembler, FeatureConfig
from autotriage.features.oracle import CreationRecord, LogOracle, ResolutionRecord

T0 = 1_700_000_000.0


@dataclass
class EventLog:
    creations: list[CreationRecord]
    resolutions: list[ResolutionRecord]

    def merged(self):
        """All events in event-time order, creations before resolutions on ties."""
        events = [(c.created_at, 0, i, c) for i, c in enumerate(self.creations)]
        events += [(r.resolved_at, 1, i, r) for i, r in enumerate(self.resolutions)]
        events.sort(key=lambda e: (e[0], e[1], e[2]))
        return events

    def truncated(self, t: float) -> "EventLog":
        """Drop every event with timestamp >= t."""
        return EventLog(
            creations=[c for c in self.creations if c.created_at < t],
            resolutions=[r for r in self.resolutions if r.resolved_at < t],
        )


def random_log(rng: np.random.Generator, n_events: int = 500, n_tenants: int = 3,
               n_categories: int = 8, n_entities: int = 12, mean_gap: float = 40.0,
               resolve_prob: float = 0.85, delay_scale: float = 600.0,
               long_delay_prob: float = 0.05) -> EventLog:
    """Random alert stream with occasional window-straddling resolution delays."""
    tenants = [f"t{i}" for i in range(n_tenants)]
    categories = [f"cat-{i}" for i in range(n_categories)]
    entity_pool = {t: [f"{t}-e{j}" for j in range(n_entities)] for t in tenants}
    cat_invest_prob = rng.uniform(0.05, 0.95, size=n_categories)

    creations: list[CreationRecord] = []
    resolutions: list[ResolutionRecord] = []
    t = T0
    for i in range(n_events):
        t += rng.exponential(mean_gap)
        tenant = tenants[int(rng.integers(n_tenants))]
        cat_idx = int(rng.integers(n_categories))
        k = int(rng.integers(0, 4))
        entities = tuple(rng.choice(entity_pool[tenant], size=k, replace=False)) if k else ()
        creations.append(CreationRecord(t, tenant, categories[cat_idx], entities))
        if rng.random() < resolve_prob:
            if rng.random() < long_delay_prob:
                delay = float(rng.uniform(1, 40) * 86400.0)
            else:
                delay = float(rng.exponential(delay_scale)) + 1.0
            investigated = bool(rng.random() < cat_invest_prob[cat_idx])
            if rng.random() < 0.9:
                label = investigated if rng.random() < 0.8 else bool(rng.integers(2))
            else:
                label = None
            resolutions.append(ResolutionRecord(
                created_at=t, resolved_at=t + delay, tenant=tenant,
                category=categories[cat_idx], entities=entities,
                investigated=investigated, label=label,
            ))
    return EventLog(creations, resolutions)


def replay(log: EventLog, config: FeatureConfig,
           probe_times: set[float] | None = None,
           validate: bool = False) -> tuple[ActionCountStore, list[tuple[CreationRecord, np.ndarray]]]:
    """Feed the log through a store in event-time order.

    When a creation's timestamp is in ``probe_times`` the feature vector is
    assembled immediately before recording it, mirroring live scoring.
    """
    store = ActionCountStore(config, validate=validate)
    assembler = FeatureAssembler(store)
    probes: list[tuple[CreationRecord, np.ndarray]] = []
    for _, kind, _, record in log.merged():
        if kind == 0:
            if probe_times is not None and record.created_at in probe_times:
                vec = assembler.assemble_raw(
                    record.created_at, record.tenant, record.category, list(record.entities)
                )
                probes.append((record, vec))
            store.record_created_raw(
                record.created_at, record.tenant, record.category, record.entities
            )
        else:
            store.record_resolution_raw(
                record.created_at, record.resolved_at, record.tenant, record.category,
                record.entities, record.investigated, record.label,
            )
    return store, probes


def oracle_for(log: EventLog, config: FeatureConfig) -> LogOracle:
    return LogOracle(log.creations, log.resolutions, config)


def oracle_vector(log: EventLog, config: FeatureConfig, record: CreationRecord,
                  oracle: LogOracle | None = None) -> np.ndarray:
    if oracle is None:
        oracle = LogOracle(log.creations, log.resolutions, config)
    return np.asarray(
        oracle.feature_vector(record.created_at, record.tenant, record.category,
                              list(record.entities)),
        dtype=np.float64,
    )


def make_alert(alert_id: str = "a-1", tenant: str = "t0", created_at: float = T0,
               category: str = "cat-0", entities: tuple[str, ...] = (),
               title: str = "some alert") -> Alert:
    alert = Alert(
        id=alert_id, tenant_id=tenant, created_at=created_at, title=title,
        entities=[EntityRef(identifier=e) for e in entities],
    )
    alert.category = CategoryId(value=category, source=CategorySource.DETECTOR_RULE)
    return alert


def make_resolution(alert: Alert, resolved_at: float, investigated: bool = True,
                    label: bool | None = None) -> ResolutionEvent:
    return ResolutionEvent(
        alert_id=alert.id,
        action=ActionKind.INVESTIGATED if investigated else ActionKind.NOT_INVESTIGATED,
        resolved_at=resolved_at,
        label=None if label is None else (LabelKind.MALICIOUS if label else LabelKind.BENIGN),
    )
