"""Event-time store of alert sightings and analyst resolutions.

The store answers point-in-time window queries exactly: a resolution with
creation time ``c`` and resolution time ``r`` counts toward a query at
time ``t`` with lookback ``delta`` iff both fall in the half-open window
``[t - delta, t)``. Because ``r >= c`` always holds, that condition is
equivalent to ``r < t and c >= t - delta``, and an event can only ever
match when ``r - c < delta``. Each qualifying event therefore contributes
during the interval ``(r, c + delta]`` of query times, so per
(scope, key, subset, window) we keep two sorted timestamp arrays:

* ``vis``  - the times ``r`` at which events become visible
* ``exp``  - the times ``c + delta`` after which they expire

and the count at ``t`` is ``bisect(vis, t) - bisect(exp, t)``. Queries are
two binary searches, ingestion is an (amortized) append, and answers are
exact for any ``t`` regardless of what was ingested later, which is what
makes replay audits and no-lookahead checks cheap.

Alert sightings (creations) are plain sorted timestamp arrays per scope
key; they serve the total-count and last-seen queries.
"""
from __future__ import annotations

import json
from array import array
from bisect import bisect_left, insort
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from ..alerts import ActionKind, Alert, EntityRef, LabelKind, ResolutionEvent
from ..errors import CorruptArtifact, DuplicateResolution, LatenessExceeded, UnknownAlert, VersionMismatch
from .windows import FeatureConfig, Workflow, WindowSpec

CHECKPOINT_VERSION = 1

# Event subsets a resolution can fall into. RESOLVED is every resolution;
# LABELED is those carrying a malicious/benign label.
RESOLVED, INVESTIGATED, LABELED, MALICIOUS = 0, 1, 2, 3


class Scope(str, Enum):
    TENANT_CATEGORY = "tc"
    GLOBAL_CATEGORY = "gc"
    TENANT_ENTITY = "te"
    TENANT_CATEGORY_ENTITY = "tce"


class ActionSet(str, Enum):
    INVESTIGATION = "investigation"
    MALICIOUS_LABEL = "malicious_label"


_ACTION_SET_SUBSETS = {
    ActionSet.INVESTIGATION: (INVESTIGATED, RESOLVED),
    ActionSet.MALICIOUS_LABEL: (MALICIOUS, LABELED),
}


class _Counter:
    """Sorted visible/expiry timestamp pair for one (key, subset, window)."""

    __slots__ = ("vis", "exp")

    def __init__(self, vis: Iterable[float] = (), exp: Iterable[float] = ()):
        self.vis = array("d", vis)
        self.exp = array("d", exp)

    def add(self, visible_at: float, expires_at: float) -> None:
        vis, exp = self.vis, self.exp
        if vis and visible_at < vis[-1]:
            insort(vis, visible_at)
        else:
            vis.append(visible_at)
        if exp and expires_at < exp[-1]:
            insort(exp, expires_at)
        else:
            exp.append(expires_at)

    def count(self, t: float) -> int:
        return bisect_left(self.vis, t) - bisect_left(self.exp, t)

    def prune(self, horizon: float) -> None:
        # Dropping the same number of sub-horizon entries from both arrays
        # leaves count(t) unchanged for every t >= horizon.
        k = bisect_left(self.exp, horizon)
        if k:
            del self.exp[:k]
            del self.vis[:k]


@dataclass
class _AlertRecord:
    created_at: float
    tenant: str
    category: str
    entities: tuple[str, ...]
    resolved: bool = False


class ActionCountStore:
    """Incremental feature store over alert creations and resolutions.

    ``validate=True`` (the live-service mode) tracks every open alert so
    duplicate or orphan resolutions are rejected; bulk offline replays can
    turn it off and pass creation metadata with each resolution instead.
    """

    def __init__(self, config: Optional[FeatureConfig] = None, validate: bool = True,
                 auto_compact: bool = False):
        self.config = config or FeatureConfig()
        self.validate = validate
        self.auto_compact = auto_compact
        self._deltas = tuple(self.config.windows.deltas)
        self._sightings: dict[tuple, array] = {}
        self._counters: dict[tuple, _Counter] = {}
        self._registry: dict[str, _AlertRecord] = {}
        self._watermark = float("-inf")
        self._ingested = 0

    # ------------------------------------------------------------------ #
    # ingestion
    # ------------------------------------------------------------------ #

    @property
    def watermark(self) -> float:
        return self._watermark

    def record_alert_created(self, alert: Alert) -> None:
        if alert.category is None:
            raise ValueError(f"alert {alert.id} must be categorized before recording")
        if self.validate and alert.id in self._registry:
            return  # idempotent re-delivery
        entities = tuple(e.identifier for e in alert.entities)
        self.record_created_raw(alert.created_at, alert.tenant_id, alert.category.value, entities)
        if self.validate:
            self._registry[alert.id] = _AlertRecord(
                created_at=alert.created_at,
                tenant=alert.tenant_id,
                category=alert.category.value,
                entities=entities,
            )

    def record_created_raw(self, created_at: float, tenant: str, category: str,
                           entities: tuple[str, ...]) -> None:
        if created_at < self._watermark - self.config.lateness_bound:
            raise LatenessExceeded(
                f"creation at {created_at} is older than watermark {self._watermark} "
                f"minus the lateness bound"
            )
        self._sight((Scope.TENANT_CATEGORY, tenant, category), created_at)
        self._sight((Scope.GLOBAL_CATEGORY, category), created_at)
        for entity in entities:
            self._sight((Scope.TENANT_ENTITY, tenant, entity), created_at)
            self._sight((Scope.TENANT_CATEGORY_ENTITY, tenant, category, entity), created_at)
        self._advance(created_at)

    def record_resolution(self, event: ResolutionEvent, alert: Optional[Alert] = None) -> None:
        if self.validate:
            record = self._registry.get(event.alert_id)
            if record is None:
                raise UnknownAlert(event.alert_id)
            if record.resolved:
                raise DuplicateResolution(event.alert_id)
            created_at, tenant, category, entities = (
                record.created_at, record.tenant, record.category, record.entities,
            )
            record.resolved = True
        else:
            if alert is None:
                raise ValueError("relaxed mode requires the alert alongside the resolution")
            if alert.category is None:
                raise ValueError(f"alert {alert.id} must be categorized before recording")
            created_at, tenant, category = alert.created_at, alert.tenant_id, alert.category.value
            entities = tuple(e.identifier for e in alert.entities)
        if event.resolved_at < created_at:
            raise ValueError(
                f"resolution at {event.resolved_at} precedes creation at {created_at}"
            )
        self.record_resolution_raw(
            created_at, event.resolved_at, tenant, category, entities,
            investigated=event.action == ActionKind.INVESTIGATED,
            label=(None if event.label is None else event.label == LabelKind.MALICIOUS),
        )

    def record_resolution_raw(self, created_at: float, resolved_at: float, tenant: str,
                              category: str, entities: tuple[str, ...],
                              investigated: bool, label: Optional[bool]) -> None:
        subsets = [RESOLVED]
        if investigated:
            subsets.append(INVESTIGATED)
        if label is not None:
            subsets.append(LABELED)
            if label:
                subsets.append(MALICIOUS)
        keys = [(Scope.TENANT_CATEGORY, tenant, category), (Scope.GLOBAL_CATEGORY, category)]
        keys += [(Scope.TENANT_ENTITY, tenant, entity) for entity in entities]
        counters = self._counters
        for key in keys:
            for delta in self._deltas:
                if resolved_at - created_at >= delta:
                    continue
                for subset in subsets:
                    ck = key + (subset, delta)
                    counter = counters.get(ck)
                    if counter is None:
                        counter = counters[ck] = _Counter()
                    counter.add(resolved_at, created_at + delta)
        self._advance(resolved_at)

    def _sight(self, key: tuple, created_at: float) -> None:
        arr = self._sightings.get(key)
        if arr is None:
            arr = self._sightings[key] = array("d")
        if arr and created_at < arr[-1]:
            insort(arr, created_at)
        else:
            arr.append(created_at)

    def _advance(self, event_time: float) -> None:
        if event_time > self._watermark:
            self._watermark = event_time
        self._ingested += 1
        if self.auto_compact and self._ingested % 50_000 == 0:
            self.compact()

    # ------------------------------------------------------------------ #
    # queries (all half-open windows [t - delta, t))
    # ------------------------------------------------------------------ #

    def _count(self, key: tuple, subset: int, delta: float, t: float) -> int:
        counter = self._counters.get(key + (subset, delta))
        return counter.count(t) if counter is not None else 0

    def _rate(self, key: tuple, action_set: ActionSet, t: float, delta: float) -> float:
        num_subset, den_subset = _ACTION_SET_SUBSETS[action_set]
        den = self._count(key, den_subset, delta, t)
        if den <= 0:
            return 0.0
        return self._count(key, num_subset, delta, t) / den

    def category_rates(self, scope: Scope, tenant: Optional[str], category: str,
                       action_set: ActionSet, t: float, delta: float) -> float:
        """Fraction of the window's resolved alerts of this category that
        carry the action; 0 when nothing in the window was resolved."""
        if scope == Scope.GLOBAL_CATEGORY:
            key: tuple = (Scope.GLOBAL_CATEGORY, category)
        else:
            key = (Scope.TENANT_CATEGORY, tenant, category)
        return self._rate(key, action_set, t, delta)

    def entity_rate(self, tenant: str, entity: str, action_set: ActionSet,
                    t: float, delta: float) -> float:
        return self._rate((Scope.TENANT_ENTITY, tenant, entity), action_set, t, delta)

    def entity_rates(self, tenant: str, entities: Iterable[str | EntityRef],
                     action_set: ActionSet, t: float, delta: float) -> float:
        """Summary (max by default) of per-entity action rates; entities are
        matched across all categories. Empty input yields 0."""
        rates = [
            self.entity_rate(tenant, _ident(e), action_set, t, delta) for e in entities
        ]
        if not rates:
            return 0.0
        if self.config.entity_stat == "mean":
            return sum(rates) / len(rates)
        return max(rates)

    def resolved_and_total(self, scope: Scope, t: float, delta: float,
                           tenant: Optional[str] = None, category: Optional[str] = None,
                           entity: Optional[str] = None) -> tuple[float, float]:
        """(total alerts created in-window, fraction of them resolved before t)."""
        if scope == Scope.GLOBAL_CATEGORY:
            key: tuple = (Scope.GLOBAL_CATEGORY, category)
        elif scope == Scope.TENANT_CATEGORY:
            key = (Scope.TENANT_CATEGORY, tenant, category)
        else:
            key = (Scope.TENANT_ENTITY, tenant, entity)
        arr = self._sightings.get(key)
        total = 0 if arr is None else bisect_left(arr, t) - bisect_left(arr, t - delta)
        if total <= 0:
            return (0.0, 0.0)
        resolved = self._count(key, RESOLVED, delta, t)
        return (float(total), resolved / total)

    def entity_resolved_rates(self, tenant: str, entities: Iterable[str | EntityRef],
                              t: float, delta: float) -> float:
        ratios = [
            self.resolved_and_total(Scope.TENANT_ENTITY, t, delta,
                                    tenant=tenant, entity=_ident(e))[1]
            for e in entities
        ]
        if not ratios:
            return 0.0
        if self.config.entity_stat == "mean":
            return sum(ratios) / len(ratios)
        return max(ratios)

    def last_seen(self, key: tuple, t: float) -> Optional[float]:
        """Latest sighting strictly before t for the scope key, or None."""
        arr = self._sightings.get(key)
        if arr is None:
            return None
        idx = bisect_left(arr, t) - 1
        return arr[idx] if idx >= 0 else None

    def recency_deltas(self, tenant: str, category: str,
                       entities: Iterable[str | EntityRef], t: float) -> tuple[float, float]:
        """Seconds since the category was last seen for the tenant, and the
        max of the same per (category, entity). Never-seen keys and empty
        entity lists return the left-censoring cap; values clamp to it."""
        cap = self.config.recency_cap
        seen = self.last_seen((Scope.TENANT_CATEGORY, tenant, category), t)
        delta_tenant = cap if seen is None else min(t - seen, cap)
        delta_entity = 0.0
        any_entity = False
        for e in entities:
            any_entity = True
            seen = self.last_seen(
                (Scope.TENANT_CATEGORY_ENTITY, tenant, category, _ident(e)), t
            )
            delta_entity = max(delta_entity, cap if seen is None else min(t - seen, cap))
        if not any_entity:
            delta_entity = cap
        return (delta_tenant, delta_entity)

    # ------------------------------------------------------------------ #
    # maintenance and persistence
    # ------------------------------------------------------------------ #

    def compact(self) -> None:
        """Prune state older than the largest window plus the lateness bound.

        Bounds memory to the events inside the widest window; point-in-time
        queries remain exact for every t not older than the lateness bound.
        """
        horizon = self._watermark - max(self.config.windows.max_delta,
                                        self.config.recency_cap) - self.config.lateness_bound
        if horizon == float("-inf"):
            return
        for counter in self._counters.values():
            counter.prune(horizon)
        for arr in self._sightings.values():
            k = bisect_left(arr, horizon)
            if k > 1:
                # keep one sighting so last-seen stays answerable at the cap
                del arr[: k - 1]
        if self.validate:
            dead = [aid for aid, rec in self._registry.items()
                    if rec.resolved and rec.created_at < horizon]
            for aid in dead:
                del self._registry[aid]

    def checkpoint_bytes(self) -> bytes:
        """Canonical snapshot; byte equality implies state equality."""
        sightings = sorted(
            ([_key_json(key), list(arr)] for key, arr in self._sightings.items()),
            key=lambda item: item[0],
        )
        counters = sorted(
            ([_key_json(key), list(c.vis), list(c.exp)] for key, c in self._counters.items()),
            key=lambda item: item[0],
        )
        registry = {
            aid: [rec.created_at, rec.tenant, rec.category, list(rec.entities), rec.resolved]
            for aid, rec in sorted(self._registry.items())
        }
        payload = {
            "version": CHECKPOINT_VERSION,
            "watermark": None if self._watermark == float("-inf") else self._watermark,
            "config": {
                "workflow": self.config.workflow.value,
                "deltas": list(self.config.windows.deltas),
                "short_only": list(self.config.windows.short_only),
                "recency_cap": self.config.recency_cap,
                "lateness_bound": self.config.lateness_bound,
                "entity_stat": self.config.entity_stat,
            },
            "sightings": sightings,
            "counters": counters,
            "registry": registry,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_checkpoint(cls, blob: bytes, validate: bool = True,
                        auto_compact: bool = False) -> "ActionCountStore":
        try:
            payload = json.loads(blob.decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptArtifact(f"unreadable checkpoint: {exc}") from None
        version = payload.get("version")
        if version != CHECKPOINT_VERSION:
            raise VersionMismatch(f"checkpoint version {version!r}, expected {CHECKPOINT_VERSION}")
        try:
            cfg = payload["config"]
            config = FeatureConfig(
                workflow=Workflow(cfg["workflow"]),
                windows=WindowSpec(tuple(cfg["deltas"]), tuple(cfg["short_only"])),
                recency_cap=cfg["recency_cap"],
                lateness_bound=cfg["lateness_bound"],
                entity_stat=cfg["entity_stat"],
            )
            store = cls(config, validate=validate, auto_compact=auto_compact)
            for key_json, values in payload["sightings"]:
                store._sightings[_key_from_json(key_json)] = array("d", values)
            for key_json, vis, exp in payload["counters"]:
                store._counters[_key_from_json(key_json)] = _Counter(vis, exp)
            for aid, (created_at, tenant, category, entities, resolved) in payload[
                "registry"
            ].items():
                store._registry[aid] = _AlertRecord(
                    created_at, tenant, category, tuple(entities), resolved
                )
            watermark = payload["watermark"]
            store._watermark = float("-inf") if watermark is None else watermark
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptArtifact(f"malformed checkpoint: {exc}") from None
        return store


def _ident(entity: str | EntityRef) -> str:
    return entity.identifier if isinstance(entity, EntityRef) else entity


def _key_json(key: tuple) -> str:
    scope = key[0].value if isinstance(key[0], Scope) else str(key[0])
    return json.dumps([scope, *[str(p) if not isinstance(p, (int, float)) else p
                                for p in key[1:]]])


def _key_from_json(text: str) -> tuple:
    parts = json.loads(text)
    return (Scope(parts[0]), *parts[1:])
