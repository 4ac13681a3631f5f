"""Reference implementation of every window query as a full-log scan.

This is the independent check for :class:`ActionCountStore`: it holds the
raw event log as columnar numpy arrays and answers each query by masking
the whole log with the definitional window conditions. It shares nothing
with the incremental store except the feature layout contract.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .windows import FeatureConfig, Workflow


@dataclass(frozen=True)
class CreationRecord:
    created_at: float
    tenant: str
    category: str
    entities: tuple[str, ...]


@dataclass(frozen=True)
class ResolutionRecord:
    created_at: float
    resolved_at: float
    tenant: str
    category: str
    entities: tuple[str, ...]
    investigated: bool
    label: Optional[bool]  # None = unlabeled, True = malicious


class LogOracle:
    def __init__(self, creations: Sequence[CreationRecord],
                 resolutions: Sequence[ResolutionRecord],
                 config: Optional[FeatureConfig] = None):
        self.config = config or FeatureConfig()
        self._cc = np.array([c.created_at for c in creations], dtype=np.float64)
        self._c_tenant = np.array([c.tenant for c in creations], dtype=object)
        self._c_cat = np.array([c.category for c in creations], dtype=object)
        self._c_entities = [frozenset(c.entities) for c in creations]
        self._rc = np.array([r.created_at for r in resolutions], dtype=np.float64)
        self._rr = np.array([r.resolved_at for r in resolutions], dtype=np.float64)
        self._r_tenant = np.array([r.tenant for r in resolutions], dtype=object)
        self._r_cat = np.array([r.category for r in resolutions], dtype=object)
        self._r_entities = [frozenset(r.entities) for r in resolutions]
        self._inv = np.array([r.investigated for r in resolutions], dtype=bool)
        self._labeled = np.array([r.label is not None for r in resolutions], dtype=bool)
        self._mal = np.array([bool(r.label) for r in resolutions], dtype=bool)

    # -- masks ---------------------------------------------------------- #

    def _res_window(self, t: float, delta: float) -> np.ndarray:
        # both creation and resolution inside [t - delta, t)
        return (
            (self._rc >= t - delta) & (self._rc < t)
            & (self._rr >= t - delta) & (self._rr < t)
        )

    def _res_key(self, tenant: Optional[str], category: Optional[str],
                 entity: Optional[str]) -> np.ndarray:
        mask = np.ones(len(self._rc), dtype=bool)
        if tenant is not None:
            mask &= self._r_tenant == tenant
        if category is not None:
            mask &= self._r_cat == category
        if entity is not None:
            mask &= np.array([entity in ents for ents in self._r_entities], dtype=bool)
        return mask

    def _creation_key(self, tenant: Optional[str], category: Optional[str],
                      entity: Optional[str]) -> np.ndarray:
        mask = np.ones(len(self._cc), dtype=bool)
        if tenant is not None:
            mask &= self._c_tenant == tenant
        if category is not None:
            mask &= self._c_cat == category
        if entity is not None:
            mask &= np.array([entity in ents for ents in self._c_entities], dtype=bool)
        return mask

    # -- queries -------------------------------------------------------- #

    def _rate(self, key: np.ndarray, malicious_set: bool, t: float, delta: float) -> float:
        window = self._res_window(t, delta) & key
        if malicious_set:
            den = int(np.count_nonzero(window & self._labeled))
            num = int(np.count_nonzero(window & self._mal))
        else:
            den = int(np.count_nonzero(window))
            num = int(np.count_nonzero(window & self._inv))
        return num / den if den else 0.0

    def category_rate(self, tenant: Optional[str], category: str, malicious_set: bool,
                      t: float, delta: float) -> float:
        return self._rate(self._res_key(tenant, category, None), malicious_set, t, delta)

    def entity_rate(self, tenant: str, entities: Sequence[str], malicious_set: bool,
                    t: float, delta: float) -> float:
        rates = [
            self._rate(self._res_key(tenant, None, e), malicious_set, t, delta)
            for e in entities
        ]
        if not rates:
            return 0.0
        if self.config.entity_stat == "mean":
            return sum(rates) / len(rates)
        return max(rates)

    def resolved_and_total(self, t: float, delta: float, tenant: Optional[str] = None,
                           category: Optional[str] = None,
                           entity: Optional[str] = None) -> tuple[float, float]:
        created = (self._cc >= t - delta) & (self._cc < t)
        total = int(np.count_nonzero(created & self._creation_key(tenant, category, entity)))
        if total == 0:
            return (0.0, 0.0)
        resolved_in = (
            (self._rc >= t - delta) & (self._rc < t) & (self._rr < t)
            & self._res_key(tenant, category, entity)
        )
        return (float(total), int(np.count_nonzero(resolved_in)) / total)

    def entity_resolved_rate(self, tenant: str, entities: Sequence[str],
                             t: float, delta: float) -> float:
        ratios = [
            self.resolved_and_total(t, delta, tenant=tenant, entity=e)[1] for e in entities
        ]
        if not ratios:
            return 0.0
        if self.config.entity_stat == "mean":
            return sum(ratios) / len(ratios)
        return max(ratios)

    def last_seen(self, t: float, tenant: Optional[str] = None,
                  category: Optional[str] = None, entity: Optional[str] = None) -> Optional[float]:
        mask = (self._cc < t) & self._creation_key(tenant, category, entity)
        if not mask.any():
            return None
        return float(self._cc[mask].max())

    def recency_deltas(self, tenant: str, category: str, entities: Sequence[str],
                       t: float) -> tuple[float, float]:
        cap = self.config.recency_cap
        seen = self.last_seen(t, tenant=tenant, category=category)
        delta_tenant = cap if seen is None else min(t - seen, cap)
        if not entities:
            return (delta_tenant, cap)
        per_entity = []
        for e in entities:
            seen = self.last_seen(t, tenant=tenant, category=category, entity=e)
            per_entity.append(cap if seen is None else min(t - seen, cap))
        return (delta_tenant, max(per_entity))

    # -- full vectors ---------------------------------------------------- #

    def feature_vector(self, t: float, tenant: str, category: str,
                       entities: Sequence[str],
                       static: Optional[Sequence[float]] = None) -> list[float]:
        cfg = self.config
        deltas = cfg.windows.deltas
        short = cfg.windows.short_only
        out: list[float] = []
        if cfg.workflow == Workflow.FULL:
            out += [self.entity_rate(tenant, entities, False, t, d) for d in deltas]
            out += [self.entity_rate(tenant, entities, True, t, d) for d in deltas]
            out += [self.entity_resolved_rate(tenant, entities, t, d) for d in short]
            out += [self.category_rate(tenant, category, False, t, d) for d in deltas]
            out += [self.category_rate(None, category, False, t, d) for d in deltas]
            out += [self.category_rate(tenant, category, True, t, d) for d in deltas]
            out += [self.category_rate(None, category, True, t, d) for d in deltas]
            for d in short:
                out.append(self.resolved_and_total(t, d, tenant=tenant, category=category)[1])
            for d in short:
                out.append(self.resolved_and_total(t, d, category=category)[1])
            for d in short:
                out.append(self.resolved_and_total(t, d, tenant=tenant, category=category)[0])
            for d in short:
                out.append(self.resolved_and_total(t, d, category=category)[0])
            out += list(self.recency_deltas(tenant, category, entities, t))
            out += list(static if static is not None else (0.0, 0.0, 0.0, 0.0))
        else:
            out += [self.entity_resolved_rate(tenant, entities, t, d) for d in short]
            out += [self.entity_rate(tenant, entities, True, t, d) for d in deltas]
            out += [self.category_rate(tenant, category, True, t, d) for d in deltas]
            out += [self.category_rate(None, category, True, t, d) for d in deltas]
            for d in short:
                out.append(self.resolved_and_total(t, d, tenant=tenant, category=category)[1])
            for d in short:
                out.append(self.resolved_and_total(t, d, category=category)[1])
            for d in short:
                out.append(self.resolved_and_total(t, d, tenant=tenant, category=category)[0])
            for d in short:
                out.append(self.resolved_and_total(t, d, category=category)[0])
            out += list(self.recency_deltas(tenant, category, entities, t))
        return out
