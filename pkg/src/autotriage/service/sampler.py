"""Stratified review sampling over would-be-closed alerts.

Each period gets a sampling budget; the strata are alert categories.
Quotas divide the budget equally across the categories observed among
would-be-closed alerts in the period, with the remainder handed out in
first-seen order, so per-category sample counts stay within one of each
other on stable strata. Sampled alerts go to analysts instead of being
closed, providing both untainted training data and the live estimate of
the false-negative rate among closures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class PeriodStats:
    period: int
    closed: dict[str, int] = field(default_factory=dict)  # stratum sizes
    sampled: dict[str, int] = field(default_factory=dict)
    sampled_positive: dict[str, int] = field(default_factory=dict)


class StratifiedSampler:
    def __init__(self, period_seconds: float = 86400.0, budget_floor: int = 10,
                 budget_fraction: float = 0.01, seed: int = 0):
        self.period_seconds = period_seconds
        self.budget_floor = budget_floor
        self.budget_fraction = budget_fraction
        self.seed = seed
        self.budget = budget_floor
        self._period: Optional[int] = None
        self._counts: dict[str, int] = {}
        self._order: list[str] = []  # first-seen category order this period
        self._total = 0
        self._current = PeriodStats(period=-1)
        self.history: list[PeriodStats] = []

    def _roll(self, period: int) -> None:
        if self._period is not None:
            self.history.append(self._current)
            prior_closed = sum(self._current.closed.values())
            self.budget = max(self.budget_floor,
                              int(round(self.budget_fraction * prior_closed)))
        self._period = period
        self._counts = {}
        self._order = []
        self._total = 0
        self._current = PeriodStats(period=period)

    def _quota(self, category: str) -> int:
        n = len(self._order)
        base, remainder = divmod(self.budget, n)
        rank = self._order.index(category)
        return base + (1 if rank < remainder else 0)

    def decide(self, category: str, event_time: float) -> bool:
        """Whether a would-be-closed alert of this category goes to review."""
        period = math.floor(event_time / self.period_seconds)
        if self._period is None or period != self._period:
            self._roll(period)
        if category not in self._counts:
            self._counts[category] = 0
            self._order.append(category)
        self._current.closed[category] = self._current.closed.get(category, 0) + 1
        if self._total >= self.budget:
            return False
        if self._counts[category] >= self._quota(category):
            return False
        self._counts[category] += 1
        self._total += 1
        self._current.sampled[category] = self._current.sampled.get(category, 0) + 1
        return True

    def record_outcome(self, category: str, was_positive: bool) -> None:
        """Feed back the analyst decision on a sampled alert."""
        if was_positive:
            stats = self._current
            stats.sampled_positive[category] = stats.sampled_positive.get(category, 0) + 1

    def fnr_estimate(self) -> Optional[float]:
        """Stratum-weighted false-negative-rate estimate over closures.

        Per category the positive rate among its sampled alerts stands in
        for the whole stratum; strata that were never sampled are excluded
        from both sides of the ratio.
        """
        weighted = 0.0
        volume = 0.0
        for stats in [*self.history, self._current]:
            for category, sampled in stats.sampled.items():
                if sampled <= 0:
                    continue
                positives = stats.sampled_positive.get(category, 0)
                stratum = stats.closed.get(category, sampled)
                weighted += stratum * (positives / sampled)
                volume += stratum
        if volume == 0:
            return None
        return weighted / volume

    def state(self) -> dict:
        return {
            "period": self._period,
            "budget": self.budget,
            "counts": dict(sorted(self._counts.items())),
            "order": list(self._order),
            "total": self._total,
            "current": _stats_dict(self._current),
            "history": [_stats_dict(s) for s in self.history],
        }

    @classmethod
    def restore(cls, state: dict, period_seconds: float, budget_floor: int,
                budget_fraction: float) -> "StratifiedSampler":
        sampler = cls(period_seconds, budget_floor, budget_fraction)
        sampler._period = state["period"]
        sampler.budget = state["budget"]
        sampler._counts = dict(state["counts"])
        sampler._order = list(state["order"])
        sampler._total = state["total"]
        sampler._current = _stats_from(state["current"])
        sampler.history = [_stats_from(s) for s in state["history"]]
        return sampler


def _stats_dict(stats: PeriodStats) -> dict:
    return {
        "period": stats.period,
        "closed": dict(sorted(stats.closed.items())),
        "sampled": dict(sorted(stats.sampled.items())),
        "sampled_positive": dict(sorted(stats.sampled_positive.items())),
    }


def _stats_from(payload: dict) -> PeriodStats:
    return PeriodStats(
        period=payload["period"],
        closed=dict(payload["closed"]),
        sampled=dict(payload["sampled"]),
        sampled_positive=dict(payload["sampled_positive"]),
    )
