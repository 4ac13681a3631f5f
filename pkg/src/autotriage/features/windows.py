"""Window configuration and feature-vector layouts.

Two workflows are supported. The full workflow scores alerts with 25
dynamic slots (rates over 1/7/30-day windows plus recency deltas) and 4
static slots. The AIT workflow uses the 10 dynamic slots available for
that dataset (1-day windows only, single entity per alert, label rates
instead of investigation rates).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..alerts import STATIC_FEATURE_NAMES

DAY = 86400.0
HOUR = 3600.0


class Workflow(str, Enum):
    FULL = "full"
    AIT = "ait"


@dataclass(frozen=True)
class WindowSpec:
    """Lookback windows, seconds. ``deltas`` drive the rate features;
    ``short_only`` drives the resolved-ratio and total-count features."""

    deltas: tuple[float, ...] = (1 * DAY, 7 * DAY, 30 * DAY)
    short_only: tuple[float, ...] = (1 * DAY,)

    def __post_init__(self):
        if not self.deltas:
            raise ValueError("at least one lookback window required")
        if list(self.deltas) != sorted(set(self.deltas)):
            raise ValueError("windows must be strictly increasing")
        if not set(self.short_only) <= set(self.deltas):
            raise ValueError("short_only must be a subset of deltas")

    @property
    def max_delta(self) -> float:
        return self.deltas[-1]


AIT_WINDOWS = WindowSpec(deltas=(1 * DAY,), short_only=(1 * DAY,))


@dataclass(frozen=True)
class FeatureConfig:
    workflow: Workflow = Workflow.FULL
    windows: WindowSpec = field(default_factory=WindowSpec)
    recency_cap: float = 30 * DAY
    lateness_bound: float = 1 * HOUR
    entity_stat: str = "max"  # or "mean"

    @staticmethod
    def full() -> "FeatureConfig":
        return FeatureConfig()

    @staticmethod
    def ait() -> "FeatureConfig":
        # Three weeks of data: single 1-day window, 7-day recency cap.
        return FeatureConfig(workflow=Workflow.AIT, windows=AIT_WINDOWS, recency_cap=7 * DAY)


def _window_tag(delta: float) -> str:
    days = delta / DAY
    if days >= 1 and days == int(days):
        return f"{int(days)}d"
    hours = delta / HOUR
    if hours == int(hours):
        return f"{int(hours)}h"
    return f"{int(delta)}s"


def slot_names(config: FeatureConfig) -> list[str]:
    """Ordered names of every slot in the feature vector for ``config``."""
    w = [_window_tag(d) for d in config.windows.deltas]
    s = [_window_tag(d) for d in config.windows.short_only]
    names: list[str] = []
    if config.workflow == Workflow.FULL:
        names += [f"entity_investigation_rate_{t}" for t in w]
        names += [f"entity_malicious_rate_{t}" for t in w]
        names += [f"entity_resolved_rate_{t}" for t in s]
        names += [f"tenant_category_investigation_rate_{t}" for t in w]
        names += [f"global_category_investigation_rate_{t}" for t in w]
        names += [f"tenant_category_malicious_rate_{t}" for t in w]
        names += [f"global_category_malicious_rate_{t}" for t in w]
        names += [f"tenant_category_resolved_rate_{t}" for t in s]
        names += [f"global_category_resolved_rate_{t}" for t in s]
        names += [f"tenant_category_total_{t}" for t in s]
        names += [f"global_category_total_{t}" for t in s]
        names += ["delta_category_last_seen_tenant", "delta_category_last_seen_entity"]
        names += list(STATIC_FEATURE_NAMES)
    else:
        names += [f"entity_resolved_rate_{t}" for t in s]
        names += [f"entity_malicious_rate_{t}" for t in w]
        names += [f"tenant_category_malicious_rate_{t}" for t in w]
        names += [f"global_category_malicious_rate_{t}" for t in w]
        names += [f"tenant_category_resolved_rate_{t}" for t in s]
        names += [f"global_category_resolved_rate_{t}" for t in s]
        names += [f"tenant_category_total_{t}" for t in s]
        names += [f"global_category_total_{t}" for t in s]
        names += ["delta_category_last_seen_tenant", "delta_category_last_seen_entity"]
    return names


def baseline_slot(config: FeatureConfig) -> str:
    """Name of the slot the no-classifier baseline scores alerts with."""
    if config.workflow == Workflow.FULL:
        return f"global_category_investigation_rate_{_window_tag(config.windows.max_delta)}"
    return f"global_category_malicious_rate_{_window_tag(config.windows.deltas[0])}"
