"""Request/response bodies for the HTTP API."""
from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class EntityIn(BaseModel):
    identifier: str
    kind: Optional[str] = None


class AlertIn(BaseModel):
    """Normalized alert submission; unknown fields pass through to the parser."""

    model_config = ConfigDict(extra="allow")

    id: str
    tenant_id: str
    created_at: float | str
    title: Optional[str] = None
    detector: Optional[str] = None
    rule: Optional[str] = None
    severity: Optional[float] = None
    category: Optional[str] = None
    entities: list[EntityIn | str] = Field(default_factory=list)
    entity_relationship_count: int = 0
    mitre_techniques: list[str] = Field(default_factory=list)
    mitre_tactics: list[str] = Field(default_factory=list)

    def record(self) -> dict[str, Any]:
        payload = self.model_dump()
        if payload.get("title") is None:
            payload["title"] = payload.get("category") or payload["id"]
        payload.pop("resolution", None)  # submissions never carry outcomes
        return payload


class TopFeatureOut(BaseModel):
    name: str
    contribution: float
    direction: str


class QueueEntryOut(BaseModel):
    alert_id: str
    tenant: str
    category: str
    entities: list[str] = Field(default_factory=list)
    created_at: float
    enqueued_at: float
    raw_probability: Optional[float]
    threat_score: Optional[float]
    top_features: list[TopFeatureOut]
    sampled_for_review: bool
    model_version: int


class DispositionOut(BaseModel):
    alert_id: str
    disposition: str
    raw_probability: Optional[float]
    threat_score: Optional[float]
    sampled_for_review: bool
    model_version: int


class AlertStatusOut(BaseModel):
    alert_id: str
    status: str
    entry: Optional[QueueEntryOut] = None


class ResolutionIn(BaseModel):
    action: str  # investigated | not_investigated
    label: Optional[str] = None  # malicious | benign
    resolved_at: Optional[float] = None
    analyst_id: Optional[str] = None


class ResolutionAck(BaseModel):
    alert_id: str
    status: str


class MetricsOut(BaseModel):
    scored_total: int
    auto_closed_total: int
    sampled_total: int
    failed_open_total: int
    alert_reduction: float
    sampled_fnr: Optional[float]
    queue_depth: int
    close_threshold: float
    model_version: int
    watermark: Optional[float]
    p50_ms: float
    p95_ms: float
    p99_ms: float


class ThresholdBody(BaseModel):
    threshold: float = Field(ge=0.0, le=1.0)


class ThresholdOut(BaseModel):
    threshold: float
