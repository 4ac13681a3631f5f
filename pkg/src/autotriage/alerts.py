"""Alert data model, parsing, categorization and static feature extraction.

Alerts arrive as one structured record per line. Records are normalized
into :class:`Alert` objects carrying the fields the feature pipeline and
the classifier consume. Each alert is assigned a stable category: the
detector/rule pair when both are known, otherwise the title with embedded
entities stripped out.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

from .errors import EmptyCategory, MalformedTimestamp, MissingField

ENTITY_TOKEN = "<entity>"

# MITRE Enterprise tactics in attack-chain order, 1-based. 0 means no tactic.
# Accepts both TAxxxx ids and (normalized) tactic names.
_TACTIC_ORDINALS: dict[str, int] = {
    "ta0043": 1, "reconnaissance": 1,
    "ta0042": 2, "resource development": 2,
    "ta0001": 3, "initial access": 3,
    "ta0002": 4, "execution": 4,
    "ta0003": 5, "persistence": 5,
    "ta0004": 6, "privilege escalation": 6,
    "ta0005": 7, "defense evasion": 7,
    "ta0006": 8, "credential access": 8,
    "ta0007": 9, "discovery": 9,
    "ta0008": 10, "lateral movement": 10,
    "ta0009": 11, "collection": 11,
    "ta0011": 12, "command and control": 12,
    "ta0010": 13, "exfiltration": 13,
    "ta0040": 14, "impact": 14,
}

MAX_TACTIC_ORDINAL = 14

# Title entity-stripping patterns, applied in this order. Longest-match
# constructs (emails, IPs) run before the generic domain/path patterns so a
# narrower pattern never shadows part of a wider one.
_ENTITY_PATTERNS: list[re.Pattern[str]] = [
    # email (dotless domains allowed: "user@domain")
    re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)*"),
    # ipv4, optional port
    re.compile(r"(?<![\w.])(?:\d{1,3}\.){3}\d{1,3}(?::\d{1,5})?(?![\w.])"),
    # ipv6, full or compressed
    re.compile(
        r"(?<![\w:])(?:(?:[0-9a-f]{1,4}:){7}[0-9a-f]{1,4}"
        r"|(?:[0-9a-f]{1,4}:){1,6}(?::[0-9a-f]{1,4}){1,6}"
        r"|(?:[0-9a-f]{1,4}:){1,7}:"
        r"|:(?::[0-9a-f]{1,4}){1,7})(?![\w:])"
    ),
    # uuid
    re.compile(r"\b[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}\b"),
    # md5 / sha1 / sha256 hex digests
    re.compile(r"\b(?:[0-9a-f]{64}|[0-9a-f]{40}|[0-9a-f]{32})\b"),
    # fully-qualified domain names
    re.compile(r"\b(?:[a-z0-9](?:[a-z0-9-]{0,61}[a-z0-9])?\.)+[a-z]{2,}\b"),
    # windows drive paths and UNC paths
    re.compile(r"\b[a-z]:\\(?:[^\s\\]+\\)*[^\s\\]*"),
    re.compile(r"\\\\[^\s\\]+(?:\\[^\s\\]+)+"),
    # unix paths (at least one separator-delimited segment)
    re.compile(r"(?<![\w<])/(?:[\w.+-]+/)*[\w.+-]+"),
]


class ActionKind(str, Enum):
    INVESTIGATED = "investigated"
    NOT_INVESTIGATED = "not_investigated"


class LabelKind(str, Enum):
    MALICIOUS = "malicious"
    BENIGN = "benign"


class CategorySource(str, Enum):
    DETECTOR_RULE = "detector_rule"
    NORMALIZED_TITLE = "normalized_title"


@dataclass(frozen=True)
class EntityRef:
    """Identifier of a host, user, process or other object named by an alert."""

    identifier: str
    kind: Optional[str] = None

    def __post_init__(self):
        if not self.identifier:
            raise ValueError("entity identifier must be nonempty")


@dataclass(frozen=True)
class CategoryId:
    value: str
    source: CategorySource

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ResolutionEvent:
    """Terminal analyst action taken on an alert."""

    alert_id: str
    action: ActionKind
    resolved_at: float
    label: Optional[LabelKind] = None
    analyst_id: Optional[str] = None


@dataclass
class Alert:
    """Normalized alert object."""

    id: str
    tenant_id: str
    created_at: float
    title: str
    detector: Optional[str] = None
    rule: Optional[str] = None
    severity: Optional[float] = None
    entities: list[EntityRef] = field(default_factory=list)
    entity_relationship_count: int = 0
    mitre_techniques: list[str] = field(default_factory=list)
    mitre_tactic_max: int = 0
    category: Optional[CategoryId] = None
    resolution: Optional[ResolutionEvent] = None


STATIC_FEATURE_NAMES = (
    "entity_count",
    "entity_relationship_count",
    "mitre_tactic_max",
    "mitre_technique_count",
)


def tactic_ordinal(tactic: str) -> int:
    """Map a MITRE tactic id or name to its attack-chain position (1..14).

    Unknown tactics map to 0.
    """
    return _TACTIC_ORDINALS.get(str(tactic).strip().lower().replace("-", " ").replace("_", " "), 0)


def _parse_timestamp(value: Any) -> float:
    if isinstance(value, bool):
        raise MalformedTimestamp(f"not a timestamp: {value!r}")
    if isinstance(value, (int, float)):
        ts = float(value)
        if ts != ts or ts in (float("inf"), float("-inf")) or ts < 0:
            raise MalformedTimestamp(f"timestamp must be finite and nonnegative: {value!r}")
        return ts
    if isinstance(value, str):
        text = value.strip()
        try:
            return _parse_timestamp(float(text))
        except (ValueError, MalformedTimestamp):
            pass
        try:
            dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            raise MalformedTimestamp(f"unparseable timestamp: {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    raise MalformedTimestamp(f"not a timestamp: {value!r}")


def _creator_field(record: dict, name: str) -> Optional[str]:
    # Listing-style records nest detector/rule under metadata.creator and
    # may carry them as objects; flat records carry plain strings.
    value = record.get(name)
    if value is None:
        meta = record.get("metadata") or {}
        creator = meta.get("creator") or {}
        value = creator.get(name)
    if value is None:
        return None
    if isinstance(value, dict):
        value = value.get("id") or value.get("name")
    if value is None:
        return None
    text = str(value).strip()
    return text or None


def _meta_field(record: dict, name: str) -> Any:
    if name in record:
        return record[name]
    meta = record.get("metadata")
    if isinstance(meta, dict) and name in meta:
        return meta[name]
    return None


def _parse_entities(raw: Any) -> list[EntityRef]:
    entities: list[EntityRef] = []
    for item in raw or []:
        if isinstance(item, dict):
            identifier = str(item.get("identifier") or item.get("id") or "").strip()
            kind = item.get("kind") or item.get("type")
        else:
            identifier = str(item).strip()
            kind = None
        if identifier:
            entities.append(EntityRef(identifier=identifier, kind=kind))
    return entities


def _parse_resolution(record: dict, alert_id: str, created_at: float) -> Optional[ResolutionEvent]:
    raw = record.get("resolution")
    if not isinstance(raw, dict):
        return None
    if "resolved_at" not in raw or "action" not in raw:
        return None
    resolved_at = _parse_timestamp(raw["resolved_at"])
    action = ActionKind(str(raw["action"]).strip().lower())
    label_raw = raw.get("label")
    label = LabelKind(str(label_raw).strip().lower()) if label_raw else None
    return ResolutionEvent(
        alert_id=alert_id,
        action=action,
        resolved_at=max(resolved_at, created_at),
        label=label,
        analyst_id=raw.get("analyst_id"),
    )


def parse_alert(record: dict) -> Alert:
    """Build an :class:`Alert` from one structured record.

    Accepts both the flat layout documented in the README and the nested
    layout with detector/rule/severity/title under ``metadata``. Raises
    :class:`MissingField` when id, tenant, timestamp or title is absent and
    :class:`MalformedTimestamp` when the creation time cannot be parsed.
    """
    if not isinstance(record, dict):
        raise MissingField("record")
    alert_id = record.get("id")
    if not alert_id:
        raise MissingField("id")
    tenant_id = record.get("tenant_id") or record.get("tenant")
    if not tenant_id:
        raise MissingField("tenant_id")
    created_raw = _meta_field(record, "created_at")
    if created_raw is None:
        created_raw = record.get("timestamp")
    if created_raw is None:
        raise MissingField("created_at")
    title = _meta_field(record, "title")
    if title is None:
        title = record.get("name")
    if title is None:
        raise MissingField("title")

    created_at = _parse_timestamp(created_raw)
    severity_raw = _meta_field(record, "severity")
    severity = float(severity_raw) if severity_raw is not None else None

    tactics = record.get("mitre_tactics") or []
    tactic_max_raw = record.get("mitre_tactic_max")
    if tactic_max_raw is not None:
        tactic_max = int(tactic_max_raw)
    elif tactics:
        tactic_max = max(tactic_ordinal(t) for t in tactics)
    else:
        tactic_max = 0
    if not 0 <= tactic_max <= MAX_TACTIC_ORDINAL:
        tactic_max = 0

    alert = Alert(
        id=str(alert_id),
        tenant_id=str(tenant_id),
        created_at=created_at,
        title=str(title),
        detector=_creator_field(record, "detector"),
        rule=_creator_field(record, "rule"),
        severity=severity,
        entities=_parse_entities(record.get("entities")),
        entity_relationship_count=int(record.get("entity_relationship_count") or 0),
        mitre_techniques=[str(t) for t in record.get("mitre_techniques") or []],
        mitre_tactic_max=tactic_max,
    )
    alert.resolution = _parse_resolution(record, alert.id, created_at)
    if record.get("category"):
        alert.category = CategoryId(
            value=str(record["category"]), source=CategorySource.DETECTOR_RULE
        )
    return alert


def strip_entities(title: str) -> str:
    """Lowercase a title and replace embedded entities with a placeholder.

    Emails, IP literals, UUIDs, hex digests, domain names and filesystem
    paths each become ``<entity>``; whitespace is collapsed. Total and
    idempotent: stripping an already-stripped title is a no-op.
    """
    text = title.lower()
    for pattern in _ENTITY_PATTERNS:
        text = pattern.sub(ENTITY_TOKEN, text)
    return " ".join(text.split())


def categorize(alert: Alert) -> CategoryId:
    """Assign the alert's category from detector+rule, else normalized title.

    The result is stored on the alert and reused on subsequent calls so
    categorization happens exactly once per alert.
    """
    if alert.category is not None:
        return alert.category
    if alert.detector and alert.rule:
        category = CategoryId(
            value=f"{alert.detector}::{alert.rule}", source=CategorySource.DETECTOR_RULE
        )
    else:
        normalized = strip_entities(alert.title)
        if not normalized:
            raise EmptyCategory(f"alert {alert.id}: no detector/rule and empty normalized title")
        category = CategoryId(value=normalized, source=CategorySource.NORMALIZED_TITLE)
    if not category.value:
        raise EmptyCategory(f"alert {alert.id}: empty category")
    alert.category = category
    return category


def extract_static_features(alert: Alert) -> list[float]:
    """Return the 4 static features: entity count, relationship count,
    max tactic ordinal, technique count."""
    return [
        float(len(alert.entities)),
        float(alert.entity_relationship_count),
        float(alert.mitre_tactic_max),
        float(len(alert.mitre_techniques)),
    ]
