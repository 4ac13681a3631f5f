"""Adapter for the AIT open alert dataset.

Input is one file per testbed network (JSON lines or a JSON array) with
records carrying at least ``timestamp``, ``name``, ``host``,
``event_label`` and ``time_label``. The testbed becomes the tenant, the
host the single entity and the name the category verbatim. An alert is
labeled malicious only when its event label indicates an attack AND its
time label places it inside an attack window; attack-looking events
outside any window are corrected to benign. Analyst label times are
simulated with a seeded uniform delay of 1 to 16 minutes after creation,
and all testbeds are merged in chronological order.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .stream import NormalizedStream

JITTER_MIN_S = 60.0
JITTER_MAX_S = 960.0

_FALSY = {"", "0", "false", "none", "null", "benign", "normal", "-"}
_OUT_OF_WINDOW = _FALSY | {"fp", "false_positive", "falsepositive", "no_attack"}


@dataclass
class IngestStats:
    total: int
    malformed: int
    categories: int
    tenants: int
    malicious: int


def _is_attack_event(value) -> bool:
    if isinstance(value, (list, tuple)):
        return any(_is_attack_event(v) for v in value)
    return str(value).strip().lower() not in _FALSY


def _in_attack_window(value) -> bool:
    if isinstance(value, (list, tuple)):
        return any(_in_attack_window(v) for v in value)
    return str(value).strip().lower() not in _OUT_OF_WINDOW


def _parse_time(value) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip()
    try:
        return float(text)
    except ValueError:
        pass
    from datetime import datetime, timezone

    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def discover_files(data_dir: str | Path) -> list[Path]:
    root = Path(data_dir)
    files = sorted(
        p for p in root.rglob("*")
        if p.is_file() and p.suffix.lower() in (".json", ".jsonl", ".ndjson")
    )
    return files


def _iter_records(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "[":
            yield from json.load(fh)
        else:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)


def ingest_ait(files: Iterable[str | Path], jitter_seed: int = 0,
               tenant_names: Optional[dict[str, str]] = None
               ) -> tuple[NormalizedStream, IngestStats]:
    """Parse AIT alert files into a chronological normalized stream."""
    tenants: list[str] = []
    categories: list[str] = []
    hosts: list[tuple[str, ...]] = []
    created: list[float] = []
    labels: list[int] = []
    malformed = 0

    for path in (Path(f) for f in files):
        tenant = (tenant_names or {}).get(path.stem, path.stem)
        tenant = sys.intern(tenant)
        for record in _iter_records(path):
            try:
                timestamp = _parse_time(record["timestamp"])
                name = str(record["name"])
                host = record.get("host")
                event_label = record.get("event_label")
                time_label = record.get("time_label")
            except (KeyError, TypeError, ValueError):
                malformed += 1
                continue
            if not name:
                malformed += 1
                continue
            malicious = _is_attack_event(event_label) and _in_attack_window(time_label)
            tenants.append(tenant)
            categories.append(sys.intern(name))
            hosts.append((sys.intern(str(host)),) if host not in (None, "") else ())
            created.append(timestamp)
            labels.append(1 if malicious else 0)

    n = len(created)
    created_arr = np.asarray(created, dtype=np.float64)
    order = np.argsort(created_arr, kind="stable")
    rng = np.random.default_rng(jitter_seed)
    jitter = rng.uniform(JITTER_MIN_S, JITTER_MAX_S, size=n)

    label_arr = np.asarray(labels, dtype=np.int8)[order]
    stream = NormalizedStream(
        ids=[f"ait-{i:08d}" for i in range(n)],
        tenants=[tenants[i] for i in order],
        categories=[categories[i] for i in order],
        entities=[hosts[i] for i in order],
        created=created_arr[order],
        resolved=created_arr[order] + jitter,
        investigated=label_arr.copy(),  # the triage action here IS the label
        label=label_arr,
        statics=None,
    )
    stats = IngestStats(
        total=n,
        malformed=malformed,
        categories=len(set(stream.categories)),
        tenants=len(set(stream.tenants)),
        malicious=int(label_arr.sum()),
    )
    return stream, stats
