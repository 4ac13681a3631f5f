"""Immutable trained-model artifacts and their canonical serialization.

An artifact is a plain payload (trees or weights) plus metadata, encoded
as canonical JSON: sorted keys, no whitespace, floats written with repr.
Identical models therefore serialize to identical bytes, and byte
equality implies model equality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import CorruptArtifact, DimensionMismatch, VersionMismatch
from .trees import FlatTree

FORMAT_VERSION = 1
MARGIN_CLIP = 30.0  # keeps sigmoid strictly inside (0, 1) in float64


def sigmoid(margins):
    return 1.0 / (1.0 + np.exp(-np.clip(margins, -MARGIN_CLIP, MARGIN_CLIP)))


@dataclass(frozen=True)
class ModelArtifact:
    kind: str  # gbdt | logistic | forest
    feature_names: list[str]
    params: dict
    payload: dict
    metadata: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def trees(self) -> list[FlatTree]:
        return [FlatTree.from_payload(p) for p in self.payload["trees"]]


def _check_width(artifact: ModelArtifact, width: int) -> None:
    if width != artifact.n_features:
        raise DimensionMismatch(
            f"feature vector has {width} slots, model expects {artifact.n_features}"
        )


def raw_margin(artifact: ModelArtifact, fv: Sequence[float]) -> float:
    """Additive margin before the sigmoid (gbdt/logistic) or the averaged
    leaf probability (forest)."""
    fv = np.asarray(fv, dtype=np.float64)
    _check_width(artifact, fv.shape[-1])
    if artifact.kind == "gbdt":
        margin = artifact.payload["base_margin"]
        lr = artifact.payload["learning_rate"]
        for tree in artifact.trees():
            margin += lr * tree.predict_one(fv)
        return float(margin)
    if artifact.kind == "logistic":
        weights = np.asarray(artifact.payload["weights"])
        means = np.asarray(artifact.payload["means"])
        stds = np.asarray(artifact.payload["stds"])
        return float((fv - means) / stds @ weights + artifact.payload["bias"])
    if artifact.kind == "forest":
        values = [tree.predict_one(fv) for tree in artifact.trees()]
        return float(np.mean(values))
    raise CorruptArtifact(f"unknown model kind {artifact.kind!r}")


def predict(artifact: ModelArtifact, fv: Sequence[float]) -> float:
    """Probability in (0, 1) for one feature vector."""
    margin = raw_margin(artifact, fv)
    if artifact.kind == "forest":
        return float(np.clip(margin, 1e-9, 1 - 1e-9))
    return float(sigmoid(margin))


def predict_matrix(artifact: ModelArtifact, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    _check_width(artifact, X.shape[1])
    if artifact.kind == "gbdt":
        margins = np.full(len(X), artifact.payload["base_margin"])
        lr = artifact.payload["learning_rate"]
        for tree in artifact.trees():
            margins += lr * tree.predict_matrix(X)
        return sigmoid(margins)
    if artifact.kind == "logistic":
        weights = np.asarray(artifact.payload["weights"])
        means = np.asarray(artifact.payload["means"])
        stds = np.asarray(artifact.payload["stds"])
        return sigmoid((X - means) / stds @ weights + artifact.payload["bias"])
    if artifact.kind == "forest":
        acc = np.zeros(len(X))
        for tree in artifact.trees():
            acc += tree.predict_matrix(X)
        return np.clip(acc / len(artifact.payload["trees"]), 1e-9, 1 - 1e-9)
    raise CorruptArtifact(f"unknown model kind {artifact.kind!r}")


def serialize(artifact: ModelArtifact) -> bytes:
    document = {
        "format_version": FORMAT_VERSION,
        "kind": artifact.kind,
        "feature_names": artifact.feature_names,
        "params": artifact.params,
        "payload": artifact.payload,
        "metadata": artifact.metadata,
    }
    return json.dumps(document, sort_keys=True, separators=(",", ":")).encode()


def deserialize(blob: bytes) -> ModelArtifact:
    try:
        document = json.loads(blob.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptArtifact(f"unreadable artifact: {exc}") from None
    if not isinstance(document, dict):
        raise CorruptArtifact("artifact root must be an object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"artifact version {version!r}, expected {FORMAT_VERSION}")
    try:
        return ModelArtifact(
            kind=document["kind"],
            feature_names=list(document["feature_names"]),
            params=dict(document["params"]),
            payload=dict(document["payload"]),
            metadata=dict(document.get("metadata", {})),
        )
    except (KeyError, TypeError) as exc:
        raise CorruptArtifact(f"malformed artifact: {exc}") from None
