"""Runtime configuration for the live triage service."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

_ENV_PREFIX = "AUTOTRIAGE_"


@dataclass
class ServiceConfig:
    close_threshold: float = 0.1
    sample_period_seconds: float = 86400.0
    sample_budget_floor: int = 10
    sample_budget_fraction: float = 0.01
    lateness_bound: float = 3600.0
    top_k_features: int = 5
    workflow: str = "full"
    strict_counters: bool = False  # True: auto-closures never touch counters
    model_path: Optional[str] = None
    state_dir: str = "./state"
    api_token: Optional[str] = None

    def __post_init__(self):
        if not 0.0 <= self.close_threshold <= 1.0:
            raise ValueError("close_threshold must be in [0, 1]")

    @classmethod
    def load(cls, path: Optional[str | Path] = None, **overrides) -> "ServiceConfig":
        """File values, then AUTOTRIAGE_* environment, then explicit overrides."""
        values: dict = {}
        if path is not None:
            values.update(json.loads(Path(path).read_text()))
        for f in fields(cls):
            env = os.environ.get(_ENV_PREFIX + f.name.upper())
            if env is not None:
                if f.type in ("float",):
                    values[f.name] = float(env)
                elif f.type in ("int",):
                    values[f.name] = int(env)
                elif f.type == "bool":
                    values[f.name] = env.lower() in ("1", "true", "yes")
                else:
                    values[f.name] = env
        values.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})
