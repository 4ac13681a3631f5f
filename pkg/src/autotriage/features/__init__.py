from .windows import DAY, FeatureConfig, WindowSpec, Workflow, slot_names
from .store import ActionCountStore, ActionSet, Scope
from .vector import FeatureAssembler

__all__ = [
    "DAY",
    "ActionCountStore",
    "ActionSet",
    "FeatureAssembler",
    "FeatureConfig",
    "Scope",
    "WindowSpec",
    "Workflow",
    "slot_names",
]
