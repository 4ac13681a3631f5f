from .config import ServiceConfig
from .engine import Disposition, QueueEntry, TriageService
from .sampler import StratifiedSampler

__all__ = ["Disposition", "QueueEntry", "ServiceConfig", "StratifiedSampler", "TriageService"]
