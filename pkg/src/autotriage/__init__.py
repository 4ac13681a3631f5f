"""Streaming alert-triage engine that learns from analyst triage actions."""

__version__ = "0.1.0"
