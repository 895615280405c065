"""Adaptive group testing over community-structured contact networks."""

__version__ = "0.1.0"
