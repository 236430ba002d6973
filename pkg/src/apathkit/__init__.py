"""Desk-scale computations for Lie algebroid integration."""
from __future__ import annotations

from ._accel import backend
from .report import Report

__version__ = "0.1.0"

__all__ = ["Report", "backend", "__version__"]
