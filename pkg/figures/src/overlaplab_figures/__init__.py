"""Rendering layer for overlaplab exports.

Strict pipeline boundary: this package consumes the CSV/JSON files the
primary tool writes and never recomputes dynamics.
"""

__version__ = "0.1.0"

from .render import PlotJob, render  # noqa: F401
