"""Rotation graphs of search trees on small graphs."""

from __future__ import annotations

__version__ = "0.1.0"
