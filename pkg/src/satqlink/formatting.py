"""Centralised numeric formatting for every emitted artifact.

Tables use 6 significant digits; CSV and key-value records use full
precision so values round-trip through text exactly.
"""

from __future__ import annotations

__all__ = ["csv_float", "table_float", "config_value"]


def csv_float(x: float) -> str:
    """Full-precision float for machine-readable output."""
    return f"{x:.17g}"


def table_float(x: float) -> str:
    """Six significant digits for human-facing tables."""
    return f"{x:.6g}"


def config_value(value) -> str:
    """Render a config field value; floats keep full precision."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return csv_float(value)
    return str(value)
