"""Deterministic number formatting for emitted files."""

from __future__ import annotations

import math


def num(v) -> str:
    """Shortest round-trip text; integral values print without a fraction."""
    v = float(v)
    if v == 0:
        return "0"
    if math.isfinite(v) and v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def nums(*values) -> str:
    return " ".join(num(v) for v in values)


def plain(v):
    """Python int/float for serializers that reject numpy scalars."""
    if isinstance(v, bool):
        return v
    if isinstance(v, int) or (hasattr(v, "dtype") and v.dtype.kind in "iu"):
        return int(v)
    return float(v)
