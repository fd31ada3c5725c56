"""Deterministic JSON/CSV emission for reports.

Floats print with 17 significant digits so every value round-trips
losslessly; infinities serialize as the strings "inf"/"-inf".  Output is
byte-identical for identical inputs, which the CLI tests rely on.
"""

from __future__ import annotations

import json
import math

from .errors import InvalidArgumentError


def format_float(x: float) -> str:
    if math.isnan(x):
        raise InvalidArgumentError("refusing to serialize NaN")
    if x == 0.0:
        return "0"  # normalize -0.0
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise InvalidArgumentError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize to JSON text (trailing newline included)."""
    return _encode(obj, indent, 0) + "\n"


def loads(text: str):
    """Parse JSON; the inverse of :func:`dumps` up to the "inf" convention."""
    return json.loads(text)


def csv_line(values) -> str:
    parts = []
    for v in values:
        if isinstance(v, float):
            parts.append("inf" if math.isinf(v) else format_float(v))
        else:
            parts.append(str(v))
    return ",".join(parts)
