"""Canonical text rendering: sorted keys, 9-significant-digit reals.

Every report, proposal and pool file the package emits goes through
:func:`canonical_json`, so identical inputs always produce byte-identical
output regardless of which entry point (library, CLI, service) built it.
"""
from __future__ import annotations

import math
from typing import Any

_INDENT = "  "


def format_real(x: float) -> str:
    """Render a real with 9 significant digits ('0.859154930' -> '0.85915493')."""
    if isinstance(x, bool):
        raise TypeError("bool is not a real")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite real {x!r} cannot be canonicalized")
    if x == 0.0:
        return "0"
    return format(x, ".9g")


def _encode_string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _encode(value: Any, depth: int) -> str:
    pad = _INDENT * depth
    inner = _INDENT * (depth + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, str):
        return _encode_string(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            items.append(f"{inner}{_encode_string(key)}: {_encode(value[key], depth + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{_encode(v, depth + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot canonicalize value of type {type(value).__name__}")


def canonical_json(value: Any) -> str:
    """Serialize to canonical JSON text (trailing newline included)."""
    return _encode(value, 0) + "\n"
