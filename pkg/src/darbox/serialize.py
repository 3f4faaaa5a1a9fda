"""Deterministic structured-text output.

Structured mode is JSON with every float printed at 17 significant digits
(lossless round-trip) and dict keys in insertion order, so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .bounds import Enclosure, MockOracle
from .geometry import Rectangle


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(float(x), ".17g")


def dumps(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [dumps(v, indent + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(inner + p for p in parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text: str) -> Any:
    return json.loads(text)


def load_mock_oracle(source: str | dict) -> MockOracle:
    """Build a mock oracle from JSON text or an already-parsed dict.

    Schema::

        {"default": {"lo": 0.0, "hi": 0.0},
         "regions": [{"lower": [..], "upper": [..], "lo": 0.0, "hi": 1.0}, ..]}
    """
    data = json.loads(source) if isinstance(source, str) else source
    default = data.get("default", {"lo": 0.0, "hi": 0.0})
    regions = []
    for entry in data.get("regions", []):
        rect = Rectangle(tuple(entry["lower"]), tuple(entry["upper"]))
        regions.append((rect, Enclosure(entry["lo"], entry["hi"], rigorous=True)))
    return MockOracle(regions, Enclosure(default["lo"], default["hi"], rigorous=True))
