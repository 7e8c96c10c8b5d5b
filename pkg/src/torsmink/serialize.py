"""Deterministic JSON serialization.

Floats are written with 17 significant digits ("%.17g"), which round-trips
every IEEE double and, unlike shortest-repr, makes byte-identity across runs
and thread counts a testable property. Keys keep insertion order; no
whitespace variability beyond the fixed indent.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite float in output: {x!r}")
    s = f"{x:.17g}"
    return s


def _encode(obj: Any, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), out, indent, level)
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad_in)
            _encode(item, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if len(obj) == 0:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"non-string key: {key!r}")
            out.append(pad_in + json.dumps(key) + ": ")
            _encode(val, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"unserializable type: {type(obj)!r}")


def dumps(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _encode(obj, out, indent, 0)
    return "".join(out) + "\n"


def dump_path(obj: Any, path: str | Path, indent: int = 2) -> None:
    Path(path).write_text(dumps(obj, indent=indent))


def loads(text: str) -> Any:
    return json.loads(text)


def load_path(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())
