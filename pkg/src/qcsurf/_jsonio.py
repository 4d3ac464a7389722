"""Deterministic JSON output: sorted keys, floats at 17 significant digits."""

from __future__ import annotations

import json
import math
from fractions import Fraction


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = ", " if not indent else ","
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    elif isinstance(obj, Fraction):
        out.append(json.dumps(str(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        for i, (key, value) in enumerate(items):
            out.append(pad + json.dumps(str(key)) + ": ")
            _encode(value, indent, level + 1, out)
            if i < len(items) - 1:
                out.append(sep)
            out.append(nl)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[" + nl)
        for i, value in enumerate(obj):
            out.append(pad)
            _encode(value, indent, level + 1, out)
            if i < len(obj) - 1:
                out.append(sep)
            out.append(nl)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    out: list[str] = []
    _encode(obj, indent, 0, out)
    return "".join(out)


def dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
