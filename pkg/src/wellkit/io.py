"""JSON reading and writing for maps and diagrams."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .mesh import Interval1D, SampledMap, TriangulatedRect, build_map, build_map_on_points
from .persistence import PersistenceDiagram
from .wellcore import WellDiagram


class ParseError(ValueError):
    pass


def domain_from_json(d: dict):
    try:
        kind = d["kind"]
        if kind == "interval":
            return Interval1D(float(d["lo"]), float(d["hi"]), int(d["n"]))
        if kind == "grid":
            return TriangulatedRect(float(d["x_lo"]), float(d["x_hi"]), float(d["y_lo"]),
                                    float(d["y_hi"]), int(d["nx"]), int(d["ny"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad domain: {exc}") from exc
    raise ParseError(f"unknown domain kind {kind!r}")


def map_from_json(data: dict) -> SampledMap:
    """``{"domain": {...}, "values": [...], "points": [...] (1-D, optional)}``."""
    if not isinstance(data, dict) or "domain" not in data or "values" not in data:
        raise ParseError("a map needs 'domain' and 'values'")
    dom = domain_from_json(data["domain"])
    try:
        if "points" in data:
            return build_map_on_points(dom, data["points"], data["values"])
        return build_map(dom, data["values"])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def map_to_json(m: SampledMap) -> dict:
    out = {"domain": m.domain.to_json(), "values": m.values.tolist()}
    if m.dim == 1 and not m.structured:
        out["points"] = m.points.tolist()
    if m.codomain_dim == 1:
        out["values"] = m.values[:, 0].tolist()
    return out


def read_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_map(path) -> tuple[SampledMap, object]:
    """Map plus the optional target stored under ``"a"``."""
    data = read_json(path)
    return map_from_json(data), data.get("a") if isinstance(data, dict) else None


def load_diagram(path):
    """A well diagram (object with ``points``) or persistence diagram (list of pairs)."""
    data = read_json(path)
    try:
        if isinstance(data, dict) and "points" in data:
            return WellDiagram.from_json(data)
        if isinstance(data, dict) and "pairs" in data:
            data = data["pairs"]
        if isinstance(data, list):
            return PersistenceDiagram.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad diagram ({exc})") from exc
    raise ParseError(f"{path}: not a diagram")


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(o):
    if isinstance(o, float) and math.isinf(o):
        return "inf" if o > 0 else "-inf"
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps(obj) -> str:
    """Deterministic JSON text; infinities become the string ``"inf"``."""
    return json.dumps(_clean(obj), default=_default, sort_keys=True, indent=2) + "\n"
