"""JSON file formats and deterministic output formatting.

System file::

    {"states": n, "transition": [[...]], "initial": [...],
     "observable": {"space": m, "channel": [[...]]},
     "cost_matrix": [[...]],                        # optional
     "weight": {"kind": "geometric", "gamma": 0.5, "horizon": 10, "include_t0": false}}

Triple file, either explicit::

    {"macrostates": k, "pi": [[...]], "phi": [[...]], "rho": [[...]]}

or induced from a partition::

    {"partition": [0, 0, 1, 1], "induce": {"ref_dist": "stationary", "argmin_rho": false}}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .model import CompressionTriple, MarkovSystem, Observable, WeightSpec
from .optimize import Partition, induced_triple


class FileFormatError(ConfigurationError):
    """A file could not be read, parsed, or mapped onto the domain types."""


@dataclass
class SystemFile:
    system: MarkovSystem
    observable: Observable
    weight: WeightSpec
    declared_states: int
    declared_space: int


def _read_json(path):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read file: {exc.strerror or exc}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FileFormatError(f"{path}: not UTF-8 (byte offset {exc.start})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise FileFormatError(
            f"{path}: invalid JSON at byte offset {offset} (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None


def _matrix(doc, key, path, ndim=2):
    if key not in doc:
        raise FileFormatError(f"{path}: missing key {key!r}")
    try:
        arr = np.array(doc[key], dtype=np.float64)
    except (TypeError, ValueError):
        raise FileFormatError(f"{path}: {key!r} is not a rectangular array of numbers") from None
    if arr.ndim != ndim:
        raise FileFormatError(f"{path}: {key!r} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


def weight_from_dict(d) -> WeightSpec:
    if not isinstance(d, dict):
        raise FileFormatError("'weight' must be an object")
    unknown = set(d) - {"kind", "gamma", "horizon", "include_t0"}
    if unknown:
        raise FileFormatError(f"unknown weight keys {sorted(unknown)}")
    return WeightSpec(kind=d.get("kind", "uniform"), horizon=d.get("horizon", 1),
                      gamma=d.get("gamma"), include_t0=bool(d.get("include_t0", False)))


def load_system(path) -> SystemFile:
    """Parse a system file. Probability values are not checked here; run
    :func:`ssc.model.validate_system` on the result."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    transition = _matrix(doc, "transition", path)
    initial = _matrix(doc, "initial", path, ndim=1)
    ob = doc.get("observable")
    if not isinstance(ob, dict):
        raise FileFormatError(f"{path}: missing object 'observable'")
    channel = _matrix(ob, "channel", f"{path}: observable")
    cost = _matrix(doc, "cost_matrix", path) if doc.get("cost_matrix") is not None else None
    w = weight_from_dict(doc.get("weight", {}))
    return SystemFile(MarkovSystem(transition, initial), Observable(channel, cost), w,
                      int(doc.get("states", transition.shape[0])), int(ob.get("space", channel.shape[1])))


def load_triple(path, sysfile: SystemFile) -> CompressionTriple:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    if "partition" in doc:
        induce = doc.get("induce", {}) or {}
        part = Partition(tuple(int(b) for b in doc["partition"]))
        return induced_triple(part, sysfile.system, sysfile.observable, sysfile.weight,
                              ref_dist=induce.get("ref_dist", "w_averaged_occupancy"),
                              argmin_rho=bool(induce.get("argmin_rho", False)))
    triple = CompressionTriple(_matrix(doc, "pi", path), _matrix(doc, "phi", path), _matrix(doc, "rho", path))
    if "macrostates" in doc and int(doc["macrostates"]) != triple.k:
        raise FileFormatError(f"{path}: macrostates={doc['macrostates']} but phi is {triple.k}x{triple.k}")
    return triple


def system_to_dict(sys: MarkovSystem, obs: Observable, w: WeightSpec) -> dict:
    out = {
        "states": sys.n,
        "transition": sys.transition.tolist(),
        "initial": sys.initial.tolist(),
        "observable": {"space": obs.m, "channel": obs.channel.tolist()},
    }
    if obs.cost_matrix is not None:
        out["cost_matrix"] = obs.cost_matrix.tolist()
    weight = {"kind": w.kind, "horizon": w.horizon, "include_t0": w.include_t0}
    if w.gamma is not None:
        weight["gamma"] = w.gamma
    out["weight"] = weight
    return out


def triple_to_dict(triple: CompressionTriple) -> dict:
    return {"macrostates": triple.k, "pi": triple.pi.tolist(), "phi": triple.phi.tolist(),
            "rho": triple.rho.tolist()}


# -- deterministic JSON ----------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits; non-finite values become strings."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """``json.dumps`` with every float printed via :func:`format_float`."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
