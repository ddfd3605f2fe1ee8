"""JSON and file formats: credences, rules, weights, and deterministic output."""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import CredenceFunction, OutcomeSpace, ProbabilityWeights
from .scoring import ScoringRule


def _float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize with fixed 17-significant-digit floats and ``"inf"`` for infinities.

    Output is locale independent and byte-stable for equal inputs.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _number(x) -> float:
    if isinstance(x, str) and x in ("inf", "-inf"):
        return float(x)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"expected a number, got {x!r}")
    return float(x)


def parse_credence(data: Mapping[str, Any]) -> tuple[OutcomeSpace, CredenceFunction]:
    """Read ``{"outcomes": [...], "credences": {event key: value}}``.

    Every one of the 2**n canonical event keys must be present exactly once.
    """
    if not isinstance(data, Mapping) or "outcomes" not in data or "credences" not in data:
        raise ValueError("credence JSON needs 'outcomes' and 'credences'")
    space = OutcomeSpace(tuple(data["outcomes"]))
    given = data["credences"]
    if not isinstance(given, Mapping):
        raise ValueError("'credences' must be an object")
    expected = {space.event_key(mask): mask for mask in range(space.n_events)}
    missing = sorted(set(expected) - set(given))
    extra = sorted(set(given) - set(expected))
    if missing or extra:
        raise ValueError(f"credence keys mismatch: missing {missing}, unexpected {extra}")
    values = np.empty(space.n_events)
    for key, mask in expected.items():
        values[mask] = _number(given[key])
    return space, CredenceFunction(values)


def credence_to_dict(space: OutcomeSpace, c: CredenceFunction) -> dict:
    return {
        "outcomes": list(space.labels),
        "credences": {space.event_key(mask): float(c.values[mask]) for mask in range(space.n_events)},
    }


def parse_weights(data) -> ProbabilityWeights:
    """Weights from a bare list, ``{"p": [...]}`` (a certificate) or ``{"weights": [...]}``."""
    if isinstance(data, Mapping):
        for key in ("p", "weights"):
            if key in data:
                data = data[key]
                break
        else:
            raise ValueError("weights JSON needs a 'p' or 'weights' field")
    if not isinstance(data, list):
        raise ValueError("weights must be a JSON list")
    return ProbabilityWeights(np.array([_number(x) for x in data]))


def parse_rule(data) -> ScoringRule:
    return ScoringRule.from_dict(data)


def read_json(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
