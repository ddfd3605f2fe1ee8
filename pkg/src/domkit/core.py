"""Outcome spaces, events, credence functions and extended-real score vectors.

Events are bitmasks over the outcome indices: bit ``i`` of an event mask is set
when outcome ``i`` belongs to the event. Credence functions store one value per
event in a dense array indexed by the mask.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_OUTCOMES = 12
PROBABILITY_TOL = 1e-9


class DomainError(ValueError):
    """A scoring formula is undefined at some credence value."""

    def __init__(self, message: str, event: int | None = None):
        super().__init__(message)
        self.event = event


@dataclass(frozen=True)
class OutcomeSpace:
    """Finite outcome space with a fixed enumeration of its outcomes."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 1:
            raise ValueError("an outcome space needs at least one outcome")
        if len(labels) > MAX_OUTCOMES:
            raise ValueError(f"at most {MAX_OUTCOMES} outcomes are supported, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"outcome labels must be distinct: {labels}")
        for label in labels:
            if "," in label or label == "":
                raise ValueError(f"invalid outcome label {label!r}")

    @classmethod
    def of_size(cls, n: int) -> "OutcomeSpace":
        return cls(tuple(f"w{i + 1}" for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_events(self) -> int:
        return 1 << self.n

    @property
    def full(self) -> int:
        return self.n_events - 1

    def membership(self) -> np.ndarray:
        """Boolean matrix of shape (2**n, n); entry [A, i] is true iff outcome i is in A."""
        return _membership(self.n)

    def event_key(self, mask: int) -> str:
        return ",".join(self.labels[i] for i in range(self.n) if mask >> i & 1)

    def event_from_key(self, key: str) -> int:
        if key == "":
            return 0
        index = {label: i for i, label in enumerate(self.labels)}
        mask = 0
        for part in key.split(","):
            if part not in index:
                raise ValueError(f"unknown outcome {part!r} in event key {key!r}")
            mask |= 1 << index[part]
        return mask


def _membership(n: int) -> np.ndarray:
    masks = np.arange(1 << n)[:, None]
    m = ((masks >> np.arange(n)[None, :]) & 1).astype(bool)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Event:
    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("event mask must be nonnegative")

    def check(self, space: OutcomeSpace) -> "Event":
        if self.mask >= space.n_events:
            raise ValueError(f"event mask {self.mask} out of range for n={space.n}")
        return self

    def contains(self, i: int) -> bool:
        return bool(self.mask >> i & 1)


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CredenceFunction:
    """Finite real credence for every event, indexed by event mask."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        size = arr.size
        if size < 2 or size & (size - 1):
            raise ValueError(f"credence array length must be a power of two >= 2, got {size}")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"credence for event mask {bad} is not a finite real")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size.bit_length() - 1

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])

    def __eq__(self, other):
        if not isinstance(other, CredenceFunction):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True, eq=False)
class ProbabilityWeights:
    """A point of the probability simplex, renormalized on construction."""

    v: np.ndarray
    tol: float = field(default=PROBABILITY_TOL, repr=False)

    def __post_init__(self):
        arr = np.array(self.v, dtype=float).reshape(-1)
        if arr.size < 1:
            raise ValueError("weights must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weights must be finite")
        if np.any(arr < 0):
            raise ValueError(f"weights must be nonnegative: {arr.tolist()}")
        total = math.fsum(arr)
        if abs(total - 1.0) > self.tol:
            raise ValueError(f"weights sum to {total!r}, not 1 within {self.tol}")
        if total != 1.0:
            arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)

    @property
    def n(self) -> int:
        return self.v.size

    def __eq__(self, other):
        if not isinstance(other, ProbabilityWeights):
            return NotImplemented
        return np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(self.v.tobytes())


@dataclass(frozen=True, eq=False)
class ExtendedScoreVector:
    """Element of [0, inf]^n: one inaccuracy per world, +inf allowed."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float).reshape(-1)
        if np.any(np.isnan(arr)):
            raise ValueError("score entries must not be NaN")
        if np.any(arr < 0):
            raise ValueError(f"score entries must be nonnegative: {arr.tolist()}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.size

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.entries)))

    def infinite_worlds(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(np.isinf(self.entries)))

    def __eq__(self, other):
        if not isinstance(other, ExtendedScoreVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _check_dim(space: OutcomeSpace, n: int, what: str):
    if n != space.n:
        raise ValueError(f"{what} has dimension {n}, outcome space has {space.n}")


def credence_from_weights(space: OutcomeSpace, v: ProbabilityWeights) -> CredenceFunction:
    """Expand simplex weights to the additive credence c(A) = sum of v_i over A."""
    _check_dim(space, v.n, "weights")
    m = space.membership()
    values = np.array([math.fsum(v.v[row]) for row in m])
    return CredenceFunction(values)


def singleton_weights(c: CredenceFunction) -> np.ndarray:
    """Credences of the singletons {w_i}, in outcome order."""
    return np.array([c.values[1 << i] for i in range(c.n)])


@dataclass(frozen=True)
class Violation:
    axiom: str
    event: int
    value: float
    expected: float

    def describe(self, space: OutcomeSpace | None = None) -> str:
        key = space.event_key(self.event) if space is not None else str(self.event)
        return f"{self.axiom} at {{{key}}}: got {self.value!r}, expected {self.expected!r}"


def is_probability(
    space: OutcomeSpace, c: CredenceFunction, tol: float = PROBABILITY_TOL
) -> tuple[bool, list[Violation]]:
    """Check the probability axioms up to ``tol``.

    Returns ``(ok, violations)``; every violated axiom is listed with the
    event witnessing it.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    _check_dim(space, c.n, "credence")
    vals = c.values
    violations = []
    if abs(vals[0]) > tol:
        violations.append(Violation("empty", 0, float(vals[0]), 0.0))
    if abs(vals[space.full] - 1.0) > tol:
        violations.append(Violation("normalization", space.full, float(vals[space.full]), 1.0))
    singles = singleton_weights(c)
    for mask, row in enumerate(space.membership()):
        if vals[mask] < -tol:
            violations.append(Violation("nonnegativity", mask, float(vals[mask]), 0.0))
        additive = math.fsum(singles[row])
        if abs(vals[mask] - additive) > tol:
            violations.append(Violation("additivity", mask, float(vals[mask]), additive))
    return not violations, violations


def arctan_distance(a, b) -> float:
    """Sum of |arctan a_i - arctan b_i| with arctan(+inf) = pi/2.

    Metrizes the product topology on [0, inf]^n.
    """
    a = np.asarray(getattr(a, "entries", a), dtype=float)
    b = np.asarray(getattr(b, "entries", b), dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return math.fsum(np.abs(np.arctan(a) - np.arctan(b)))


def as_weights(v: ProbabilityWeights | Sequence[float], tol: float = PROBABILITY_TOL) -> ProbabilityWeights:
    return v if isinstance(v, ProbabilityWeights) else ProbabilityWeights(np.asarray(v, dtype=float), tol)


def as_credence(c) -> CredenceFunction:
    return c if isinstance(c, CredenceFunction) else CredenceFunction(np.asarray(c, dtype=float))
