"""Scoring rules on the full event algebra and the zero-skipping expectation.

A rule maps a credence function to one inaccuracy per world. Every built-in
rule is a sum over events ``A`` of a per-event penalty that depends on
``c(A)`` and on whether the world lies in ``A``; composites add rules up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .core import (
    CredenceFunction,
    DomainError,
    ExtendedScoreVector,
    OutcomeSpace,
    ProbabilityWeights,
)

KINDS = ("brier", "log", "spherical", "weighted_brier", "composite")
# Deliberately defective rules used to check that the audits can say no.
FIXTURE_KINDS = ("linear", "jump", "vertex_jump")
MAX_DEPTH = 4
ROUNDING_TOL = 1e-12


@dataclass(frozen=True)
class ScoringRule:
    """Immutable description of a scoring rule.

    ``weights`` maps event keys (comma-joined outcome labels, ``""`` for the
    empty event) to positive weights; events left out weigh 1. ``terms`` holds
    ``(coefficient, rule)`` pairs for composites. ``threshold`` and ``size``
    parameterize the ``jump`` fixture.
    """

    kind: str
    weights: tuple[tuple[str, float], ...] = ()
    terms: tuple[tuple[float, "ScoringRule"], ...] = ()
    threshold: float = 0.5
    size: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS + FIXTURE_KINDS:
            raise ValueError(f"unknown scoring rule kind {self.kind!r}")
        for key, w in self.weights:
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"weight for event {key!r} must be strictly positive, got {w!r}")
        if self.kind == "composite":
            if not self.terms:
                raise ValueError("composite rule needs at least one term")
            for coeff, _ in self.terms:
                if not (math.isfinite(coeff) and coeff > 0):
                    raise ValueError(f"composite coefficient must be strictly positive, got {coeff!r}")
            if self.depth > MAX_DEPTH:
                raise ValueError(f"composite nesting depth {self.depth} exceeds {MAX_DEPTH}")
        if self.kind in ("jump", "vertex_jump") and not (self.size > 0):
            raise ValueError("jump size must be positive")

    @property
    def depth(self) -> int:
        if self.kind != "composite":
            return 0
        return 1 + max(rule.depth for _, rule in self.terms)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScoringRule":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ValueError("rule must be a JSON object with a 'kind' field")
        kind = data["kind"]
        if kind == "weighted_brier":
            weights = data.get("weights", {})
            if not isinstance(weights, Mapping):
                raise ValueError("weighted_brier 'weights' must be an object")
            return cls(kind, weights=tuple((str(k), float(w)) for k, w in weights.items()))
        if kind == "composite":
            terms = data.get("terms")
            if not isinstance(terms, list):
                raise ValueError("composite 'terms' must be a list")
            return cls(kind, terms=tuple((float(t["coeff"]), cls.from_dict(t["rule"])) for t in terms))
        if kind == "jump":
            return cls(kind, threshold=float(data.get("threshold", 0.5)), size=float(data.get("size", 1.0)))
        if kind == "vertex_jump":
            return cls(kind, size=float(data.get("size", 1.0)))
        return cls(kind)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "weighted_brier":
            out["weights"] = dict(self.weights)
        elif self.kind == "composite":
            out["terms"] = [{"coeff": c, "rule": r.to_dict()} for c, r in self.terms]
        elif self.kind == "jump":
            out.update(threshold=self.threshold, size=self.size)
        elif self.kind == "vertex_jump":
            out["size"] = self.size
        return out

    def event_weights(self, space: OutcomeSpace) -> np.ndarray:
        lam = np.ones(space.n_events)
        for key, w in self.weights:
            lam[space.event_from_key(key)] = w
        return lam


def as_rule(rule) -> ScoringRule:
    if isinstance(rule, ScoringRule):
        return rule
    if isinstance(rule, str):
        return ScoringRule(rule)
    return ScoringRule.from_dict(rule)


def _truth(space: OutcomeSpace) -> np.ndarray:
    # (n, 2**n): world i is in event A
    return space.membership().T


def _brier_terms(C, T):
    return (C[:, None, :] - T[None, :, :]) ** 2


def _log_terms(C, T):
    # credences outside [0, 1] are infinitely inaccurate, which keeps every entry >= 0;
    # values within ROUNDING_TOL of the interval are rounding noise from additive sums
    bad = (C < -ROUNDING_TOL) | (C > 1 + ROUNDING_TOL)
    C = np.clip(C, 0.0, 1.0)
    arg = np.where(T[None], C[:, None, :], 1.0 - C[:, None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = -np.log(arg)
    terms = np.where((arg <= 0) | bad[:, None, :], np.inf, terms)
    return terms + 0.0  # -0.0 -> 0.0


def _spherical_terms(C, T, space):
    norm2 = C**2 + (1.0 - C) ** 2
    if np.any(norm2 == 0):
        row, event = np.argwhere(norm2 == 0)[0]
        raise DomainError(
            f"spherical score undefined at credence {C[row, event]!r} for event {{{space.event_key(int(event))}}}",
            event=int(event),
        )
    norm = np.sqrt(norm2)
    num = np.where(T[None], C[:, None, :], 1.0 - C[:, None, :])
    return 1.0 - num / norm[:, None, :]


def score_batch(rule, space: OutcomeSpace, credences) -> np.ndarray:
    """Score many credence functions at once.

    ``credences`` has shape (k, 2**n); returns an array of shape (k, n) whose
    entries lie in [0, inf].
    """
    rule = as_rule(rule)
    C = np.atleast_2d(np.asarray(credences, dtype=float))
    if C.shape[1] != space.n_events:
        raise ValueError(f"credences have {C.shape[1]} events, outcome space has {space.n_events}")
    if not np.all(np.isfinite(C)):
        raise ValueError("credences must be finite reals")
    T = _truth(space)
    kind = rule.kind
    if kind == "brier":
        return _brier_terms(C, T).sum(axis=-1)
    if kind == "weighted_brier":
        return (_brier_terms(C, T) * rule.event_weights(space)).sum(axis=-1)
    if kind == "log":
        return _log_terms(C, T).sum(axis=-1)
    if kind == "spherical":
        return np.maximum(_spherical_terms(C, T, space).sum(axis=-1), 0.0)
    if kind == "composite":
        total = np.zeros((C.shape[0], space.n))
        for coeff, member in rule.terms:
            total = total + coeff * score_batch(member, space, C)
        return total
    if kind == "linear":
        return np.abs(C[:, None, :] - T[None]).sum(axis=-1)
    if kind == "jump":
        base = _brier_terms(C, T).sum(axis=-1)
        hit = C[:, 1] > rule.threshold
        return base + rule.size * hit[:, None]
    if kind == "vertex_jump":
        base = _brier_terms(C, T).sum(axis=-1)
        vertex = T[0].astype(float)  # credence of the point mass at the first world
        hit = np.all(C == vertex[None], axis=1)
        return base + rule.size * hit[:, None]
    raise AssertionError(kind)


def score(rule, space: OutcomeSpace, c: CredenceFunction) -> ExtendedScoreVector:
    """Inaccuracy of ``c`` at each world."""
    if c.n != space.n:
        raise ValueError(f"credence has dimension {c.n}, outcome space has {space.n}")
    return ExtendedScoreVector(score_batch(rule, space, c.values[None])[0])


def expected_score(v: ProbabilityWeights, f) -> float:
    """Expectation of ``f`` under ``v``, skipping zero-probability worlds.

    Terms with ``v_i == 0`` are dropped even when ``f_i`` is infinite, so the
    result is well defined on [0, inf].
    """
    weights = np.asarray(getattr(v, "v", v), dtype=float)
    entries = np.asarray(getattr(f, "entries", f), dtype=float)
    if weights.shape != entries.shape:
        raise ValueError(f"dimension mismatch: {weights.shape} vs {entries.shape}")
    live = weights != 0
    if np.any(np.isinf(entries[live])):
        return math.inf
    return math.fsum(weights[live] * entries[live])


def expected_scores(v, scores: np.ndarray) -> np.ndarray:
    """Row-wise :func:`expected_score` for a (k, n) array of score vectors."""
    return np.array([expected_score(v, row) for row in np.atleast_2d(scores)])
