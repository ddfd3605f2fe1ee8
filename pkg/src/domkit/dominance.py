"""Construct a probability whose score strictly dominates a given credence's score.

Pipeline: sample the finite scores of probabilities, find a hull point
strictly below the target score with a linear program, then descend to the
score of an actual probability and check strict domination at every world.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np

from .core import (
    CredenceFunction,
    OutcomeSpace,
    ProbabilityWeights,
    as_weights,
    credence_from_weights,
    is_probability,
    singleton_weights,
)
from .geometry import (
    SampledScoreSet,
    farthest_point_descent,
    solve_improvement_lp,
    support_function,
)
from .scoring import as_rule, score, score_batch
from .simplex import auto_grid, dirichlet, grid_points, mix_toward_barycenter, unique_rows


class EmptySample(ValueError):
    """Every sampled probability had an infinite score coordinate."""


@dataclass(frozen=True)
class FinderConfig:
    grid_m: int | None = None
    random_samples: int = 200
    seed: int = 0
    epsilon: float = 1e-6
    refine_iters: int = 500
    refine_tol: float = 1e-7
    interior_mix: float = 1e-3
    prob_tol: float = 1e-9
    column_iters: int = 50

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not (0 <= self.refine_tol < self.epsilon / 2):
            raise ValueError("refine_tol must lie in [0, epsilon/2)")
        if self.grid_m is not None and self.grid_m < 2:
            raise ValueError("grid_m must be at least 2")
        if min(self.random_samples, self.refine_iters, self.column_iters) < 0:
            raise ValueError("random_samples, refine_iters and column_iters must be nonnegative")
        if not (0 <= self.interior_mix < 1):
            raise ValueError("interior_mix must lie in [0, 1)")

    def resolved_grid(self, n: int) -> int:
        return self.grid_m if self.grid_m is not None else auto_grid(n)

    def to_dict(self) -> dict:
        return asdict(self)


def sample_score_set(rule, space: OutcomeSpace, cfg: FinderConfig | None = None) -> SampledScoreSet:
    """Scores of grid and random probabilities, keeping only everywhere-finite ones.

    Grid points on the simplex boundary are mixed toward the barycenter by
    ``cfg.interior_mix``; random points are uniform (flat Dirichlet).
    """
    cfg = cfg or FinderConfig()
    rule = as_rule(rule)
    n = space.n
    m = cfg.resolved_grid(n)
    grid = mix_toward_barycenter(grid_points(n, m), cfg.interior_mix)
    rng = np.random.default_rng(cfg.seed)
    extra = dirichlet(rng, n, cfg.random_samples)
    weights = unique_rows(np.vstack([grid, extra]))
    credences = weights @ space.membership().T.astype(float)
    scores = score_batch(rule, space, credences)
    finite = np.all(np.isfinite(scores), axis=1)
    if not np.any(finite):
        raise EmptySample(f"all {len(weights)} sampled probabilities have infinite scores")
    meta = {
        "grid_m": m,
        "random_samples": cfg.random_samples,
        "seed": cfg.seed,
        "interior_mix": cfg.interior_mix,
        "dropped": int(np.sum(~finite)),
    }
    return SampledScoreSet(weights[finite], scores[finite], meta)


class Verification(NamedTuple):
    margins: np.ndarray
    dominated: bool


def _score_weights(rule, space, v: np.ndarray) -> np.ndarray:
    return score(rule, space, credence_from_weights(space, as_weights(v))).entries


def extended_margins(score_c: np.ndarray, score_p: np.ndarray) -> np.ndarray:
    """score_c - score_p with +inf - finite = +inf; inf - inf is undefined (NaN)."""
    with np.errstate(invalid="ignore"):
        return np.asarray(score_c, dtype=float) - np.asarray(score_p, dtype=float)


def verify_domination(rule, space: OutcomeSpace, p, c: CredenceFunction) -> Verification:
    """Per-world margins s(c) - s(p) and whether p strictly dominates c everywhere."""
    p = as_weights(p)
    sp = _score_weights(rule, space, p.v)
    sc = score(rule, space, c).entries
    margins = extended_margins(sc, sp)
    ok = bool(np.all(np.isfinite(sp)) and np.all(margins > 0))
    return Verification(margins, ok)


def _gap(scores: np.ndarray, target: np.ndarray) -> np.ndarray:
    # max_i (s_i - target_i); an infinite target coordinate is met by any finite score
    with np.errstate(invalid="ignore"):
        diff = scores - target
    diff = np.where(np.isnan(diff), np.inf, diff)
    return diff.max(axis=-1)


def _dual_value(weights: np.ndarray, scores: np.ndarray, target: np.ndarray) -> np.ndarray:
    # sum over finite-target worlds with v_i > 0 of v_i (s_i - target_i)
    live = (weights > 0) & np.isfinite(target)
    with np.errstate(invalid="ignore"):
        terms = np.where(live, weights * (scores - np.where(np.isfinite(target), target, 0.0)), 0.0)
    return terms.sum(axis=-1)


def refine_local(
    rule,
    space: OutcomeSpace,
    target,
    seeds: Sequence,
    cfg: FinderConfig | None = None,
    step: float | None = None,
    stop_below: float | None = None,
) -> ProbabilityWeights:
    """Search the simplex for v minimizing g(v) = max_i (s(p_v)_i - target_i).

    Moves are pairwise exchanges of mass ``h`` between worlds. They climb the
    concave function E_v s(p_v) - <v, target>, whose maximizer equalizes the
    gaps s_i - target_i and so minimizes g; ``h`` halves whenever no exchange
    helps and doubles (up to the initial step) when one does. The best g seen over ``cfg.refine_iters`` sweeps from each seed is
    returned.
    """
    cfg = cfg or FinderConfig()
    rule = as_rule(rule)
    target = np.asarray(target, dtype=float)
    seeds = [np.array(getattr(s, "v", s), dtype=float) for s in seeds]
    if not seeds:
        raise ValueError("refine_local needs at least one seed")
    n = space.n
    if step is None:
        step = 1.0 / cfg.resolved_grid(n)
    member = space.membership().T.astype(float)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]

    best_v, best_g = None, math.inf
    for seed in seeds:
        v = seed.copy()
        s = score_batch(rule, space, v @ member)[0]
        phi = float(_dual_value(v, s, target))
        gv = float(_gap(s, target))
        if best_v is None or gv < best_g:
            best_v, best_g = v, gv
        h = step
        for _ in range(cfg.refine_iters):
            if h < 1e-12 or (stop_below is not None and best_g <= stop_below):
                break
            cands = []
            for i, j in pairs:
                d = min(h, v[j])
                if d > 0:
                    w = v.copy()
                    w[i] += d
                    w[j] -= d
                    cands.append(w)
            if not cands:
                break
            cands = np.array(cands)
            S = score_batch(rule, space, cands @ member)
            phis = _dual_value(cands, S, target)
            gs = _gap(S, target)
            k = int(np.argmin(gs))
            if gs[k] < best_g:
                best_v, best_g = cands[k], float(gs[k])
            k = int(np.argmax(phis))
            if phis[k] > phi:
                v, phi = cands[k], float(phis[k])
                h = min(2 * h, step)
            else:
                h /= 2
        if stop_below is not None and best_g <= stop_below:
            break
    return ProbabilityWeights(np.clip(best_v, 0.0, None))


@dataclass(frozen=True, eq=False)
class DominanceCertificate:
    p: ProbabilityWeights
    score_p: np.ndarray
    score_c: np.ndarray
    margins: np.ndarray
    lemma1: dict | None
    stage2: str
    infinite_worlds: tuple[int, ...]
    config: dict = field(default_factory=dict)

    status = "certificate"

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "p": self.p.v.tolist(),
            "score_p": self.score_p.tolist(),
            "score_c": self.score_c.tolist(),
            "margins": self.margins.tolist(),
            "infinite_worlds": list(self.infinite_worlds),
            "lemma1": self.lemma1,
            "stage2": self.stage2,
            "config": self.config,
        }


@dataclass(frozen=True, eq=False)
class AlreadyProbability:
    weights: ProbabilityWeights

    status = "already_probability"

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "weights": self.weights.v.tolist()}


@dataclass(frozen=True, eq=False)
class NotFound:
    """No dominator at this sampling resolution; not a disproof."""

    stage: str
    tstar: float
    normal: list
    best_margins: list
    diagnostics: dict = field(default_factory=dict)

    status = "not_found"

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "stage": self.stage,
            "tstar": self.tstar,
            "normal": self.normal,
            "best_margins": self.best_margins,
            "diagnostics": self.diagnostics,
        }


def _best_sample_margins(D: SampledScoreSet, z: np.ndarray) -> list:
    margins = extended_margins(z[None, :], D.scores)
    k = int(np.argmax(margins.min(axis=1)))
    return margins[k].tolist()


def _price_column(rule, space, finite, mu, cfg):
    """Score point of the probability that the dual direction ``mu`` prefers.

    By strict propriety the score of p_v minimizes <s(q), v> over all
    probabilities q, so p_mu gives the deepest cut below the supporting
    hyperplane. Zero weights are mixed toward the barycenter just enough to
    keep the score finite.
    """
    v = np.zeros(space.n)
    v[finite] = np.clip(mu, 0.0, None)
    if not v.sum() > 0:
        return None
    v = v / v.sum()
    for mix in (0.0, 1e-12, 1e-9, 1e-6, cfg.interior_mix):
        w = (1.0 - mix) * v + mix / space.n
        s = score_batch(rule, space, w @ space.membership().T.astype(float))[0]
        if np.all(np.isfinite(s)):
            return w, s[finite]
    return None


def find_with_samples(rule, space: OutcomeSpace, c: CredenceFunction, D: SampledScoreSet, cfg: FinderConfig):
    """Run the finder against an already sampled score set."""
    rule = as_rule(rule)
    ok, _ = is_probability(space, c, cfg.prob_tol)
    if ok:
        return AlreadyProbability(ProbabilityWeights(np.clip(singleton_weights(c), 0.0, None), cfg.prob_tol * space.n + 1e-12))

    z = score(rule, space, c).entries
    infinite = tuple(int(i) for i in np.flatnonzero(np.isinf(z)))
    finite = np.flatnonzero(np.isfinite(z))
    config = cfg.to_dict() | {"rule": rule.to_dict(), "n_samples": len(D)}

    def certify(v, lemma1, stage2):
        margins, dominated = verify_domination(rule, space, v, c)
        if not dominated:
            return None
        p = as_weights(v)
        return DominanceCertificate(
            p, _score_weights(rule, space, p.v), z, margins, lemma1, stage2, infinite, config
        )

    if finite.size == 0:
        bary = np.full(space.n, 1.0 / space.n)
        k = int(np.argmin(np.abs(D.weights - bary).sum(axis=1)))
        cert = certify(D.weights[k], None, "sample_hit")
        if cert is not None:
            return cert
        return NotFound("lemma2", -math.inf, [], _best_sample_margins(D, z))

    weights = [w for w in D.weights]
    pts = D.scores[:, finite]
    zf = z[finite]
    sol = solve_improvement_lp(pts, zf)
    columns = []
    for _ in range(cfg.column_iters):
        if sol.tstar <= -cfg.epsilon:
            break
        col = _price_column(rule, space, finite, -sol.normal, cfg)
        if col is None:
            break
        w, d = col
        # a column that does not undercut the current support value cannot help
        if np.dot(d, sol.normal) <= support_function(pts, sol.normal) + 1e-15:
            break
        weights.append(w)
        columns.append(w.tolist())
        pts = np.vstack([pts, d])
        sol = solve_improvement_lp(pts, zf)
    diag = {
        "support_value": support_function(pts, sol.normal),
        "z_dot_normal": float(np.dot(zf, sol.normal)),
        "finite_worlds": finite.tolist(),
        "columns": len(columns),
    }
    if sol.tstar > -cfg.epsilon:
        return NotFound("lemma1", sol.tstar, sol.normal.tolist(), _best_sample_margins(D, z), diag)

    zprime = np.full(space.n, math.inf)
    zprime[finite] = sol.zprime
    support = sol.support[np.argsort(-sol.lam[sol.support], kind="stable")]
    lemma1 = {
        "zprime": zprime.tolist(),
        "tstar": sol.tstar,
        "lambda": {int(k): float(sol.lam[k]) for k in support},
        "columns": columns,
    }

    idx = farthest_point_descent(pts, sol.zprime, cfg.refine_tol)
    if idx is not None:
        cert = certify(weights[idx], lemma1, "sample_hit")
        if cert is not None:
            return cert
    seeds = [weights[k] for k in support]
    v = refine_local(rule, space, zprime, seeds, cfg, stop_below=cfg.refine_tol)
    cert = certify(v.v, lemma1, "refined")
    if cert is not None:
        return cert
    margins, _ = verify_domination(rule, space, v, c)
    diag["refined_p"] = v.v.tolist()
    return NotFound("lemma2", sol.tstar, sol.normal.tolist(), margins.tolist(), diag)


def find_dominating_probability(rule, space: OutcomeSpace, c: CredenceFunction, cfg: FinderConfig | None = None):
    """Certificate of a probability strictly dominating ``c``, if one is found.

    Returns a :class:`DominanceCertificate`, :class:`AlreadyProbability` when
    ``c`` is itself a probability, or :class:`NotFound` with the dual
    separating normal when the sampled hull admits no strict improvement.
    """
    cfg = cfg or FinderConfig()
    if c.n != space.n:
        raise ValueError(f"credence has dimension {c.n}, outcome space has {space.n}")
    ok, _ = is_probability(space, c, cfg.prob_tol)
    if ok:
        return find_with_samples(rule, space, c, None, cfg)
    score(rule, space, c)  # surface DomainError before sampling
    D = sample_score_set(rule, space, cfg)
    return find_with_samples(rule, space, c, D, cfg)
