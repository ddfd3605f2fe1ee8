"""Falsification audits for the hypotheses behind the domination theorem.

Each audit samples the relevant universally quantified statement and
reports ``falsified`` with a witness on the first counterexample. A
``passed`` verdict only means no counterexample was found at the configured
density.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .core import OutcomeSpace, arctan_distance
from .scoring import as_rule, expected_scores, score_batch
from .simplex import compositions, dirichlet, grid_points, mix_toward_barycenter, unique_rows

PASSED, FALSIFIED, INCONCLUSIVE = "passed", "falsified", "inconclusive"
STRICT_TOL = 1e-12
# perturbation sizes for the topology audits, down to the smallest normal doubles
LEVELS = (1e-1, 1e-2, 1e-4, 1e-8, 1e-16, 1e-32, 1e-64, 1e-128, 1e-256, 1e-300)
NOTE = "falsification audit: passed means no counterexample at this sampling density, not a proof"


@dataclass(frozen=True)
class AuditConfig:
    interior_grid: int | None = None
    random_trials: int = 200
    seed: int = 0
    perturbation_scale: float = 1e-3
    metric_tol: float = 1e-3

    def __post_init__(self):
        if self.interior_grid is not None and self.interior_grid < 2:
            raise ValueError("interior_grid must be at least 2")
        if self.random_trials < 1:
            raise ValueError("random_trials must be at least 1")
        if not self.perturbation_scale > 0 or not self.metric_tol > 0:
            raise ValueError("perturbation_scale and metric_tol must be positive")

    def resolved_grid(self, n: int) -> int:
        if self.interior_grid is not None:
            return self.interior_grid
        if n <= 3:
            return 20
        if n <= 6:
            return 8
        return 4

    @property
    def min_separation(self) -> float:
        # challengers closer than this to p are numerically indistinguishable ties
        return self.perturbation_scale / 10


@dataclass(frozen=True)
class AuditReport:
    audit: str
    verdict: str
    trials: int
    witness: dict | None = None
    worst_margin: float | None = None
    statistics: dict = field(default_factory=dict)
    note: str = NOTE

    def __post_init__(self):
        if (self.witness is not None) != (self.verdict == FALSIFIED):
            raise ValueError("a witness is present exactly when the verdict is falsified")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _rng(cfg: AuditConfig, *stream: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, *stream])


def _member(space: OutcomeSpace) -> np.ndarray:
    return space.membership().T.astype(float)


def _interior_points(space: OutcomeSpace, cfg: AuditConfig) -> np.ndarray:
    """Grid shifted off the boundary, followed by per-index seeded random points."""
    n = space.n
    grid = mix_toward_barycenter(grid_points(n, cfg.resolved_grid(n)), 1e-3)
    extra = [dirichlet(_rng(cfg, 1, j), n, 1)[0] for j in range(cfg.random_trials)]
    return unique_rows(np.vstack([grid] + extra) if extra else grid)


def _challengers(rng, p_cred: np.ndarray, space: OutcomeSpace, cfg: AuditConfig) -> np.ndarray:
    size = p_cred.size
    rand_unit = rng.uniform(0.0, 1.0, (2, size))
    rand_wide = rng.uniform(-0.5, 1.5, (2, size))
    probs = dirichlet(rng, space.n, 4) @ _member(space)
    perturbed = p_cred + rng.normal(0.0, cfg.perturbation_scale, (4, size))
    extreme = np.round(p_cred)[None]
    return np.vstack([rand_unit, rand_wide, probs, perturbed, extreme])


def check_strict_propriety(rule, space: OutcomeSpace, cfg: AuditConfig | None = None) -> AuditReport:
    """Look for a credence c != p with E_p s(c) <= E_p s(p) at sampled interior p."""
    cfg = cfg or AuditConfig()
    rule = as_rule(rule)
    member = _member(space)
    points = _interior_points(space, cfg)
    witness, worst, compared = None, math.inf, 0
    for t, v in enumerate(points):
        p_cred = v @ member
        chal = _challengers(_rng(cfg, 2, t), p_cred, space, cfg)
        chal = chal[np.max(np.abs(chal - p_cred), axis=1) >= cfg.min_separation]
        if len(chal) == 0:
            continue
        own = expected_scores(v, score_batch(rule, space, p_cred[None]))[0]
        other = expected_scores(v, score_batch(rule, space, chal))
        with np.errstate(invalid="ignore"):
            margins = other - own
        margins = np.where(np.isnan(margins), -np.inf, margins)
        compared += len(chal)
        worst = min(worst, float(margins.min()))
        bad = np.flatnonzero(margins <= STRICT_TOL)
        if witness is None and bad.size:
            k = int(bad[np.argmin(margins[bad])])
            witness = {
                "p": v.tolist(),
                "c": chal[k].tolist(),
                "expected_p": float(own),
                "expected_c": float(other[k]),
            }
    if compared == 0:
        return AuditReport("strict_propriety", INCONCLUSIVE, len(points), statistics={"compared": 0})
    verdict = FALSIFIED if witness else PASSED
    return AuditReport(
        "strict_propriety", verdict, len(points), witness, worst, {"compared": compared}
    )


def check_support_uniqueness(rule, space: OutcomeSpace, cfg: AuditConfig | None = None) -> AuditReport:
    """Check <s*(v), v> < <s*(v'), v> for sampled interior v and every other sampled v'."""
    cfg = cfg or AuditConfig()
    rule = as_rule(rule)
    points = _interior_points(space, cfg)
    scores = score_batch(rule, space, points @ _member(space))
    k = len(points)
    if k < 2:
        return AuditReport("support_uniqueness", INCONCLUSIVE, 0, statistics={"points": k})
    # values[i, j] = <s*(v_j), v_i>; interior v has no zero weights
    with np.errstate(invalid="ignore"):
        values = points @ scores.T
        margins = values - np.diag(values)[:, None]
    margins = np.where(np.isnan(margins), -np.inf, margins)
    far = np.max(np.abs(points[:, None, :] - points[None, :, :]), axis=2) >= cfg.min_separation
    compared = int(far.sum())
    if compared == 0:
        return AuditReport("support_uniqueness", INCONCLUSIVE, 0, statistics={"points": k})
    masked = np.where(far, margins, np.inf)
    worst = float(masked.min())
    bad = np.argwhere(masked <= STRICT_TOL)
    witness = None
    if bad.size:
        i, j = (int(x) for x in bad[0])
        witness = {
            "v": points[i].tolist(),
            "v_other": points[j].tolist(),
            "self_value": float(values[i, i]),
            "other_value": float(values[i, j]),
        }
    verdict = FALSIFIED if witness else PASSED
    return AuditReport("support_uniqueness", verdict, compared, witness, worst, {"points": k})


def _directions(space: OutcomeSpace, rng, extra: int = 3) -> np.ndarray:
    n = space.n
    return np.vstack([np.eye(n), np.full((1, n), 1.0 / n), dirichlet(rng, n, extra)])


def _approach(rule, space, anchor, targets, member):
    """Arctan distances from s(p_anchor) along (1 - t) anchor + t w for each level t.

    Returns ``dist[level, k]`` with NaN where the moved point rounds back to
    the anchor.
    """
    base = score_batch(rule, space, (anchor @ member)[None])[0]
    dist = np.full((len(LEVELS), len(targets)), np.nan)
    for li, delta in enumerate(LEVELS):
        t = delta / 2
        moved = (1.0 - t) * anchor[None] + t * targets
        scores = score_batch(rule, space, moved @ member)
        for k in range(len(targets)):
            if not np.array_equal(moved[k], anchor):
                dist[li, k] = arctan_distance(scores[k], base)
    return dist


def _finest(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per column: index of the finest informative level and its distance."""
    level = np.full(dist.shape[1], -1)
    value = np.full(dist.shape[1], np.nan)
    for k in range(dist.shape[1]):
        ok = np.flatnonzero(~np.isnan(dist[:, k]))
        if ok.size:
            level[k] = ok[-1]
            value[k] = dist[ok[-1], k]
    return level, value


def check_continuity_on_probabilities(rule, space: OutcomeSpace, cfg: AuditConfig | None = None) -> AuditReport:
    """Estimate the modulus of continuity of v -> s(p_v) under the arctan metric.

    Anchors are the raw grid (boundary included) and random points; each is
    approached along several directions with L1 step at most delta for a
    decreasing sequence of delta. A direction fails when its distance at the
    finest level that still moves the anchor exceeds ``metric_tol``.
    """
    cfg = cfg or AuditConfig()
    rule = as_rule(rule)
    n = space.n
    member = _member(space)
    anchors = unique_rows(
        np.vstack([grid_points(n, cfg.resolved_grid(n))] + [dirichlet(_rng(cfg, 1, j), n, 1) for j in range(cfg.random_trials)])
    )
    modulus = np.zeros(len(LEVELS))
    witness, worst, pairs = None, 0.0, 0
    for a, anchor in enumerate(anchors):
        targets = _directions(space, _rng(cfg, 3, a))
        dist = _approach(rule, space, anchor, targets, member)
        modulus = np.fmax(modulus, np.nan_to_num(np.nanmax(np.where(np.isnan(dist), -np.inf, dist), axis=1), neginf=0.0))
        level, value = _finest(dist)
        for k in np.flatnonzero(level >= 0):
            pairs += 1
            worst = max(worst, float(value[k]))
            if witness is None and value[k] > cfg.metric_tol:
                t = LEVELS[level[k]] / 2
                witness = {
                    "v": anchor.tolist(),
                    "v_other": ((1 - t) * anchor + t * targets[k]).tolist(),
                    "delta": LEVELS[level[k]],
                    "distance": float(value[k]),
                }
    stats = {"levels": list(LEVELS), "modulus": modulus.tolist(), "anchors": len(anchors)}
    if pairs == 0:
        return AuditReport("continuity", INCONCLUSIVE, 0, statistics=stats)
    verdict = FALSIFIED if witness else PASSED
    return AuditReport("continuity", verdict, pairs, witness, worst, stats)


def check_closure_condition(rule, space: OutcomeSpace, cfg: AuditConfig | None = None) -> AuditReport:
    """Scores of interior probabilities are finite and boundary scores are limits of them."""
    cfg = cfg or AuditConfig()
    rule = as_rule(rule)
    n = space.n
    member = _member(space)
    interior = _interior_points(space, cfg)
    scores = score_batch(rule, space, interior @ member)
    infinite = np.flatnonzero(~np.all(np.isfinite(scores), axis=1))
    stats: dict[str, Any] = {"interior_points": len(interior)}
    if infinite.size:
        k = int(infinite[0])
        witness = {"sub_audit": "interior_finiteness", "v": interior[k].tolist(), "score": scores[k].tolist()}
        return AuditReport("closure", FALSIFIED, len(interior), witness, None, stats)

    raw = compositions(n, cfg.resolved_grid(n)) / cfg.resolved_grid(n)
    boundary = raw[np.any(raw == 0, axis=1)]
    stats["boundary_points"] = len(boundary)
    witness, worst, sequences = None, 0.0, 0
    bary = np.full((1, n), 1.0 / n)
    for b, v in enumerate(boundary):
        starts = np.vstack([bary, dirichlet(_rng(cfg, 4, b), n, 3)])
        dist = _approach(rule, space, v, starts, member)
        final = dist[-1]
        sequences += len(starts)
        worst = max(worst, float(np.nanmax(final)))
        bad = np.flatnonzero(~(final <= cfg.metric_tol))
        if witness is None and bad.size:
            k = int(bad[0])
            witness = {
                "sub_audit": "boundary_approachability",
                "v": v.tolist(),
                "start": starts[k].tolist(),
                "t": LEVELS[-1] / 2,
                "distance": float(final[k]),
            }
    total = len(interior) + sequences
    verdict = FALSIFIED if witness else PASSED
    return AuditReport("closure", verdict, total, witness, worst, stats)


AUDITS = {
    "strict_propriety": check_strict_propriety,
    "support_uniqueness": check_support_uniqueness,
    "continuity": check_continuity_on_probabilities,
    "closure": check_closure_condition,
}


def run_all_audits(rule, space: OutcomeSpace, cfg: AuditConfig | None = None) -> list[AuditReport]:
    return [audit(rule, space, cfg) for audit in AUDITS.values()]


def combined_verdict(reports) -> str:
    verdicts = {r.verdict for r in reports}
    if FALSIFIED in verdicts:
        return FALSIFIED
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASSED
