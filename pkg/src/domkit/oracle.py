"""Brute-force reference computations for small instances.

Everything here is plain enumeration with no pruning, so each result can be
trusted by inspection and used to check the LP and search based code paths.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numba
import numpy as np

from .core import CredenceFunction, OutcomeSpace, ProbabilityWeights
from .scoring import as_rule, expected_scores, score, score_batch

MAX_CREDENCE_GRID = 5_000_000


@dataclass(frozen=True)
class OracleConfig:
    simplex_grid: int = 50
    credence_grid: float = 0.05
    value_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.simplex_grid < 1:
            raise ValueError("simplex_grid must be at least 1")
        if not self.credence_grid > 0:
            raise ValueError("credence_grid must be positive")
        lo, hi = self.value_range
        if not lo < hi:
            raise ValueError("value_range must be increasing")

    def credence_values(self) -> np.ndarray:
        lo, hi = self.value_range
        steps = int(round((hi - lo) / self.credence_grid))
        return np.array([lo + (hi - lo) * k / steps for k in range(steps + 1)])


def _all_compositions(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _all_compositions(n - 1, total - first):
            yield (first,) + rest


def _margins(score_c: np.ndarray, score_p: np.ndarray) -> np.ndarray:
    out = np.empty(score_p.shape)
    for idx in np.ndindex(score_p.shape):
        a, b = score_c[idx[-1]], score_p[idx]
        if math.isinf(b):
            out[idx] = -math.inf if not math.isinf(a) else math.nan
        else:
            out[idx] = a - b
    return out


@dataclass(frozen=True)
class OracleDominator:
    p: np.ndarray
    min_margin: float
    margins: np.ndarray


def oracle_dominator(rule, space: OutcomeSpace, c: CredenceFunction, cfg: OracleConfig | None = None) -> OracleDominator:
    """Best probability on the resolution-M simplex grid by smallest per-world margin."""
    cfg = cfg or OracleConfig()
    rule = as_rule(rule)
    M = cfg.simplex_grid
    grid = np.array(list(_all_compositions(space.n, M)), dtype=float) / M
    creds = np.array([[sum(v[i] for i in range(space.n) if mask >> i & 1) for mask in range(space.n_events)] for v in grid])
    sp = score_batch(rule, space, creds)
    sc = score(rule, space, c).entries
    margins = _margins(sc, sp)
    worst = np.where(np.isnan(margins), -np.inf, margins).min(axis=1)
    k = int(np.argmax(worst))
    return OracleDominator(grid[k], float(worst[k]), margins[k])


@dataclass(frozen=True)
class OracleMinimizer:
    credence: np.ndarray
    expected: float


def oracle_expected_minimizer(rule, space: OutcomeSpace, v: ProbabilityWeights, cfg: OracleConfig | None = None) -> OracleMinimizer:
    """Exhaustive argmin of E_v s(c) over credences whose every event value lies on the grid."""
    cfg = cfg or OracleConfig()
    if space.n > 3:
        raise ValueError("credence search is limited to n <= 3")
    rule = as_rule(rule)
    values = cfg.credence_values()
    total = len(values) ** space.n_events
    if total > MAX_CREDENCE_GRID:
        raise ValueError(f"credence grid has {total} points, limit is {MAX_CREDENCE_GRID}")
    best_c, best_e = None, math.inf
    chunk = []

    def flush():
        nonlocal best_c, best_e
        arr = np.array(chunk)
        e = expected_scores(v, score_batch(rule, space, arr))
        k = int(np.argmin(e))
        if e[k] < best_e:
            best_c, best_e = arr[k], float(e[k])
        chunk.clear()

    for combo in itertools.product(values, repeat=space.n_events):
        chunk.append(combo)
        if len(chunk) == 20000:
            flush()
    if chunk:
        flush()
    return OracleMinimizer(best_c, best_e)


@numba.njit(cache=True)
def _enumerate_lambda(points, z, G):
    # min over lam on the resolution-G simplex grid of max_i (lam @ points - z)_i
    K, n = points.shape
    if K == 1:
        worst = -np.inf
        for i in range(n):
            worst = max(worst, points[0, i] - z[i])
        return worst
    best = np.inf
    # head = weights of the first K - 2 points plus a final slot r shared by the last two
    H = K - 1
    head = np.zeros(H, dtype=np.int64)
    head[H - 1] = G
    start = np.zeros(n)
    slope = np.zeros(n)
    for i in range(n):
        slope[i] = (points[K - 2, i] - points[K - 1, i]) / G
    while True:
        r = head[H - 1]
        for i in range(n):
            acc = r * points[K - 1, i]
            for k in range(H - 1):
                acc += head[k] * points[k, i]
            start[i] = acc / G - z[i]
        # along the last two slots each coordinate is affine in a
        for a in range(r + 1):
            worst = start[0] + a * slope[0]
            for i in range(1, n):
                val = start[i] + a * slope[i]
                if val > worst:
                    worst = val
            if worst < best:
                best = worst
        if H == 1 or head[0] == G:
            break
        # next composition of G into H slots in lexicographic order
        j = H - 2
        while j >= 0:
            rest = 0
            for k in range(j + 1, H):
                rest += head[k]
            if rest > 0:
                break
            j -= 1
        head[j] += 1
        rest = 0
        for k in range(j + 1, H):
            rest += head[k]
            head[k] = 0
        head[H - 1] = rest - 1
    return best


def oracle_lp_check(points, z, lambda_grid: int = 1000) -> float:
    """Grid approximation from above of min over convex weights of max_i (sum_k lam_k d_k - z)_i."""
    points = np.array(points, dtype=float, ndmin=2)
    z = np.asarray(z, dtype=float).reshape(-1)
    if points.shape[0] > 4:
        raise ValueError("oracle_lp_check handles at most 4 points")
    if points.shape[1] != z.size:
        raise ValueError("dimension mismatch")
    if lambda_grid < 1:
        raise ValueError("lambda_grid must be positive")
    return float(_enumerate_lambda(points, z, int(lambda_grid)))
