"""Extended inner products, half-spaces, support functions and hull LPs."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog


class IndeterminateForm(ArithmeticError):
    """An extended sum contains both +inf and -inf terms."""


class SolverError(RuntimeError):
    pass


def extended_inner_product(a, b) -> float:
    """Inner product on (-inf, inf]^n that skips coordinates where either factor is 0.

    Agrees with the usual dot product on finite vectors. A +inf coordinate
    paired with a positive (negative) partner contributes +inf (-inf).
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if np.any(np.isneginf(a)) or np.any(np.isneginf(b)):
        raise ValueError("-inf is not a valid coordinate")
    live = (a != 0) & (b != 0)
    a, b = a[live], b[live]
    infinite = np.isinf(a) | np.isinf(b)
    signs = np.sign(a[infinite]) * np.sign(b[infinite])
    pos, neg = bool(np.any(signs > 0)), bool(np.any(signs < 0))
    if pos and neg:
        raise IndeterminateForm("extended inner product has both +inf and -inf terms")
    if pos:
        return math.inf
    if neg:
        return -math.inf
    return math.fsum(a * b)


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Closed half-space {z : <z, normal> <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float).reshape(-1)
        if not np.all(np.isfinite(normal)) or not np.linalg.norm(normal) > 0:
            raise ValueError("half-space normal must be a nonzero finite vector")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, z, open: bool = False) -> bool:
        return extension_contains(self, z, open=open)


def extension_contains(H: HalfSpace, z, open: bool = False) -> bool:
    """Membership of an extended point in the extension of ``H`` (or of its interior).

    The extension is {z : <z, v> <= sup_{w in H} <w, v>} where the sup is the
    offset; for finite ``z`` this is ordinary half-space membership.
    """
    value = extended_inner_product(z, H.normal)
    return value < H.offset if open else value <= H.offset


@dataclass(frozen=True, eq=False)
class SampledScoreSet:
    """Finite sample of the finite scores of probabilities.

    Row ``k`` pairs simplex weights ``weights[k]`` with the score point
    ``scores[k]``.
    """

    weights: np.ndarray
    scores: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=2)
        s = np.array(self.scores, dtype=float, ndmin=2)
        if w.shape != s.shape or w.shape[0] == 0:
            raise ValueError(f"weights {w.shape} and scores {s.shape} must be equal nonempty (k, n) arrays")
        if not np.all(np.isfinite(s)):
            raise ValueError("sampled scores must be finite")
        if len(np.unique(w, axis=0)) != len(w):
            raise ValueError("duplicate weight rows in sampled score set")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scores", s)

    def __len__(self):
        return self.scores.shape[0]

    @property
    def n(self) -> int:
        return self.scores.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = self.weights.shape[1]
        writer.writerow([f"v_{i + 1}" for i in range(n)] + [f"s_{i + 1}" for i in range(self.n)])
        for w, s in zip(self.weights, self.scores):
            writer.writerow([format(x, ".17g") for x in w] + [format(x, ".17g") for x in s])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledScoreSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty CSV")
        header = rows[0]
        n = sum(1 for h in header if h.startswith("v_"))
        if header != [f"v_{i + 1}" for i in range(n)] + [f"s_{i + 1}" for i in range(n)]:
            raise ValueError(f"unexpected CSV header {header}")
        data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float)
        return cls(data[:, :n], data[:, n:])


def _points(D) -> np.ndarray:
    pts = D.scores if isinstance(D, SampledScoreSet) else np.array(D, dtype=float, ndmin=2)
    if pts.shape[0] == 0:
        raise ValueError("point set is empty")
    return pts


def support_function(D, v) -> float:
    """sup over the sample of <d, v>."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if not np.any(v != 0):
        raise ValueError("support function needs a nonzero direction")
    pts = _points(D)
    if pts.shape[1] != v.size:
        raise ValueError(f"dimension mismatch: points are {pts.shape[1]}-d, direction is {v.size}-d")
    return float(np.max(pts @ v))


@dataclass(frozen=True, eq=False)
class ImprovementLP:
    """Solution of min t s.t. sum_k lam_k d_k - z <= t, lam in the simplex.

    ``normal`` is the dual separating direction: nonpositive, summing to -1,
    with support_function(D, normal) == <z, normal> - tstar.
    """

    tstar: float
    lam: np.ndarray
    zprime: np.ndarray
    normal: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.lam > 0)


def solve_improvement_lp(D, z) -> ImprovementLP:
    pts = _points(D)
    z = np.asarray(z, dtype=float).reshape(-1)
    k, n = pts.shape
    if z.size != n or not np.all(np.isfinite(z)):
        raise ValueError("z must be a finite vector matching the point dimension")
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.hstack([pts.T, -np.ones((n, 1))])
    A_eq = np.ones((1, k + 1))
    A_eq[0, -1] = 0.0
    bounds = [(0, None)] * k + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=z, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"improvement LP failed: {res.message}")
    lam = np.clip(res.x[:k], 0.0, None)
    lam = lam / math.fsum(lam)
    zprime = lam @ pts
    tstar = float(np.max(zprime - z))
    normal = np.minimum(np.asarray(res.ineqlin.marginals, dtype=float), 0.0)
    total = -math.fsum(normal)
    normal = normal / total if total > 0 else -np.full(n, 1.0 / n)
    return ImprovementLP(tstar, lam, zprime, normal)


def lp_strict_improvement(D, z, epsilon: float = 1e-6) -> ImprovementLP | None:
    """Point of the hull of ``D`` strictly below ``z`` in every coordinate.

    Returns the LP solution when its optimum is at most ``-epsilon``, else None.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    sol = solve_improvement_lp(D, z)
    return sol if sol.tstar <= -epsilon else None


def farthest_point_descent(D, zprime, tol: float = 0.0) -> int | None:
    """Index of the sample point below ``zprime + tol`` farthest from ``zprime``.

    Ties go to the lowest index; None when no point qualifies.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    pts = _points(D)
    zprime = np.asarray(zprime, dtype=float).reshape(-1)
    below = np.all(pts <= zprime + tol, axis=1)
    if not np.any(below):
        return None
    dist = np.where(below, np.sum((pts - zprime) ** 2, axis=1), -np.inf)
    return int(np.argmax(dist))


def hull_distance(D, x) -> tuple[float, np.ndarray]:
    """Smallest sup-norm distance from ``x`` to the hull of ``D`` and the weights achieving it."""
    pts = _points(D)
    x = np.asarray(x, dtype=float).reshape(-1)
    k, n = pts.shape
    # variables (lam, s): min s, -s <= lam @ pts - x <= s
    c = np.zeros(k + 1)
    c[-1] = 1.0
    ones = np.ones((n, 1))
    A_ub = np.vstack([np.hstack([pts.T, -ones]), np.hstack([-pts.T, -ones])])
    b_ub = np.concatenate([x, -x])
    A_eq = np.ones((1, k + 1))
    A_eq[0, -1] = 0.0
    bounds = [(0, None)] * k + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"hull membership LP failed: {res.message}")
    lam = np.clip(res.x[:k], 0.0, None)
    lam = lam / math.fsum(lam)
    return float(np.max(np.abs(lam @ pts - x))), lam


def conv_membership(D, x, tol: float = 1e-9) -> bool:
    """Whether ``x`` lies within sup-norm ``tol`` of the convex hull of ``D``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    dist, _ = hull_distance(D, x)
    return dist <= tol

