"""Grids and random draws on the probability simplex."""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np


def compositions(n: int, m: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``n`` summing to ``m``.

    Rows come in a fixed order (stars and bars over sorted bar positions).
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rows = []
    for bars in combinations(range(m + n - 1), n - 1):
        edges = (-1,) + bars + (m + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def grid_points(n: int, m: int) -> np.ndarray:
    return compositions(n, m) / float(m) if m > 0 else np.full((1, n), 1.0 / n)


def grid_size(n: int, m: int) -> int:
    return comb(m + n - 1, n - 1)


def mix_toward_barycenter(points: np.ndarray, weight: float, boundary_only: bool = True) -> np.ndarray:
    """Shift points off the boundary by mixing with the barycenter."""
    points = np.asarray(points, dtype=float)
    if weight <= 0:
        return points.copy()
    n = points.shape[1]
    mixed = (1.0 - weight) * points + weight / n
    if not boundary_only:
        return mixed
    on_boundary = np.any(points == 0, axis=1)
    return np.where(on_boundary[:, None], mixed, points)


def dirichlet(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    if size <= 0:
        return np.empty((0, n))
    return rng.dirichlet(np.ones(n), size=size)


def auto_grid(n: int, budget: int = 1500, cap: int = 100) -> int:
    """Finest resolution whose grid stays within ``budget`` points."""
    if n == 1:
        return 1
    m = 1
    while m < cap and grid_size(n, m + 1) <= budget:
        m += 1
    return m


def unique_rows(points: np.ndarray) -> np.ndarray:
    """Drop repeated rows, keeping first occurrences in order."""
    _, first = np.unique(points, axis=0, return_index=True)
    return points[np.sort(first)]
