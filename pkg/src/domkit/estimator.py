"""Estimator-style front end to the dominance finder."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import CredenceFunction
from .dominance import FinderConfig, find_with_samples, sample_score_set
from .scoring import as_rule
from .validation import check_credences, check_space, n_outcomes


class DominanceFinder(TransformerMixin, BaseEstimator):
    """Map credence functions to probabilities whose scores strictly dominate them.

    ``fit`` samples the finite scores of probabilities under ``rule`` for the
    outcome space implied by the width of ``X`` (2**n columns, one per event
    mask). ``transform`` returns, per row, the weights of a dominating
    probability, or NaN when the row is already a probability or no dominator
    was found at this sampling resolution; ``certify`` returns the full result
    objects.

    Parameters
    ----------
    rule : str, dict or ScoringRule
        Scoring rule, e.g. ``"brier"`` or ``{"kind": "weighted_brier", ...}``.
    outcomes : sequence of str, optional
        Outcome labels; defaults to ``w1 .. wn``.
    grid_m : int, optional
        Simplex grid resolution; chosen from n when omitted.
    n_jobs : int, optional
        Threads used by ``certify``; 0 means one per CPU.

    Examples
    --------
    >>> finder = DominanceFinder(rule="brier").fit([[0.0, 0.6, 0.7, 1.0]])
    >>> finder.transform([[0.0, 0.6, 0.7, 1.0]]).shape
    (1, 2)
    """

    def __init__(
        self,
        rule="brier",
        outcomes=None,
        grid_m=None,
        random_samples=200,
        seed=0,
        epsilon=1e-6,
        refine_iters=500,
        refine_tol=1e-7,
        interior_mix=1e-3,
        prob_tol=1e-9,
        column_iters=50,
        n_jobs=None,
    ):
        self.rule = rule
        self.outcomes = outcomes
        self.grid_m = grid_m
        self.random_samples = random_samples
        self.seed = seed
        self.epsilon = epsilon
        self.refine_iters = refine_iters
        self.refine_tol = refine_tol
        self.interior_mix = interior_mix
        self.prob_tol = prob_tol
        self.column_iters = column_iters
        self.n_jobs = n_jobs

    def _config(self) -> FinderConfig:
        return FinderConfig(
            grid_m=self.grid_m,
            random_samples=self.random_samples,
            seed=self.seed,
            epsilon=self.epsilon,
            refine_iters=self.refine_iters,
            refine_tol=self.refine_tol,
            interior_mix=self.interior_mix,
            prob_tol=self.prob_tol,
            column_iters=self.column_iters,
        )

    def fit(self, X, y=None):
        X = check_credences(X)
        self.space_ = check_space(self.outcomes, n_outcomes(X))
        self.rule_ = as_rule(self.rule)
        self.config_ = self._config()
        self.score_set_ = sample_score_set(self.rule_, self.space_, self.config_)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_input(self, X) -> np.ndarray:
        check_is_fitted(self, "score_set_")
        X = check_credences(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, the finder was fit with {self.n_features_in_}")
        return X

    def certify(self, X) -> list:
        """Finder result for every row of ``X``, in row order."""
        X = self._check_input(X)

        def run(row):
            return find_with_samples(self.rule_, self.space_, CredenceFunction(row), self.score_set_, self.config_)

        workers = self.n_jobs
        if workers == 0:
            workers = os.cpu_count() or 1
        if not workers or workers == 1 or len(X) < 2:
            return [run(row) for row in X]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, X))

    def transform(self, X) -> np.ndarray:
        results = self.certify(X)
        out = np.full((len(results), self.space_.n), np.nan)
        for k, res in enumerate(results):
            if res.status == "certificate":
                out[k] = res.p.v
        return out

    def predict(self, X) -> np.ndarray:
        """Result status per row: certificate, already_probability or not_found."""
        return np.array([res.status for res in self.certify(X)])
