"""Input checks shared by the estimator and the functional API."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .core import MAX_OUTCOMES, OutcomeSpace


def check_credences(X) -> np.ndarray:
    """2-D float array of credence rows, one column per event mask.

    The width must be 2**n for some 1 <= n <= 12 and every entry finite.
    """
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    width = X.shape[1]
    if width < 2 or width & (width - 1):
        raise ValueError(f"credence rows need 2**n columns, got {width}")
    n = width.bit_length() - 1
    if n > MAX_OUTCOMES:
        raise ValueError(f"at most {MAX_OUTCOMES} outcomes are supported, got {n}")
    return X


def n_outcomes(X: np.ndarray) -> int:
    return X.shape[1].bit_length() - 1


def check_space(outcomes, n: int) -> OutcomeSpace:
    if outcomes is None:
        return OutcomeSpace.of_size(n)
    space = outcomes if isinstance(outcomes, OutcomeSpace) else OutcomeSpace(tuple(outcomes))
    if space.n != n:
        raise ValueError(f"{space.n} outcome labels given for credences over {n} outcomes")
    return space

