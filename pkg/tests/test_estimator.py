import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from domkit import DominanceFinder, OutcomeSpace, ProbabilityWeights, credence_from_weights
from domkit.dominance import verify_domination
from domkit.core import CredenceFunction

ROWS = np.array([[0.0, 0.6, 0.7, 1.0], [0.0, 0.3, 0.7, 1.0], [0.0, 0.1, 0.2, 0.9]])


def test_params_round_trip():
    finder = DominanceFinder(rule="log", grid_m=30, seed=4)
    params = finder.get_params()
    assert params["rule"] == "log" and params["grid_m"] == 30 and params["seed"] == 4
    twin = clone(finder)
    assert twin.get_params() == params
    twin.set_params(epsilon=1e-5)
    assert twin.epsilon == 1e-5 and finder.epsilon == 1e-6


def test_transform_and_predict():
    finder = DominanceFinder(rule="brier").fit(ROWS)
    assert finder.n_features_in_ == 4
    status = finder.predict(ROWS)
    assert status.tolist() == ["certificate", "already_probability", "certificate"]
    P = finder.transform(ROWS)
    assert np.isnan(P[1]).all()
    space = OutcomeSpace.of_size(2)
    for k in (0, 2):
        assert verify_domination("brier", space, ProbabilityWeights(P[k]), CredenceFunction(ROWS[k])).dominated


def test_threads_match_serial():
    serial = DominanceFinder(rule="spherical").fit(ROWS).transform(ROWS)
    threaded = DominanceFinder(rule="spherical", n_jobs=2).fit(ROWS).transform(ROWS)
    np.testing.assert_array_equal(serial, threaded)


def test_fit_once_certify_many():
    space = OutcomeSpace.of_size(3)
    rng = np.random.default_rng(0)
    X = np.array([credence_from_weights(space, ProbabilityWeights(rng.dirichlet(np.ones(3)))).values for _ in range(5)])
    X = X + rng.normal(0, 0.1, X.shape)
    finder = DominanceFinder(rule={"kind": "weighted_brier", "weights": {"w1": 2.0}}).fit(X[:1])
    assert len(finder.certify(X)) == 5


def test_errors():
    with pytest.raises(NotFittedError):
        DominanceFinder().transform(ROWS)
    finder = DominanceFinder().fit(ROWS)
    with pytest.raises(ValueError):
        finder.transform(np.zeros((1, 8)))
    with pytest.raises(ValueError):
        DominanceFinder(outcomes=["a", "b", "c"]).fit(ROWS)
    with pytest.raises(ValueError):
        DominanceFinder(rule="cubic").fit(ROWS)


def test_in_pipeline():
    pipe = make_pipeline(FunctionTransformer(lambda X: np.clip(X, -1, 2)), DominanceFinder(rule="brier"))
    out = pipe.fit_transform(ROWS)
    assert out.shape == (3, 2)


def test_docstring_example():
    import doctest

    import domkit.estimator

    result = doctest.testmod(domkit.estimator)
    assert result.attempted > 0 and result.failed == 0
