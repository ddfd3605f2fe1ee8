import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from domkit import CredenceFunction, OutcomeSpace, ProbabilityWeights, credence_from_weights
from domkit.geometry import solve_improvement_lp
from domkit.oracle import OracleConfig, oracle_dominator, oracle_expected_minimizer, oracle_lp_check
from domkit.scoring import expected_score, score


def lp_grid_python(points, z, G):
    """Same enumeration as the compiled oracle, written out in Python."""
    K = len(points)
    best = np.inf
    for head in itertools.product(range(G + 1), repeat=K - 1):
        rest = G - sum(head)
        if rest < 0:
            continue
        lam = np.array(head + (rest,)) / G
        best = min(best, float(np.max(lam @ points - z)))
    return best


class TestDominator:
    def test_hand_instance(self, two, incoherent):
        res = oracle_dominator("brier", two, incoherent, OracleConfig(simplex_grid=20))
        np.testing.assert_allclose(res.p, [0.45, 0.55])
        assert res.min_margin == pytest.approx(0.045, abs=1e-12)

    @pytest.mark.parametrize("rule", ["brier", "log", "spherical"])
    def test_probability_is_undominated(self, rule, two):
        c = credence_from_weights(two, ProbabilityWeights([0.3, 0.7]))
        assert oracle_dominator(rule, two, c, OracleConfig(simplex_grid=30)).min_margin <= 0

    def test_monotone_in_nested_grids(self, three):
        c = CredenceFunction([0.0, 0.5, 0.1, 0.5, 0.4, 0.9, 0.7, 1.1])
        margins = [oracle_dominator("brier", three, c, OracleConfig(simplex_grid=m)).min_margin for m in (1, 2, 4, 8, 16)]
        assert margins == sorted(margins)

    def test_vertices_only(self, two, incoherent):
        res = oracle_dominator("brier", two, incoherent, OracleConfig(simplex_grid=1))
        assert res.p.tolist() in ([1.0, 0.0], [0.0, 1.0])
        assert res.min_margin < 0

    def test_log_instance(self, two, log_instance):
        res = oracle_dominator("log", two, log_instance, OracleConfig(simplex_grid=100))
        np.testing.assert_allclose(res.p, [0.01, 0.99])
        assert res.margins[0] == np.inf
        assert res.min_margin == pytest.approx(np.log(2) + 2 * np.log(0.99), abs=1e-12)


class TestMinimizer:
    def test_brier_symmetric(self, two):
        res = oracle_expected_minimizer("brier", two, ProbabilityWeights([0.5, 0.5]), OracleConfig(credence_grid=0.05))
        np.testing.assert_allclose(res.credence, [0.0, 0.5, 0.5, 1.0])

    def test_linear_goes_extreme(self, two):
        res = oracle_expected_minimizer("linear", two, ProbabilityWeights([0.6, 0.4]), OracleConfig(credence_grid=0.05))
        assert res.credence[1] == 1.0

    @pytest.mark.parametrize("rule", ["brier", "log", "spherical"])
    def test_own_credence_is_optimal(self, rule, two):
        v = ProbabilityWeights([0.25, 0.75])
        res = oracle_expected_minimizer(rule, two, v, OracleConfig(credence_grid=0.05))
        own = expected_score(v, score(rule, two, credence_from_weights(two, v)))
        assert res.expected <= own + 1e-12
        np.testing.assert_allclose(res.credence, [0.0, 0.25, 0.75, 1.0])

    def test_limits(self, three):
        with pytest.raises(ValueError):
            oracle_expected_minimizer("brier", OutcomeSpace.of_size(4), ProbabilityWeights([0.25] * 4))
        with pytest.raises(ValueError, match="grid"):
            oracle_expected_minimizer("brier", three, ProbabilityWeights([1 / 3] * 3))

    def test_config(self):
        assert OracleConfig(credence_grid=0.25).credence_values().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
        with pytest.raises(ValueError):
            OracleConfig(simplex_grid=0)
        with pytest.raises(ValueError):
            OracleConfig(value_range=(1.0, 0.0))


class TestLPCheck:
    def test_hand_instance(self):
        assert oracle_lp_check([(0, 1), (1, 0)], (0.8, 0.9), 1000) == pytest.approx(-0.35, abs=1e-3)

    def test_single_point_exact(self):
        assert oracle_lp_check([(0.3, 0.7, 0.1)], (0.5, 0.5, 0.5), 7) == pytest.approx(0.2, abs=1e-15)

    def test_far_below(self):
        z = (-5.0, -5.0)
        assert oracle_lp_check([(0, 1), (1, 0), (0.4, 0.4)], z, 50) > 0
        assert solve_improvement_lp([(0, 1), (1, 0), (0.4, 0.4)], z).tstar > 0

    def test_limits(self):
        with pytest.raises(ValueError):
            oracle_lp_check(np.zeros((5, 2)), (0, 0))
        with pytest.raises(ValueError):
            oracle_lp_check(np.zeros((2, 2)), (0, 0, 0))
        with pytest.raises(ValueError):
            oracle_lp_check(np.zeros((2, 2)), (0, 0), 0)

    @settings(max_examples=40)
    @given(st.integers(1, 4), st.integers(1, 3), st.data())
    def test_matches_python_enumeration(self, k, n, data):
        pts = data.draw(arrays(float, (k, n), elements=st.floats(0, 1)))
        z = data.draw(arrays(float, n, elements=st.floats(-1, 1)))
        G = 12
        assert oracle_lp_check(pts, z, G) == pytest.approx(lp_grid_python(pts, z, G), abs=1e-12)

    @settings(max_examples=40)
    @given(st.integers(1, 4), st.integers(1, 4), st.data())
    def test_within_two_over_grid_of_lp(self, k, n, data):
        pts = data.draw(arrays(float, (k, n), elements=st.floats(0, 1)))
        z = data.draw(arrays(float, n, elements=st.floats(-1, 1)))
        G = 60
        assert abs(oracle_lp_check(pts, z, G) - solve_improvement_lp(pts, z).tstar) <= 2 / G
