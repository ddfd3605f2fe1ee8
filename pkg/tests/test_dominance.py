import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from domkit import CredenceFunction, OutcomeSpace, ProbabilityWeights, credence_from_weights
from domkit.dominance import (
    AlreadyProbability,
    DominanceCertificate,
    FinderConfig,
    NotFound,
    find_dominating_probability,
    find_with_samples,
    refine_local,
    sample_score_set,
    verify_domination,
)
from domkit.geometry import conv_membership
from domkit.oracle import OracleConfig, oracle_dominator
from domkit.scoring import score
from helpers import noisy_probability

FAST = FinderConfig(grid_m=20, random_samples=20)


def score_of(rule, space, v):
    return score(rule, space, credence_from_weights(space, ProbabilityWeights(v))).entries


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"epsilon": 0.0}, {"refine_tol": 1e-6}, {"grid_m": 1}, {"random_samples": -1}, {"interior_mix": 1.0}],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            FinderConfig(**kwargs)

    def test_auto_grid(self):
        cfg = FinderConfig()
        assert [cfg.resolved_grid(n) for n in (2, 3, 4)] == [100, 53, 18]
        assert FinderConfig(grid_m=7).resolved_grid(4) == 7


class TestSampling:
    def test_brier_three_points(self, two):
        D = sample_score_set("brier", two, FinderConfig(grid_m=2, random_samples=0))
        np.testing.assert_allclose(D.weights, [[0.0005, 0.9995], [0.5, 0.5], [0.9995, 0.0005]], atol=1e-15)
        assert np.all(np.isfinite(D.scores)) and D.meta["dropped"] == 0

    def test_log_filters_pure_boundary(self, two):
        mixed = sample_score_set("log", two, FinderConfig(grid_m=2, random_samples=0))
        assert len(mixed) == 3
        pure = sample_score_set("log", two, FinderConfig(grid_m=2, random_samples=0, interior_mix=0.0))
        assert pure.weights.tolist() == [[0.5, 0.5]]
        assert pure.meta["dropped"] == 2

    def test_three_outcomes(self, three):
        D = sample_score_set("spherical", three, FinderConfig(grid_m=2, random_samples=5))
        assert len(D) == 6 + 5
        assert len(D.to_csv().splitlines()) == 1 + 11

    def test_scores_match_weights(self, three):
        D = sample_score_set("brier", three, FinderConfig(grid_m=4, random_samples=3, seed=3))
        for v, s in zip(D.weights, D.scores):
            np.testing.assert_allclose(s, score_of("brier", three, v), atol=1e-15)

    def test_seeded(self, two):
        a = sample_score_set("log", two, FinderConfig(grid_m=5, random_samples=10, seed=7))
        b = sample_score_set("log", two, FinderConfig(grid_m=5, random_samples=10, seed=7))
        assert a.to_csv() == b.to_csv()

    def test_single_outcome(self):
        D = sample_score_set("log", OutcomeSpace.of_size(1), FinderConfig(grid_m=2, random_samples=4))
        assert D.weights.tolist() == [[1.0]]
        assert D.scores.tolist() == [[0.0]]


class TestVerify:
    def test_hand_instance(self, two, incoherent):
        margins, ok = verify_domination("brier", two, ProbabilityWeights([0.45, 0.55]), incoherent)
        np.testing.assert_allclose(margins, [0.045, 0.045], atol=1e-9)
        assert ok

    def test_self_is_not_dominated(self, two):
        p = ProbabilityWeights([0.3, 0.7])
        margins, ok = verify_domination("brier", two, p, credence_from_weights(two, p))
        assert margins.tolist() == [0.0, 0.0] and not ok

    def test_infinite_world(self, two, log_instance):
        margins, ok = verify_domination("log", two, ProbabilityWeights([0.05, 0.95]), log_instance)
        assert margins[0] == math.inf and margins[1] > 0 and ok

    def test_infinite_against_infinite(self, two, log_instance):
        margins, ok = verify_domination("log", two, ProbabilityWeights([0.0, 1.0]), log_instance)
        assert math.isnan(margins[0]) and not ok


class TestFinder:
    def test_hand_instance(self, two, incoherent):
        cert = find_dominating_probability("brier", two, incoherent)
        assert isinstance(cert, DominanceCertificate)
        assert np.all(cert.margins >= 0.04)
        assert cert.stage2 in ("sample_hit", "refined")
        np.testing.assert_allclose(cert.score_c, [0.65, 0.45], atol=1e-12)

    def test_probability(self, two):
        c = credence_from_weights(two, ProbabilityWeights([0.3, 0.7]))
        res = find_dominating_probability("brier", two, c)
        assert isinstance(res, AlreadyProbability)
        np.testing.assert_allclose(res.weights.v, [0.3, 0.7])

    def test_log_infinite_world(self, two, log_instance):
        cert = find_dominating_probability("log", two, log_instance)
        assert isinstance(cert, DominanceCertificate)
        assert cert.infinite_worlds == (0,)
        assert cert.margins[0] == math.inf and cert.margins[1] > 0
        assert cert.lemma1["zprime"][0] == math.inf

    def test_every_world_infinite(self, two):
        c = CredenceFunction([0.0, 0.5, 0.5, 1.5])
        cert = find_dominating_probability("log", two, c, FAST)
        assert cert.lemma1 is None
        assert cert.infinite_worlds == (0, 1)
        assert np.all(np.isinf(cert.margins))

    def test_undersampled_reports_normal(self, three):
        rng = np.random.default_rng(11)
        c = noisy_probability(rng, three, 0.02)
        res = find_dominating_probability("brier", three, c, FinderConfig(grid_m=2, random_samples=0, column_iters=0))
        assert isinstance(res, NotFound)
        assert res.stage in ("lemma1", "lemma2")
        assert all(x <= 1e-9 for x in res.normal)
        assert set(res.to_dict()) == {"status", "stage", "tstar", "normal", "best_margins", "diagnostics"}

    def test_dimension_mismatch(self, three, incoherent):
        with pytest.raises(ValueError):
            find_dominating_probability("brier", three, incoherent)

    def test_determinism(self, three):
        c = noisy_probability(np.random.default_rng(5), three, 0.2)
        a = find_dominating_probability("log", three, c, FAST).to_dict()
        b = find_dominating_probability("log", three, c, FAST).to_dict()
        assert a == b

    @settings(max_examples=25)
    @given(st.integers(0, 10_000), st.sampled_from(["brier", "log", "spherical"]), st.sampled_from([0.02, 0.2, 0.6]))
    def test_certificates_are_sound(self, seed, rule, scale):
        space = OutcomeSpace.of_size(3)
        c = noisy_probability(np.random.default_rng(seed), space, scale)
        cfg = FinderConfig(grid_m=12, random_samples=30, seed=seed)
        D = sample_score_set(rule, space, cfg)
        res = find_with_samples(rule, space, c, D, cfg)
        if not isinstance(res, DominanceCertificate):
            return
        margins, ok = verify_domination(rule, space, res.p, c)
        assert ok and np.all(margins > 0)
        if res.lemma1 is None:
            return
        finite = [i for i in range(space.n) if i not in res.infinite_worlds]
        columns = [score_of(rule, space, w) for w in res.lemma1["columns"]]
        pts = np.vstack([D.scores] + [np.atleast_2d(col) for col in columns])[:, finite]
        zprime = np.array(res.lemma1["zprime"])[finite]
        assert conv_membership(pts, zprime, 1e-6)
        assert np.all(zprime < res.score_c[finite] - cfg.epsilon / 2)

    def test_monotone_sampling(self, three):
        rng = np.random.default_rng(2)
        for _ in range(10):
            c = noisy_probability(rng, three, 0.1)
            coarse = find_dominating_probability("brier", three, c, FinderConfig(grid_m=6, random_samples=10, column_iters=0))
            fine = find_dominating_probability("brier", three, c, FinderConfig(grid_m=12, random_samples=10, column_iters=0))
            if coarse.status == "certificate":
                assert fine.status == "certificate"

    def test_agrees_with_oracle(self, two):
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(40):
            c = noisy_probability(rng, two, 0.2)
            best = oracle_dominator("brier", two, c, OracleConfig(simplex_grid=50))
            if best.min_margin >= 2e-6:
                checked += 1
                assert find_dominating_probability("brier", two, c).status == "certificate"
        assert checked > 10


class TestRefine:
    def test_known_minimizer(self, two):
        u = np.array([0.3, 0.7])
        target = score_of("spherical", two, u)
        v = refine_local("spherical", two, target, [u], FAST)
        np.testing.assert_array_equal(v.v, u)

    def test_reaches_lemma_point(self, two, incoherent):
        cert = find_dominating_probability("brier", two, incoherent)
        zprime = np.array(cert.lemma1["zprime"])
        cfg = FinderConfig()
        v = refine_local("brier", two, zprime, [np.array([0.5, 0.5])], cfg)
        assert np.max(score_of("brier", two, v.v) - zprime) <= cfg.refine_tol

    def test_no_iterations(self, two):
        seed = np.array([0.2, 0.8])
        v = refine_local("brier", two, np.array([0.1, 0.1]), [seed], FinderConfig(refine_iters=0))
        np.testing.assert_array_equal(v.v, seed)
