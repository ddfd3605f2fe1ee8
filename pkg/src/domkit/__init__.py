"""Accuracy dominance for strictly proper scoring rules on finite outcome spaces."""

__version__ = "0.1.0"

from .core import (
    CredenceFunction,
    DomainError,
    Event,
    ExtendedScoreVector,
    OutcomeSpace,
    ProbabilityWeights,
    arctan_distance,
    credence_from_weights,
    is_probability,
)
from .dominance import (
    AlreadyProbability,
    DominanceCertificate,
    EmptySample,
    FinderConfig,
    NotFound,
    find_dominating_probability,
    refine_local,
    sample_score_set,
    verify_domination,
)
from .estimator import DominanceFinder
from .geometry import (
    HalfSpace,
    IndeterminateForm,
    SampledScoreSet,
    conv_membership,
    extended_inner_product,
    extension_contains,
    farthest_point_descent,
    lp_strict_improvement,
    support_function,
)
from .propriety import (
    AuditConfig,
    AuditReport,
    check_closure_condition,
    check_continuity_on_probabilities,
    check_strict_propriety,
    check_support_uniqueness,
)
from .scoring import ScoringRule, expected_score, score

__all__ = [
    "CredenceFunction",
    "DomainError",
    "Event",
    "ExtendedScoreVector",
    "OutcomeSpace",
    "ProbabilityWeights",
    "arctan_distance",
    "credence_from_weights",
    "is_probability",
    "AlreadyProbability",
    "DominanceCertificate",
    "EmptySample",
    "FinderConfig",
    "NotFound",
    "find_dominating_probability",
    "refine_local",
    "sample_score_set",
    "verify_domination",
    "DominanceFinder",
    "HalfSpace",
    "IndeterminateForm",
    "SampledScoreSet",
    "conv_membership",
    "extended_inner_product",
    "extension_contains",
    "farthest_point_descent",
    "lp_strict_improvement",
    "support_function",
    "AuditConfig",
    "AuditReport",
    "check_closure_condition",
    "check_continuity_on_probabilities",
    "check_strict_propriety",
    "check_support_uniqueness",
    "ScoringRule",
    "expected_score",
    "score",
]
