"""Agnostic boosting by ERM over voting classifiers, with VC and bound tooling."""

from .booster import (
    BoostResult,
    HypothesisPool,
    RunReport,
    Schedule,
    agnostic_boost,
    build_pool,
    erm_select,
    schedule_params,
)
from .core import (
    Dataset,
    EmpiricalDistribution,
    Example,
    FiniteDistribution,
    Point,
    Stump,
    Tabulated,
    TabulatedClass,
    VotingClassifier,
    WeightedVoter,
    corr,
    err,
    margin_loss,
    restrict,
)
from .errors import AgnoboostError
from .weak_learners import (
    WeakLearner,
    WeakLearnerParams,
    check_weak_guarantee,
    erm_weak_learner,
    faulty_weak_learner,
    stump_weak_learner,
)

__version__ = "0.1.0"

__all__ = [
    "AgnoboostError",
    "BoostResult",
    "Dataset",
    "EmpiricalDistribution",
    "Example",
    "FiniteDistribution",
    "HypothesisPool",
    "Point",
    "RunReport",
    "Schedule",
    "Stump",
    "Tabulated",
    "TabulatedClass",
    "VotingClassifier",
    "WeakLearner",
    "WeakLearnerParams",
    "WeightedVoter",
    "agnostic_boost",
    "build_pool",
    "check_weak_guarantee",
    "corr",
    "erm_select",
    "erm_weak_learner",
    "err",
    "faulty_weak_learner",
    "margin_loss",
    "restrict",
    "schedule_params",
    "stump_weak_learner",
]
