"""Agnostic weak learners.

A weak learner maps an ordered sample and a 64-bit seed to a hypothesis of
its base class, deterministically.  The concrete learners here are an
exhaustive ERM over a tabulated class, an exhaustive decision-stump search,
and a wrapper that returns a fixed bad hypothesis with a given probability.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .core import (
    FINITE,
    PARAMETRIC,
    Dataset,
    FiniteDistribution,
    Hypothesis,
    Stump,
    TabulatedClass,
    corr,
)
from .errors import EmptyDatasetError, ParameterError, RepresentationError
from .seeding import derive_seed, rng


@dataclass(frozen=True)
class WeakLearnerParams:
    """``(gamma0, eps0, delta0, m0)`` of an agnostic weak learner."""

    gamma0: float
    eps0: float
    delta0: float
    m0: int

    def __post_init__(self):
        if not 0 < self.gamma0 <= 1:
            raise ParameterError("gamma0 must lie in (0, 1]")
        if not 0 <= self.eps0 < 1:
            raise ParameterError("eps0 must lie in [0, 1)")
        if not 0 < self.delta0 < 1:
            raise ParameterError("delta0 must lie in (0, 1)")
        if self.m0 < 1:
            raise ParameterError("m0 must be a positive integer")
        if self.gamma0 <= self.eps0:
            raise ParameterError("gamma0 must exceed eps0 for a non-trivial learner")

    @property
    def theta(self) -> float:
        return (self.gamma0 - self.eps0) / 2


class WeakLearner(ABC):
    """``learner(sample, seed) -> Hypothesis``, pure in both arguments."""

    #: whether the output ignores the order of the sample
    order_insensitive = False

    @abstractmethod
    def __call__(self, sample: Dataset, seed: int) -> Hypothesis: ...

    @property
    @abstractmethod
    def base_class(self) -> str:
        """Short description of the class outputs are drawn from."""


class ERMWeakLearner(WeakLearner):
    """Maximise sample correlation over a tabulated class; lowest index wins ties."""

    order_insensitive = True

    def __init__(self, H: TabulatedClass):
        if len(H) == 0:
            raise EmptyDatasetError("ERM needs a nonempty class")
        self.H = H

    @property
    def base_class(self):
        return f"tabulated[{len(self.H)} on {self.H.domain_size} points]"

    def best_index(self, sample: Dataset) -> int:
        if sample.kind != FINITE:
            raise RepresentationError("ERM over a tabulated class needs finite-domain data")
        if len(sample) == 0:
            return 0
        scores = self.H.matrix[:, sample.x].astype(np.int64) @ sample.y.astype(np.int64)
        return int(np.argmax(scores))

    def __call__(self, sample, seed=0):
        return self.H.hypotheses[self.best_index(sample)]


class StumpWeakLearner(WeakLearner):
    """Exhaustive decision-stump search by sample correlation.

    Ties go to the smallest ``(feature, threshold, polarity)`` triple.
    """

    order_insensitive = True

    @property
    def base_class(self):
        return "stumps"

    def __call__(self, sample, seed=0):
        if sample.kind != PARAMETRIC:
            raise RepresentationError("stumps need parametric data")
        if len(sample) == 0:
            raise EmptyDatasetError("stump search needs at least one example")
        X, y = sample.x, sample.y.astype(np.float64)
        best, best_key = -np.inf, None
        for f in range(X.shape[1]):
            v = np.unique(X[:, f])
            ts = np.concatenate([[-np.inf], (v[:-1] + v[1:]) / 2, [np.inf]])
            up = np.where(X[:, f][:, None] - ts[None, :] >= 0, 1.0, -1.0)
            c_up = y @ up
            # per threshold, polarity -1 sorts before +1
            scores = np.stack([-c_up, c_up], axis=1).reshape(-1)
            i = int(np.argmax(scores))
            if scores[i] > best:
                best = scores[i]
                best_key = (f, float(ts[i // 2]), -1 if i % 2 == 0 else 1)
        return Stump(*best_key)


class FaultyWeakLearner(WeakLearner):
    """Return ``bad`` with probability ``delta0`` (seed-driven), else defer to ``inner``."""

    def __init__(self, inner: WeakLearner, delta0: float, bad: Hypothesis):
        if not 0 <= delta0 <= 1:
            raise ParameterError("delta0 must lie in [0, 1]")
        self.inner = inner
        self.delta0 = delta0
        self.bad = bad
        self.order_insensitive = inner.order_insensitive

    @property
    def base_class(self):
        return self.inner.base_class

    def fails(self, seed: int) -> bool:
        return bool(rng(derive_seed(seed, 0x0FA17)).random() < self.delta0)

    def __call__(self, sample, seed=0):
        if self.fails(seed):
            return self.bad
        return self.inner(sample, seed)


class ConstantWeakLearner(WeakLearner):
    """Always returns the same hypothesis."""

    order_insensitive = True

    def __init__(self, h: Hypothesis):
        self.h = h

    @property
    def base_class(self):
        return "constant"

    def __call__(self, sample, seed=0):
        return self.h


def erm_weak_learner(H: TabulatedClass) -> ERMWeakLearner:
    return ERMWeakLearner(H)


def stump_weak_learner() -> StumpWeakLearner:
    return StumpWeakLearner()


def faulty_weak_learner(inner, delta0, bad) -> FaultyWeakLearner:
    return FaultyWeakLearner(inner, delta0, bad)


def erm_slack(class_size: int, m0: int, delta0: float) -> float:
    """eps0 under which ERM over a finite class is a (1, eps0, delta0, m0) learner.

    Hoeffding plus a union bound over the class: with probability
    ``1 - delta0`` every sample correlation is within
    ``sqrt(2 ln(2|H|/delta0) / m0)`` of the truth, and ERM loses at most
    twice that against the best hypothesis.
    """
    return 2 * math.sqrt(2 * math.log(2 * class_size / delta0) / m0)


def check_weak_guarantee(
    W: WeakLearner,
    F: TabulatedClass,
    D: FiniteDistribution,
    params: WeakLearnerParams,
    trials: int,
    seed: int,
) -> float:
    """Fraction of seeded trials in which ``W`` misses its correlation target."""
    if not isinstance(D, FiniteDistribution):
        raise ParameterError("the weak-learner check needs a finite distribution")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if len(F) == 0:
        raise EmptyDatasetError("reference class must be nonempty")
    weighted = D.y.astype(np.float64) * D.p
    sup = float(np.max(F.matrix[:, D.x].astype(np.float64) @ weighted))
    target = params.gamma0 * sup - params.eps0
    failures = 0
    for t in range(trials):
        sample = D.sample(params.m0, derive_seed(seed, t, 0))
        w = W(sample, derive_seed(seed, t, 1))
        failures += corr(D, w) < target
    return failures / trials
