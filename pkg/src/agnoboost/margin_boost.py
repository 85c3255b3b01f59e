"""Equal-weight AdaBoost with a fixed edge.

Every round uses the same step size ``alpha(theta)`` and the output is the
plain average of the received hypotheses.  Hypotheses come from a caller
supplied *provider* ``provider(round, distribution, S) -> Hypothesis``, so
the same loop serves exhaustive search, adversaries and pool simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    FINITE,
    Dataset,
    EmpiricalDistribution,
    Hypothesis,
    Tabulated,
    TabulatedClass,
    VotingClassifier,
    margin_loss,
)
from .errors import EdgeViolationError, MarginGuaranteeError, ParameterError

EDGE_TOL = 1e-12

Provider = Callable[[int, EmpiricalDistribution, Dataset], Hypothesis]


def alpha(theta: float) -> float:
    """Step size ``1/2 ln((1/2 + theta) / (1/2 - theta))``."""
    if not 0 < theta < 0.5:
        raise ParameterError(f"theta must lie in (0, 1/2), got {theta!r}")
    return 0.5 * (math.log1p(2 * theta) - math.log1p(-2 * theta))


def required_rounds(n: int, theta: float) -> int:
    """Smallest round count for which the margin guarantee applies."""
    return math.ceil(math.log(2 * n) / theta**2)


def z_bound(theta: float) -> float:
    return 2 * math.sqrt((0.5 - theta) * (0.5 + theta))


def weighted_error(D: EmpiricalDistribution, h: Hypothesis, S: Dataset) -> float:
    return float(D.weights @ (h.predict(S.x) != S.y))


def update_distribution(D_r: EmpiricalDistribution, h: Hypothesis, S: Dataset, alpha: float):
    """Exponential reweighting; returns the next distribution and the normaliser ``Z``."""
    if D_r.weights.size != len(S):
        raise ParameterError("distribution and dataset lengths differ")
    with np.errstate(over="ignore"):
        w = D_r.weights * np.exp(-alpha * (S.y * h.predict(S.x)))
    Z = float(w.sum())
    if not np.all(np.isfinite(w)) or not math.isfinite(Z) or Z <= 0:
        raise ParameterError("non-finite reweighting; alpha too large")
    nxt = w / Z
    nxt = nxt / nxt.sum()
    return EmpiricalDistribution(nxt), Z


@dataclass(frozen=True)
class BoostRound:
    h: Hypothesis
    error: float
    alpha: float
    Z: float
    distribution_after: EmpiricalDistribution


@dataclass
class BoostRun:
    voter: VotingClassifier
    rounds: list[BoostRound]
    margin_checked: bool


def run(S: Dataset, theta: float, R: int, provider: Provider) -> BoostRun:
    """``R`` rounds of equal-weight boosting on ``S``.

    Raises :class:`EdgeViolationError` as soon as the provider returns a
    hypothesis with weighted error above ``1/2 - theta``.  When ``R`` is at
    least :func:`required_rounds`, the ``theta/2``-margin loss of the result
    is checked to be zero.
    """
    if R < 1:
        raise ParameterError("R must be >= 1")
    if len(S) < 1:
        raise ParameterError("S must be nonempty")
    a = alpha(theta)
    limit = 0.5 - theta
    D = EmpiricalDistribution.uniform(len(S))
    rounds = []
    for r in range(R):
        h = provider(r, D, S)
        e = weighted_error(D, h, S)
        if e > limit + EDGE_TOL:
            raise EdgeViolationError(r, e, limit)
        D, Z = update_distribution(D, h, S, a)
        rounds.append(BoostRound(h, e, a, Z, D))
    voter = VotingClassifier([rd.h for rd in rounds])
    checked = R >= required_rounds(len(S), theta)
    if checked and margin_loss(S, voter, theta / 2) != 0:
        raise MarginGuaranteeError(f"theta/2-margin loss is nonzero after {R} rounds")
    return BoostRun(voter, rounds, checked)


# --------------------------------------------------------------------------
# providers


def argmin_provider(hypotheses: TabulatedClass | Sequence[Hypothesis]) -> Provider:
    """Return the lowest-index hypothesis of least weighted error each round."""
    hyps = hypotheses.hypotheses if isinstance(hypotheses, TabulatedClass) else tuple(hypotheses)
    if not hyps:
        raise ParameterError("provider needs at least one hypothesis")
    cache: list = [None, None]

    def provide(r, D, S):
        if cache[0] is not S:
            cache[:] = [S, np.stack([h.predict(S.x) != S.y for h in hyps]).astype(np.float64)]
        errs = cache[1] @ D.weights
        return hyps[int(np.argmin(errs))]

    return provide


def _subset_sums(w):
    sums = np.zeros(1)
    for v in w:
        sums = np.concatenate([sums, sums + v])
    return sums


def _max_subset_below(w, cap):
    """Mask of a subset of ``w`` with the largest sum not exceeding ``cap`` (exact)."""
    n = len(w)
    h = n // 2
    left, right = _subset_sums(w[:h]), _subset_sums(w[h:])
    order = np.argsort(right, kind="stable")
    rs = right[order]
    j = np.searchsorted(rs, cap - left, side="right") - 1
    ok = j >= 0
    tot = np.where(ok, left + rs[np.maximum(j, 0)], -1.0)
    tot[tot > cap] = -1.0
    i = int(np.argmax(tot))
    mask = np.zeros(n, dtype=bool)
    lm, rm = i, int(order[j[i]])
    mask[:h] = (lm >> np.arange(h)) & 1
    mask[h:] = (rm >> np.arange(n - h)) & 1
    return mask


def _greedy_subset_below(w, cap):
    mask = np.zeros(len(w), dtype=bool)
    total = 0.0
    for i in np.argsort(-w, kind="stable"):
        if total + w[i] <= cap:
            mask[i] = True
            total += w[i]
    return mask


def adversarial_provider(theta: float, exact_up_to: int = 24) -> Provider:
    """Hardest admissible hypothesis over the full class on the points of ``S``.

    Each round returns the labelling of ``S`` that is wrong on a set of
    examples of maximal weight not exceeding ``1/2 - theta``.  The subset is
    found exactly (meet in the middle) for up to ``exact_up_to`` examples
    and greedily beyond.  ``S`` must be a finite-domain dataset with
    distinct points.
    """
    cap = 0.5 - theta

    def provide(r, D, S):
        if S.kind != FINITE or np.unique(S.x).size != len(S):
            raise ParameterError("the adversary needs distinct finite-domain points")
        w = D.weights
        if len(S) <= exact_up_to:
            mask = _max_subset_below(w, cap)
        else:
            mask = _greedy_subset_below(w, cap)
        size = S.domain_size or int(S.x.max()) + 1
        values = np.ones(size, dtype=np.int64)
        values[S.x] = np.where(mask, -S.y, S.y)
        return Tabulated(tuple(values))

    return provide


# --------------------------------------------------------------------------
# pool simulation


@dataclass
class SimulationResult:
    success: bool
    voter: VotingClassifier | None
    failing_round: int | None
    rounds: list[BoostRound]


def simulate_within_pool(S_target: Dataset, theta: float, R: int, pool) -> SimulationResult:
    """Drive the boosting loop with the best pool member each round.

    Stops at the first round whose best member has weighted error above
    ``1/2 - theta`` and reports that (0-based) round as the failure.
    """
    hyps = pool.hypotheses if hasattr(pool, "hypotheses") else list(pool)
    if not hyps:
        raise ParameterError("pool must be nonempty")
    if len(S_target) < 1:
        raise ParameterError("S_target must be nonempty")
    pick = argmin_provider(hyps)
    a = alpha(theta)
    limit = 0.5 - theta
    D = EmpiricalDistribution.uniform(len(S_target))
    rounds = []
    for r in range(R):
        h = pick(r, D, S_target)
        e = weighted_error(D, h, S_target)
        if e > limit + EDGE_TOL:
            return SimulationResult(False, None, r, rounds)
        D, Z = update_distribution(D, h, S_target, a)
        rounds.append(BoostRound(h, e, a, Z, D))
    return SimulationResult(True, VotingClassifier([rd.h for rd in rounds]), None, rounds)
