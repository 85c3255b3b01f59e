"""Exhaustive VC-dimension tools for tabulated classes.

Shattering checks encode each hypothesis' restriction to a point set as an
integer bit pattern and count distinct patterns.  Everything is exact and
exponential, so enumeration sizes are capped and reported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Dataset, TabulatedClass, VotingClassifier, WeightedVoter
from .errors import CapExceededError, ParameterError, PruningFailedError
from .seeding import rng

MAX_SHATTER_POINTS = 30
MAX_EXACT_DOMAIN = 24
MAX_DUAL_HYPOTHESES = 2**16
MAX_AVERAGE_CLASS = 10**6
MAX_AVERAGE_DOMAIN = 16


def _patterns(C: TabulatedClass, points) -> np.ndarray:
    """Integer code of each hypothesis restricted to ``points``."""
    pts = np.asarray(points, dtype=np.int64)
    bits = (C.matrix[:, pts] > 0).astype(np.int64)
    return bits @ (np.int64(1) << np.arange(pts.size, dtype=np.int64))


def count_restrictions(C: TabulatedClass, points) -> int:
    """Number of distinct labellings ``C`` induces on ``points``."""
    if len(C) == 0:
        return 0
    return int(np.unique(_patterns(C, points)).size)


def shatters(C: TabulatedClass, points) -> bool:
    """Whether ``C`` realises all ``2**len(points)`` labellings of ``points``."""
    points = list(points)
    if len(points) > MAX_SHATTER_POINTS:
        raise CapExceededError(f"{len(points)} points exceeds the cap of {MAX_SHATTER_POINTS}")
    if len(set(points)) != len(points):
        return False
    return count_restrictions(C, points) == 2 ** len(points)


@dataclass(frozen=True)
class VcReport:
    dimension: int
    witness: tuple[int, ...]
    capped: bool = False


def vc_dim(C: TabulatedClass, cap: int | None = None) -> VcReport:
    """Exact VC dimension by increasing-size subset search.

    With ``cap`` set, sets larger than ``cap`` are not examined; if a
    ``cap``-set is shattered the report is flagged ``capped`` and the
    dimension is only a lower bound.
    """
    N = C.domain_size
    if N > MAX_EXACT_DOMAIN:
        raise CapExceededError(f"exact VC search limited to domain_size <= {MAX_EXACT_DOMAIN}")
    distinct = np.unique(C.matrix, axis=0) if len(C) else C.matrix
    # a class with k distinct members shatters at most floor(log2 k) points
    limit = int(math.floor(math.log2(len(distinct)))) if len(distinct) else 0
    limit = min(limit, N)
    search = limit if cap is None else min(limit, cap)
    reduced = TabulatedClass(N, distinct) if len(distinct) else C
    best: tuple[int, ...] = ()
    for k in range(1, search + 1):
        hit = next(
            (s for s in itertools.combinations(range(N), k) if shatters(reduced, s)),
            None,
        )
        if hit is None:
            return VcReport(len(best), best, False)
        best = hit
    return VcReport(len(best), best, len(best) < limit and len(best) == search)


def dual_class(C: TabulatedClass) -> TabulatedClass:
    """Point-evaluation class over the hypotheses of ``C`` (the transpose)."""
    if len(C) > MAX_DUAL_HYPOTHESES:
        raise CapExceededError(f"dual class limited to {MAX_DUAL_HYPOTHESES} hypotheses")
    if len(C) == 0:
        raise ParameterError("the dual of an empty class has an empty domain")
    return TabulatedClass(len(C), C.matrix.T)


def dual_vc_dim(C: TabulatedClass) -> int:
    return vc_dim(dual_class(C)).dimension


def sauer_shelah_bound(m: int, d: int) -> float:
    """``(e m / d)**d``, the labelling count bound for ``m >= d >= 1`` points."""
    if d < 1 or m < d:
        raise ParameterError("need m >= d >= 1")
    return (math.e * m / d) ** d


def average_class_vc_bound(T: int, d: int) -> float:
    """``4 T d ln(4 e T)``: VC bound for signs of ``T``-wise averages."""
    if T < 1 or d < 0:
        raise ParameterError("need T >= 1 and d >= 0")
    return 4 * T * d * math.log(4 * math.e * T)


def sign_average_class(C: TabulatedClass, T: int) -> TabulatedClass:
    """``sign`` of every ``T``-wise average, one row per sorted multiset."""
    count = math.comb(len(C) + T - 1, T)
    if count > MAX_AVERAGE_CLASS:
        raise CapExceededError(f"{count} multisets exceeds the cap of {MAX_AVERAGE_CLASS}")
    idx = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations_with_replacement(range(len(C)), T)),
        dtype=np.int64,
        count=count * T,
    ).reshape(count, T)
    sums = C.matrix.astype(np.int32)[idx].sum(axis=1)
    return TabulatedClass(C.domain_size, np.where(sums >= 0, 1, -1))


class AverageClassCheck(NamedTuple):
    computed: VcReport
    base: VcReport
    bound: float
    ok: bool


def verify_average_class_vc(C: TabulatedClass, T: int, cap: int | None = None) -> AverageClassCheck:
    """Brute-force VC of the signed ``T``-wise averages against ``4 T d ln(4 e T)``."""
    if C.domain_size > MAX_AVERAGE_DOMAIN:
        raise CapExceededError(f"domain_size limited to {MAX_AVERAGE_DOMAIN}")
    base = vc_dim(C)
    computed = vc_dim(sign_average_class(C, T), cap)
    bound = average_class_vc_bound(T, base.dimension)
    return AverageClassCheck(computed, base, bound, computed.dimension <= bound)


# --------------------------------------------------------------------------
# pruning


def pruning_size(d_star: int, theta: float) -> int:
    """Member count ``ceil(130**2 (4 d* + 2) / theta**2)`` that suffices for pruning."""
    if d_star < 0 or theta <= 0:
        raise ParameterError("need d_star >= 0 and theta > 0")
    return math.ceil(130**2 * (4 * d_star + 2) / theta**2)


class PruneResult(NamedTuple):
    pruned: VotingClassifier
    attempts: int


def prune_voter(
    v: WeightedVoter,
    S: Dataset,
    theta: float,
    L: int,
    seed: int,
    max_attempts: int = 100,
) -> PruneResult:
    """Resample ``L`` members i.i.d. from the weights until every margin on ``S`` is positive.

    Requires ``y v(x) >= theta`` on all of ``S``.  Only hypotheses with
    positive weight can be drawn.
    """
    if L < 1:
        raise ParameterError("L must be >= 1")
    if len(S) < 1:
        raise ParameterError("S must be nonempty")
    ym = S.y * v.score(S.x)
    if np.any(ym < theta - 1e-12):
        worst = int(np.argmin(ym))
        raise ParameterError(
            f"voter margin {float(ym[worst])!r} at example {worst} is below theta={theta!r}"
        )
    support = np.flatnonzero(v.weights > 0)
    p = v.weights[support] / v.weights[support].sum()
    YP = S.y.astype(np.int64) * np.stack(
        [v.hypotheses[i].predict(S.x) for i in support]
    ).astype(np.int64)
    hyps = [v.hypotheses[i] for i in support]
    gen = rng(seed)
    for attempt in range(1, max_attempts + 1):
        draws = gen.choice(len(support), size=L, p=p)
        counts = np.bincount(draws, minlength=len(support))
        if np.all(counts @ YP > 0):
            return PruneResult(VotingClassifier(distinct=hyps, index=draws), attempt)
    raise PruningFailedError(max_attempts)
