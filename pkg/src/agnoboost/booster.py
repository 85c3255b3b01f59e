"""Agnostic boosting by validation-set ERM over signed averages.

The training sequence is split in order.  The first half feeds the weak
learner on every index vector of length ``m0`` (``R * M`` seeded calls
each), and the second half selects, among all size-``T`` multisets of the
resulting pool, the one whose signed average has the fewest mistakes.

Round and repeat counters in provenance records are 0-based, like dataset
indices.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import Dataset, Hypothesis, VotingClassifier, restrict
from .errors import BudgetExceededError, ParameterError
from .seeding import derive_seed
from .weak_learners import WeakLearner

DEFAULT_BUDGET = 10**8
#: approximate element count of one block of combination sums
_CHUNK_TARGET = 1 << 21


@dataclass(frozen=True)
class Schedule:
    R: int
    M: int
    T: int
    theta: float
    d_star: int


def _check_theta(theta):
    if not 0 < theta <= 0.5:
        raise ParameterError(f"theta must lie in (0, 1/2], got {theta!r}")


def combination_size(n: int, theta: float, d_star: int) -> int:
    """``T = ceil(min(ln n / theta**2, 260**2 (4 d* + 2) / theta**2))``, at least 1."""
    return max(1, math.ceil(min(math.log(n) / theta**2, 260**2 * (4 * d_star + 2) / theta**2)))


def schedule_params(n: int, theta: float, delta: float, delta0: float, d_star: int) -> Schedule:
    """Rounds ``R``, repeats ``M`` and combination size ``T`` for ``n`` examples."""
    if n < 2 or n % 2:
        raise ParameterError(f"n must be even and >= 2, got {n}")
    _check_theta(theta)
    if not 0 < delta < 1 or not 0 < delta0 < 1:
        raise ParameterError("delta and delta0 must lie in (0, 1)")
    if d_star < 1:
        raise ParameterError("d_star must be a positive integer")
    R = max(1, math.ceil(math.log(n) / theta**2))
    M = max(1, math.ceil(math.log(5 * R / delta) / -math.log(delta0)))
    T = combination_size(n, theta, d_star)
    return Schedule(R, M, T, theta, d_star)


@dataclass(frozen=True)
class Provenance:
    round: int
    repeat: int
    indices: tuple[int, ...]
    seed: int


@dataclass(frozen=True)
class PooledHypothesis:
    hypothesis: Hypothesis
    provenance: Provenance

    def to_json(self):
        return {"hypothesis": self.hypothesis.to_json(), "provenance": asdict(self.provenance)}


@dataclass
class HypothesisPool:
    entries: list[PooledHypothesis]
    dedup_mode: str = "off"
    raw_size: int = 0
    weak_calls: int = 0

    def __len__(self):
        return len(self.entries)

    @property
    def hypotheses(self) -> list[Hypothesis]:
        return [e.hypothesis for e in self.entries]


def index_vectors(half: int, m0: int, multiset: bool = False):
    """All ``I`` in ``[half]^m0`` (ordered, with repetition) in lexicographic order."""
    if multiset:
        return itertools.combinations_with_replacement(range(half), m0)
    return itertools.product(range(half), repeat=m0)


def count_index_vectors(half: int, m0: int, multiset: bool = False) -> int:
    return math.comb(half + m0 - 1, m0) if multiset else half**m0


def _pool_round(S1, W, r, M, m0, seed_root, multiset):
    out = []
    for I in index_vectors(len(S1), m0, multiset):
        sub = restrict(S1, I)
        for m in range(M):
            seed = derive_seed(seed_root, r, m, *I)
            out.append(PooledHypothesis(W(sub, seed), Provenance(r, m, I, seed)))
    return out


def build_pool(
    S1: Dataset,
    W: WeakLearner,
    sched: Schedule,
    m0: int,
    seed_root: int,
    *,
    dedup: str = "off",
    budget: int = DEFAULT_BUDGET,
    multiset_subsamples: bool = False,
    workers: int = 1,
) -> HypothesisPool:
    """Call ``W`` on every subsample of ``S1`` ``R * M`` times and collect the outputs.

    With ``dedup="exact_table"`` only the first entry of each distinct
    hypothesis is kept.  ``multiset_subsamples`` visits sorted index vectors
    only and is allowed for order-insensitive learners.
    """
    if m0 < 1:
        raise ParameterError("m0 must be >= 1")
    if len(S1) < 1:
        raise ParameterError("the first half must be nonempty")
    if dedup not in ("off", "exact_table"):
        raise ParameterError(f"unknown dedup mode {dedup!r}")
    if multiset_subsamples and not W.order_insensitive:
        raise ParameterError("multiset subsamples need an order-insensitive learner")
    calls = sched.R * sched.M * count_index_vectors(len(S1), m0, multiset_subsamples)
    if calls > budget:
        raise BudgetExceededError("weak-learner calls", calls, budget)

    args = (S1, W)
    rest = (sched.M, m0, seed_root, multiset_subsamples)
    if workers > 1 and sched.R > 1:
        with ProcessPoolExecutor(workers) as ex:
            rounds = ex.map(_pool_round, *zip(*[(*args, r, *rest) for r in range(sched.R)]))
            rounds = list(rounds)
    else:
        rounds = (_pool_round(*args, r, *rest) for r in range(sched.R))

    entries, seen, made = [], set(), 0
    for batch in rounds:
        made += len(batch)
        for e in batch:
            if dedup == "exact_table":
                if e.hypothesis in seen:
                    continue
                seen.add(e.hypothesis)
            entries.append(e)
    return HypothesisPool(entries, dedup, raw_size=made, weak_calls=made)


def enumerate_combinations(pool_size: int, T: int):
    """Sorted ``T``-multisets of ``range(pool_size)`` in lexicographic order."""
    if pool_size < 1 or T < 1:
        raise ParameterError("pool_size and T must be >= 1")
    return itertools.combinations_with_replacement(range(pool_size), T)


def count_combinations(pool_size: int, T: int) -> int:
    return math.comb(pool_size + T - 1, T)


def _mistakes(P, y, combos):
    """Validation mistakes of each row of ``combos`` (a ``(c, T)`` index array)."""
    s = P[combos].sum(axis=1, dtype=np.int32)
    return ((s >= 0) != (y > 0)).sum(axis=1)


def _search_range(P, y, T, first, chunk):
    """Best ``(mistakes, multiset)`` among multisets starting with index ``first``."""
    k = P.shape[0]
    tails = itertools.combinations_with_replacement(range(first, k), T - 1)
    best = None
    while True:
        block = list(itertools.islice(tails, chunk))
        if not block:
            break
        combos = np.empty((len(block), T), dtype=np.int64)
        combos[:, 0] = first
        if T > 1:
            combos[:, 1:] = np.asarray(block, dtype=np.int64).reshape(len(block), T - 1)
        miss = _mistakes(P, y, combos)
        i = int(np.argmin(miss))
        if best is None or miss[i] < best[0]:
            best = (int(miss[i]), tuple(int(v) for v in combos[i]))
    return best


@dataclass(frozen=True)
class Selection:
    multiset: tuple[int, ...]
    mistakes: int
    loss: float
    combinations: int


def erm_select(
    pool: HypothesisPool | list,
    T: int,
    S2: Dataset,
    *,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    search: str = "exhaustive",
) -> tuple[VotingClassifier, Selection]:
    """Signed average of ``T`` pool members with the fewest mistakes on ``S2``.

    Ties go to the lexicographically smallest sorted index multiset, which
    makes the answer independent of how the search is split across workers.
    """
    hyps = pool.hypotheses if isinstance(pool, HypothesisPool) else list(pool)
    k = len(hyps)
    if k < 1:
        raise ParameterError("the pool is empty")
    if len(S2) < 1:
        raise ParameterError("the validation half must be nonempty")
    if T < 1:
        raise ParameterError("T must be >= 1")
    P = np.stack([h.predict(S2.x) for h in hyps]).astype(np.int16)
    y = S2.y

    if search == "greedy":
        best = _greedy(P, y, T)
        combos = k * T
    elif search == "exhaustive":
        combos = count_combinations(k, T)
        if combos > budget:
            raise BudgetExceededError("combinations", combos, budget)
        chunk = max(1, _CHUNK_TARGET // (T * max(1, len(S2))))
        jobs = [(P, y, T, i, chunk) for i in range(k)]
        if workers > 1 and k > 1:
            with ProcessPoolExecutor(workers) as ex:
                parts = list(ex.map(_search_range, *zip(*jobs)))
        else:
            parts = [_search_range(*j) for j in jobs]
        best = min(parts)
    else:
        raise ParameterError(f"unknown search mode {search!r}")

    mistakes, multiset = best
    voter = VotingClassifier([hyps[i] for i in multiset])
    return voter, Selection(multiset, mistakes, mistakes / len(S2), combos)


def _greedy(P, y, T):
    """Forward selection, one member at a time; carries no optimality guarantee."""
    chosen = []
    s = np.zeros(P.shape[1], dtype=np.int32)
    for _ in range(T):
        miss = (((s[None, :] + P) >= 0) != (y > 0)[None, :]).sum(axis=1)
        i = int(np.argmin(miss))
        chosen.append(i)
        s = s + P[i]
    multiset = tuple(sorted(chosen))
    return int(_mistakes(P, y, np.asarray([multiset]))[0]), multiset


@dataclass
class RunReport:
    n: int
    R: int
    M: int
    T: int
    theta: float
    m0: int
    pool_size_raw: int
    pool_size: int
    weak_calls: int
    combinations: int
    selected: tuple[int, ...]
    validation_loss: float
    wall_ms: int = field(default=0, compare=False)

    def to_json(self):
        d = asdict(self)
        d["selected"] = list(self.selected)
        return d


@dataclass
class BoostResult:
    voter: VotingClassifier
    members: tuple[PooledHypothesis, ...]
    report: RunReport

    def to_json(self):
        return {
            "voter": {"T": self.voter.T, "members": [m.to_json() for m in self.members]},
            "report": self.report.to_json(),
        }


def agnostic_boost(
    S: Dataset,
    delta: float,
    W: WeakLearner,
    delta0: float,
    m0: int,
    theta: float,
    d_star: int,
    seed_root: int = 0,
    *,
    budget: int = DEFAULT_BUDGET,
    dedup: str = "exact_table",
    multiset_subsamples: bool = False,
    workers: int = 1,
    search: str = "exhaustive",
) -> BoostResult:
    """Run the full boosting procedure on an even-length training sequence."""
    start = time.perf_counter()
    n = len(S)
    if n % 2:
        raise ParameterError(f"training sequence length must be even, got {n}")
    sched = schedule_params(n, theta, delta, delta0, d_star)
    S1, S2 = S.halves()
    pool = build_pool(
        S1, W, sched, m0, seed_root, dedup=dedup, budget=budget,
        multiset_subsamples=multiset_subsamples, workers=workers,
    )
    voter, sel = erm_select(pool, sched.T, S2, budget=budget, workers=workers, search=search)
    report = RunReport(
        n=n, R=sched.R, M=sched.M, T=sched.T, theta=theta, m0=m0,
        pool_size_raw=pool.raw_size, pool_size=len(pool), weak_calls=pool.weak_calls,
        combinations=sel.combinations, selected=sel.multiset,
        validation_loss=sel.loss,
        wall_ms=int(round((time.perf_counter() - start) * 1000)),
    )
    members = tuple(pool.entries[i] for i in sel.multiset)
    return BoostResult(voter, members, report)
