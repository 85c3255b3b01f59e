"""Synthetic experiments: label-noise distributions and error-versus-n sweeps.

Population quantities are computed exactly by summing over the atoms of a
finite distribution.  Each ``(n, trial)`` cell draws its own seed from the
root seed, so any row can be replayed on its own and the table does not
depend on how trials are spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .booster import DEFAULT_BUDGET, agnostic_boost
from .bounds import main_theorem_bound
from .core import Dataset, FiniteDistribution, TabulatedClass, err
from .errors import ParameterError
from .seeding import derive_seed
from .vclab import dual_vc_dim, vc_dim
from .weak_learners import erm_weak_learner


@dataclass(frozen=True)
class SyntheticSpec:
    """Target from ``F`` with labels flipped independently at rate ``eta``."""

    domain_size: int
    target_index: int
    eta: float = 0.0
    marginal: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.domain_size < 1:
            raise ParameterError("domain_size must be >= 1")
        if not 0 <= self.eta < 0.5:
            raise ParameterError(f"eta must lie in [0, 1/2), got {self.eta!r}")
        if self.marginal is not None:
            m = tuple(float(v) for v in self.marginal)
            if len(m) != self.domain_size or min(m) < 0 or abs(sum(m) - 1) > 1e-12:
                raise ParameterError("marginal must be a probability vector over the domain")
            object.__setattr__(self, "marginal", m)

    @property
    def marginal_array(self) -> np.ndarray:
        if self.marginal is None:
            return np.full(self.domain_size, 1.0 / self.domain_size)
        return np.asarray(self.marginal)

    def to_json(self):
        return asdict(self) | {"marginal": None if self.marginal is None else list(self.marginal)}

    @classmethod
    def from_json(cls, obj):
        m = obj.get("marginal")
        return cls(
            int(obj["domain_size"]),
            int(obj["target_index"]),
            float(obj.get("eta", 0.0)),
            None if m is None else tuple(m),
        )


def make_distribution(spec: SyntheticSpec, F: TabulatedClass) -> FiniteDistribution:
    """Atoms ``(x, f*(x), (1-eta) m(x))`` and ``(x, -f*(x), eta m(x))``; zero-mass atoms dropped."""
    if F.domain_size != spec.domain_size:
        raise ParameterError("F and spec disagree on domain_size")
    if not 0 <= spec.target_index < len(F):
        raise ParameterError(f"target_index {spec.target_index} out of range for |F|={len(F)}")
    f = F.matrix[spec.target_index].astype(np.int64)
    m = spec.marginal_array
    xs, ys, ps = [], [], []
    for x in range(spec.domain_size):
        for y, p in ((f[x], (1 - spec.eta) * m[x]), (-f[x], spec.eta * m[x])):
            if p > 0:
                xs.append(x)
                ys.append(y)
                ps.append(p)
    ps = np.asarray(ps)
    return FiniteDistribution(xs, ys, ps / ps.sum(), spec.domain_size)


def exact_population_err(D: FiniteDistribution, g) -> float:
    """``sum p * [g(x) != y]`` over the atoms."""
    if not isinstance(D, FiniteDistribution):
        raise ParameterError("exact error needs a finite distribution")
    return err(D, g)


def best_in_class_err(D: FiniteDistribution, F: TabulatedClass) -> float:
    """``min_{f in F} err_D(f)`` by enumeration."""
    if len(F) == 0:
        raise ParameterError("F must be nonempty")
    wrong = F.matrix[:, D.x] != D.y[None, :]
    return float((wrong @ D.p).min())


def sample_dataset(D: FiniteDistribution, n: int, seed: int) -> Dataset:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return D.sample(n, seed)


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class BoostParams:
    """Boosting settings shared by every cell of a sweep.

    ``d`` and ``d_star`` default to the exact VC and dual VC dimension of the
    weak learner's class.
    """

    theta: float = 0.45
    delta: float = 0.1
    delta0: float = 0.5
    m0: int = 1
    d: int | None = None
    d_star: int | None = None
    budget: int = DEFAULT_BUDGET
    dedup: str = "exact_table"
    search: str = "exhaustive"

    def resolved(self, H: TabulatedClass) -> "BoostParams":
        d = self.d if self.d is not None else max(1, vc_dim(H).dimension)
        ds = self.d_star if self.d_star is not None else max(1, dual_vc_dim(H))
        return BoostParams(**(asdict(self) | {"d": d, "d_star": ds}))


@dataclass(frozen=True)
class ResultRow:
    n: int
    trial: int
    seed: int
    err_pop: float
    err_star: float
    excess: float
    bound_value: float
    weak_calls: int
    combos: int
    wall_ms: int = field(default=0, compare=False)


TIMING_COLUMNS = ("wall_ms",)


@dataclass
class ExperimentResult:
    rows: list[ResultRow]

    @staticmethod
    def columns(include_timing: bool = False) -> list[str]:
        return [f.name for f in fields(ResultRow) if include_timing or f.name not in TIMING_COLUMNS]

    def to_csv(self, include_timing: bool = False) -> str:
        """CSV text; wall-clock timing is left out unless asked for, keeping output reproducible."""
        cols = self.columns(include_timing)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, c) for c in cols)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ExperimentResult":
        types = {f.name: f.type for f in fields(ResultRow)}
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            kw = {}
            for k, v in rec.items():
                if k not in types:
                    raise ParameterError(f"unknown column {k!r}")
                kw[k] = float(v) if types[k] == "float" else int(v)
            rows.append(ResultRow(**kw))
        return cls(rows)

    def mean_excess(self) -> dict[int, float]:
        by_n: dict[int, list[float]] = {}
        for r in self.rows:
            by_n.setdefault(r.n, []).append(r.excess)
        return {n: float(np.mean(v)) for n, v in sorted(by_n.items())}


def run_cell(spec, F, H, params: BoostParams, n: int, trial: int, root: int):
    """One sweep cell: returns its :class:`ResultRow` and the full boosting result.

    ``params`` must already be resolved (see :meth:`BoostParams.resolved`).
    """
    seed = derive_seed(root, n, trial)
    start = time.perf_counter()
    D = make_distribution(spec, F)
    S = sample_dataset(D, n, derive_seed(seed, 0))
    res = agnostic_boost(
        S, params.delta, erm_weak_learner(H), params.delta0, params.m0, params.theta,
        params.d_star, derive_seed(seed, 1),
        budget=params.budget, dedup=params.dedup, search=params.search,
    )
    e = exact_population_err(D, res.voter)
    e_star = best_in_class_err(D, F)
    bound = main_theorem_bound(e_star, params.d, params.d_star, params.theta, n, params.delta)
    row = ResultRow(
        n=n, trial=trial, seed=seed, err_pop=e, err_star=e_star, excess=e - e_star,
        bound_value=float(bound.value), weak_calls=res.report.weak_calls,
        combos=res.report.combinations,
        wall_ms=int(round((time.perf_counter() - start) * 1000)),
    )
    return row, res


def _row(*args):
    return run_cell(*args)[0]


def run_curve(
    spec: SyntheticSpec,
    F: TabulatedClass,
    H: TabulatedClass,
    params: BoostParams,
    n_grid,
    trials: int,
    seed: int,
    workers: int = 1,
) -> ExperimentResult:
    """Boost on fresh samples for every ``(n, trial)`` and record exact errors.

    Rows come back ordered by ``(n, trial)`` whatever the worker count.
    """
    n_grid = [int(n) for n in n_grid]
    if trials < 0:
        raise ParameterError("trials must be >= 0")
    for n in n_grid:
        if n < 2 or n % 2:
            raise ParameterError(f"every n must be even and >= 2, got {n}")
    params = params.resolved(H)
    cells = [(n, t) for n in sorted(set(n_grid)) for t in range(trials)]
    args = [(spec, F, H, params, n, t, seed) for n, t in cells]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_row, *zip(*args)))
    else:
        rows = [_row(*a) for a in args]
    rows.sort(key=lambda r: (r.n, r.trial))
    return ExperimentResult(rows)


@dataclass(frozen=True)
class BoundCheck:
    rows: int
    violations: int
    delta: float | None = None

    @property
    def frequency(self) -> float:
        return self.violations / self.rows if self.rows else 0.0

    def within(self, slack: float = 0.1) -> bool:
        """Violation frequency at most ``delta + slack``."""
        if self.delta is None:
            raise ParameterError("delta unknown")
        return self.frequency <= self.delta + slack


def check_bound(result: ExperimentResult, delta: float | None = None) -> BoundCheck:
    """Count rows whose excess error exceeds the bound.

    Single violations are expected at rate ``delta``, so this reports rather
    than asserts.
    """
    bad = sum(r.excess > r.bound_value for r in result.rows)
    return BoundCheck(len(result.rows), bad, delta)
