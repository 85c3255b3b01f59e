"""Domain types and the loss, correlation and margin primitives.

Labels are the integers -1 and +1 and ``sign(0) = +1`` throughout.  Points
come in two flavours: finite-domain points are integer indices into a
declared domain, parametric points are real feature vectors.  Datasets store
them as numpy arrays (``int64`` of shape ``(n,)`` or ``float64`` of shape
``(n, r)``) and all indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .seeding import rng
from .errors import (
    EmptyDatasetError,
    IndexOutOfRangeError,
    ParameterError,
    RepresentationError,
)

MARGIN_ATOL = 1e-12
FINITE = "finite"
PARAMETRIC = "parametric"


def sign(a):
    """Elementwise sign with ``sign(0) = +1``; returns int8 for arrays."""
    if np.isscalar(a):
        return 1 if a >= 0 else -1
    return np.where(np.asarray(a) >= 0, 1, -1).astype(np.int8)


def _check_label(y):
    if y not in (-1, 1):
        raise ParameterError(f"label must be -1 or +1, got {y!r}")
    return int(y)


@dataclass(frozen=True)
class Point:
    """A single input point; exactly one of ``index`` or ``features`` is set."""

    index: int | None = None
    features: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.index is None) == (self.features is None):
            raise ParameterError("a Point needs exactly one of index or features")
        if self.index is not None and self.index < 0:
            raise ParameterError(f"domain index must be >= 0, got {self.index}")


@dataclass(frozen=True)
class Example:
    point: Point
    label: int

    def __post_init__(self):
        _check_label(self.label)


# --------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True)
class Tabulated:
    """A hypothesis given by its value vector over a finite domain."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise ParameterError("a tabulated hypothesis needs a nonempty domain")
        if any(v not in (-1, 1) for v in vals):
            raise ParameterError("tabulated values must all be -1 or +1")
        object.__setattr__(self, "values", vals)

    @property
    def domain_size(self) -> int:
        return len(self.values)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int8)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 1 or not np.issubdtype(X.dtype, np.integer):
            raise RepresentationError("tabulated hypotheses need finite-domain indices")
        if X.size and (X.min() < 0 or X.max() >= self.domain_size):
            raise RepresentationError(
                f"domain index out of range for domain of size {self.domain_size}"
            )
        return self.array[X]

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def to_json(self):
        return {"kind": "tabulated", "values": list(self.values)}


@dataclass(frozen=True)
class Stump:
    """``polarity * sign(x[feature] - threshold)``; thresholds may be +-inf."""

    feature: int
    threshold: float
    polarity: int = 1

    def __post_init__(self):
        if self.feature < 0:
            raise ParameterError("feature index must be >= 0")
        _check_label(self.polarity)
        object.__setattr__(self, "threshold", float(self.threshold))

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 2 or not np.issubdtype(X.dtype, np.floating):
            raise RepresentationError("stumps need parametric (real feature) points")
        if self.feature >= X.shape[1]:
            raise RepresentationError(
                f"stump uses feature {self.feature} but points have {X.shape[1]}"
            )
        with np.errstate(invalid="ignore"):
            out = sign(X[:, self.feature] - self.threshold)
        return out if self.polarity == 1 else -out

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def to_json(self):
        return {
            "kind": "stump",
            "feature": self.feature,
            "threshold": _float_to_json(self.threshold),
            "polarity": self.polarity,
        }


Hypothesis = Union[Tabulated, Stump]


def _float_to_json(v: float):
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def hypothesis_from_json(obj) -> Hypothesis:
    kind = obj.get("kind", "tabulated")
    if kind == "tabulated":
        return Tabulated(tuple(obj["values"]))
    if kind == "stump":
        return Stump(int(obj["feature"]), float(obj["threshold"]), int(obj["polarity"]))
    raise ParameterError(f"unknown hypothesis kind {kind!r}")


def _point_array(h: Hypothesis, x):
    """Turn a single point into the one-row array the backend expects."""
    if isinstance(x, Point):
        x = x.index if x.index is not None else x.features
    if isinstance(h, Tabulated):
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return np.array([x], dtype=np.int64)
        raise RepresentationError("tabulated hypotheses are evaluated at domain indices")
    if isinstance(x, (int, np.integer)):
        raise RepresentationError("stumps are evaluated at feature vectors")
    return np.asarray(x, dtype=np.float64).reshape(1, -1)


def evaluate(h: Hypothesis, x) -> int:
    """Value of ``h`` at a single point, in {-1, +1}."""
    return int(h.predict(_point_array(h, x))[0])


# --------------------------------------------------------------------------
# finite classes


class TabulatedClass:
    """An ordered finite class stored as a ``(k, domain_size)`` int8 matrix.

    Duplicated rows are allowed.  ``hypotheses[i]`` returns the same
    :class:`Tabulated` object every time.
    """

    def __init__(self, domain_size: int, rows):
        matrix = np.array(rows, dtype=np.int8)
        if matrix.ndim == 1 and matrix.size == 0:
            matrix = matrix.reshape(0, domain_size)
        if matrix.ndim != 2 or matrix.shape[1] != domain_size:
            raise ParameterError(
                f"class rows must all have length domain_size={domain_size}"
            )
        if domain_size < 1:
            raise ParameterError("domain_size must be >= 1")
        if not np.all(np.abs(matrix) == 1):
            raise ParameterError("class values must all be -1 or +1")
        matrix.setflags(write=False)
        self.domain_size = int(domain_size)
        self.matrix = matrix

    @classmethod
    def from_hypotheses(cls, hypotheses: Sequence[Tabulated], domain_size=None):
        if domain_size is None:
            if not hypotheses:
                raise ParameterError("domain_size required for an empty class")
            domain_size = hypotheses[0].domain_size
        return cls(domain_size, [h.values for h in hypotheses])

    @classmethod
    def full(cls, domain_size: int) -> "TabulatedClass":
        """All ``2**domain_size`` functions; row ``k`` is -1 exactly on the set bits of ``k``."""
        if domain_size > 20:
            raise ParameterError("full class limited to domain_size <= 20")
        k = np.arange(2**domain_size)[:, None]
        bits = (k >> np.arange(domain_size)[None, :]) & 1
        return cls(domain_size, 1 - 2 * bits)

    @classmethod
    def thresholds(cls, domain_size: int) -> "TabulatedClass":
        """One-dimensional thresholds with both polarities on points 0..N-1.

        Row ``2t`` is +1 on points ``>= t`` (t = 0..N); row ``2t + 1`` is its negation.
        """
        rows = []
        pts = np.arange(domain_size)
        for t in range(domain_size + 1):
            up = np.where(pts >= t, 1, -1)
            rows.append(up)
            rows.append(-up)
        return cls(domain_size, rows)

    def __len__(self):
        return self.matrix.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, TabulatedClass)
            and self.domain_size == other.domain_size
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self):
        return f"TabulatedClass(domain_size={self.domain_size}, size={len(self)})"

    @cached_property
    def hypotheses(self) -> tuple[Tabulated, ...]:
        return tuple(Tabulated(tuple(int(v) for v in row)) for row in self.matrix)

    def deduplicated(self) -> "TabulatedClass":
        _, first = np.unique(self.matrix, axis=0, return_index=True)
        return TabulatedClass(self.domain_size, self.matrix[np.sort(first)])

    def to_json(self):
        return {"domain_size": self.domain_size, "hypotheses": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj) -> "TabulatedClass":
        return cls(int(obj["domain_size"]), obj["hypotheses"])


# --------------------------------------------------------------------------
# data


class Dataset:
    """An ordered sequence of labelled points; duplicates are allowed."""

    __slots__ = ("x", "y", "kind", "domain_size")

    def __init__(self, x, y, kind: str | None = None, domain_size: int | None = None):
        y = np.asarray(y, dtype=np.int8).reshape(-1)
        if y.size and not np.all(np.abs(y) == 1):
            raise ParameterError("labels must be -1 or +1")
        x = np.asarray(x)
        if kind is None:
            kind = PARAMETRIC if x.ndim == 2 else FINITE
        if kind == FINITE:
            x = x.astype(np.int64).reshape(-1)
            if x.size and x.min() < 0:
                raise ParameterError("domain indices must be >= 0")
            if domain_size is not None and x.size and x.max() >= domain_size:
                raise ParameterError(f"domain index >= domain_size={domain_size}")
        elif kind == PARAMETRIC:
            x = x.astype(np.float64)
            if x.ndim == 1:
                x = x.reshape(len(y), -1) if len(y) else x.reshape(0, 0)
            if x.ndim != 2:
                raise ParameterError("parametric points must form an (n, r) array")
        else:
            raise ParameterError(f"unknown dataset kind {kind!r}")
        if x.shape[0] != y.shape[0]:
            raise ParameterError("points and labels differ in length")
        x.setflags(write=False)
        y.setflags(write=False)
        self.x = x
        self.y = y
        self.kind = kind
        self.domain_size = domain_size

    @classmethod
    def finite(cls, xs, ys, domain_size=None):
        return cls(np.asarray(xs, dtype=np.int64).reshape(-1), ys, FINITE, domain_size)

    @classmethod
    def parametric(cls, X, ys):
        return cls(np.asarray(X, dtype=np.float64), ys, PARAMETRIC)

    @classmethod
    def from_examples(cls, examples: Iterable[Example], domain_size=None):
        examples = list(examples)
        if not examples:
            raise EmptyDatasetError("cannot infer a representation from no examples")
        ys = [e.label for e in examples]
        if examples[0].point.index is not None:
            return cls.finite([e.point.index for e in examples], ys, domain_size)
        return cls.parametric([e.point.features for e in examples], ys)

    def __len__(self):
        return int(self.y.shape[0])

    def __getitem__(self, i) -> Example:
        if self.kind == FINITE:
            p = Point(index=int(self.x[i]))
        else:
            p = Point(features=tuple(float(v) for v in self.x[i]))
        return Example(p, int(self.y[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.kind == other.kind
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
        )

    def __repr__(self):
        return f"Dataset(kind={self.kind!r}, n={len(self)})"

    def _take(self, idx) -> "Dataset":
        return Dataset(self.x[idx], self.y[idx], self.kind, self.domain_size)

    def halves(self) -> tuple["Dataset", "Dataset"]:
        """First and second half, in order; the length must be even."""
        n = len(self)
        if n % 2:
            raise ParameterError(f"cannot split a dataset of odd length {n} into halves")
        return self._take(slice(0, n // 2)), self._take(slice(n // 2, n))


@dataclass(frozen=True)
class FiniteDistribution:
    """Explicit probability table over (domain index, label) atoms."""

    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    domain_size: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64).reshape(-1)
        y = np.asarray(self.y, dtype=np.int8).reshape(-1)
        p = np.asarray(self.p, dtype=np.float64).reshape(-1)
        if not (x.shape == y.shape == p.shape) or x.size == 0:
            raise ParameterError("atoms need matching nonempty x, y, p")
        if x.min() < 0 or x.max() >= self.domain_size:
            raise ParameterError("atom points must lie in the declared domain")
        if not np.all(np.abs(y) == 1):
            raise ParameterError("atom labels must be -1 or +1")
        if np.any(p < 0) or np.any(p > 1) or abs(p.sum() - 1.0) > 1e-12:
            raise ParameterError("atom probabilities must lie in [0,1] and sum to 1")
        for a in (x, y, p):
            a.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_json(cls, obj, domain_size=None):
        atoms = obj["atoms"]
        xs = [a["x"] for a in atoms]
        if domain_size is None:
            domain_size = int(obj.get("domain_size", max(xs) + 1))
        return cls(xs, [a["y"] for a in atoms], [a["p"] for a in atoms], domain_size)

    def sample(self, n: int, seed: int) -> "Dataset":
        """``n`` i.i.d. draws by inverse CDF over the atoms, deterministic per seed."""
        if n < 0:
            raise ParameterError("sample size must be >= 0")
        cdf = np.cumsum(self.p)
        u = rng(seed).random(n)
        idx = np.minimum(np.searchsorted(cdf, u, side="right"), self.p.size - 1)
        # zero-mass atoms can only be hit through the clip above
        idx = np.where(self.p[idx] > 0, idx, np.flatnonzero(self.p > 0)[-1])
        return Dataset.finite(self.x[idx], self.y[idx], self.domain_size)

    def to_json(self):
        return {
            "domain_size": self.domain_size,
            "atoms": [
                {"x": int(a), "y": int(b), "p": float(c)}
                for a, b, c in zip(self.x, self.y, self.p)
            ],
        }


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Weights over the positions of a dataset."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "EmpiricalDistribution":
        return cls(np.full(n, 1.0 / n))


# --------------------------------------------------------------------------
# voters


def _stack_predictions(hypotheses, X) -> np.ndarray:
    return np.stack([h.predict(X) for h in hypotheses]).astype(np.int64)


class VotingClassifier:
    """Sign of the unweighted average of ``T`` member hypotheses.

    Members are stored as distinct hypotheses plus a member-to-distinct index
    vector, so a voter with a million repeated members stays cheap.
    Evaluation sums integer votes, so the raw average is exact.
    """

    def __init__(self, members: Sequence[Hypothesis] = (), *, distinct=None, index=None):
        if distinct is None:
            members = list(members)
            pos: dict = {}
            distinct, idx = [], []
            for h in members:
                if h not in pos:
                    pos[h] = len(distinct)
                    distinct.append(h)
                idx.append(pos[h])
            index = np.asarray(idx, dtype=np.int64)
        else:
            index = np.asarray(index, dtype=np.int64).reshape(-1)
        if index.size == 0:
            raise EmptyDatasetError("a voting classifier needs at least one member")
        self.distinct = tuple(distinct)
        self.index = index
        self.index.setflags(write=False)
        self.counts = np.bincount(index, minlength=len(self.distinct))

    @property
    def T(self) -> int:
        return int(self.index.size)

    @property
    def members(self) -> tuple[Hypothesis, ...]:
        return tuple(self.distinct[i] for i in self.index)

    def vote_sum(self, X) -> np.ndarray:
        """Integer sum of member predictions at each point."""
        P = _stack_predictions(self.distinct, X)
        return self.counts @ P

    def score(self, X) -> np.ndarray:
        return self.vote_sum(X) / self.T

    def predict(self, X) -> np.ndarray:
        return sign(self.vote_sum(X))

    def __repr__(self):
        return f"VotingClassifier(T={self.T}, distinct={len(self.distinct)})"

    def to_json(self):
        return {"T": self.T, "members": [h.to_json() for h in self.members]}

    @classmethod
    def from_json(cls, obj) -> "VotingClassifier":
        members = [hypothesis_from_json(m.get("hypothesis", m)) for m in obj["members"]]
        return cls(members)


@dataclass(frozen=True)
class WeightedVoter:
    """Convex combination of hypotheses; weights are >= 0 and sum to 1."""

    hypotheses: tuple[Hypothesis, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if len(self.hypotheses) != w.size or w.size == 0:
            raise ParameterError("need one weight per hypothesis and at least one pair")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ParameterError("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "weights", w)

    def score(self, X) -> np.ndarray:
        return self.weights @ _stack_predictions(self.hypotheses, X)

    def predict(self, X) -> np.ndarray:
        return sign(self.score(X))

    def to_json(self):
        return {
            "members": [
                {"hypothesis": h.to_json(), "weight": float(w)}
                for h, w in zip(self.hypotheses, self.weights)
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "WeightedVoter":
        hs = tuple(hypothesis_from_json(m["hypothesis"]) for m in obj["members"])
        return cls(hs, [m["weight"] for m in obj["members"]])


def evaluate_voter(v: VotingClassifier, x) -> tuple[int, float]:
    """Label and raw average of ``v`` at a single point."""
    X = _point_array(v.distinct[0], x)
    s = int(v.vote_sum(X)[0])
    return sign(s), s / v.T


# --------------------------------------------------------------------------
# losses


Sample = Union[Dataset, FiniteDistribution]


def _masses(S: Sample):
    """Points, labels and per-row probability masses of a sample."""
    if isinstance(S, FiniteDistribution):
        return S.x, S.y, S.p
    if len(S) == 0:
        raise EmptyDatasetError("empirical quantities need a nonempty dataset")
    return S.x, S.y, None


def _mean(values, p):
    if p is None:
        return float(np.mean(values))
    return float(np.dot(p, values))


def err(S: Sample, g) -> float:
    """Misclassification mass of the ±1 classifier ``g`` under ``S``."""
    x, y, p = _masses(S)
    return _mean(g.predict(x) != y, p)


def corr(S: Sample, g) -> float:
    """Correlation ``E[y g(x)]`` of a ±1 classifier."""
    x, y, p = _masses(S)
    return _mean(y.astype(np.int64) * g.predict(x), p)


def margins(S: Sample, g) -> np.ndarray:
    """``y * g(x)`` per example, using ``g.score`` when the classifier has one."""
    x, y, _ = _masses(S)
    f = getattr(g, "score", None) or g.predict
    return y * np.asarray(f(x), dtype=np.float64)


def margin_loss(S: Sample, g, lam: float) -> float:
    """Fraction (or mass) of examples with ``y g(x) <= lam``."""
    if lam < 0:
        raise ParameterError("margin level must be >= 0")
    _, _, p = _masses(S)
    return _mean(margins(S, g) <= lam + MARGIN_ATOL, p)


def restrict(S: Dataset, I) -> Dataset:
    """Subsequence ``(S[I[0]], S[I[1]], ...)`` with 0-based indices."""
    I = np.asarray(I, dtype=np.int64).reshape(-1)
    if I.size and (I.min() < 0 or I.max() >= len(S)):
        bad = int(I[(I < 0) | (I >= len(S))][0])
        raise IndexOutOfRangeError(f"index {bad} outside [0, {len(S)})")
    return S._take(I)
