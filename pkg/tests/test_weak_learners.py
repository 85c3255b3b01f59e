import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agnoboost.core import Dataset, FiniteDistribution, Stump, Tabulated, TabulatedClass, corr
from agnoboost.errors import EmptyDatasetError, ParameterError, RepresentationError
from agnoboost.weak_learners import (
    ConstantWeakLearner,
    WeakLearnerParams,
    check_weak_guarantee,
    erm_slack,
    erm_weak_learner,
    faulty_weak_learner,
    stump_weak_learner,
)

labels = st.sampled_from([-1, 1])


class TestParams:
    def test_theta(self):
        assert WeakLearnerParams(0.8, 0.2, 0.1, 5).theta == pytest.approx(0.3)

    @pytest.mark.parametrize(
        "args",
        [(0.0, 0.0, 0.1, 1), (1.2, 0.0, 0.1, 1), (0.5, 0.5, 0.1, 1), (0.5, 0.1, 0.0, 1), (0.5, 0.1, 0.1, 0)],
    )
    def test_invalid(self, args):
        with pytest.raises(ParameterError):
            WeakLearnerParams(*args)


class TestERM:
    def test_realizable(self):
        H = TabulatedClass.full(3)
        target = H.hypotheses[3]
        S = Dataset.finite([0, 1, 2, 1], [target(x) for x in (0, 1, 2, 1)], 3)
        assert corr(S, erm_weak_learner(H)(S, 0)) == 1

    def test_single_example(self):
        H = TabulatedClass(1, [[1], [-1]])
        assert erm_weak_learner(H)(Dataset.finite([0], [1], 1), 0).values == (1,)

    def test_lowest_index_tie(self):
        rows = [[-1, -1], [-1, -1], [1, -1], [-1, -1], [-1, -1], [1, -1]]
        H = TabulatedClass(2, rows)
        S = Dataset.finite([0], [1], 2)
        assert erm_weak_learner(H).best_index(S) == 2

    def test_empty_class(self):
        with pytest.raises(EmptyDatasetError):
            erm_weak_learner(TabulatedClass(2, np.empty((0, 2))))

    def test_needs_finite_data(self):
        with pytest.raises(RepresentationError):
            erm_weak_learner(TabulatedClass.full(2))(Dataset.parametric([[0.0]], [1]), 0)

    @given(
        st.lists(st.lists(labels, min_size=4, max_size=4), min_size=1, max_size=12),
        st.lists(st.tuples(st.integers(0, 3), labels), min_size=1, max_size=8),
        st.integers(0, 2**64 - 1),
    )
    def test_maximises_sample_correlation(self, rows, sample, seed):
        H = TabulatedClass(4, rows)
        S = Dataset.finite([x for x, _ in sample], [y for _, y in sample], 4)
        W = erm_weak_learner(H)
        h = W(S, seed)
        assert all(corr(S, h) >= corr(S, g) for g in H.hypotheses)
        assert W(S, seed) is h


def stump_grid(X):
    """Every candidate stump, independently enumerated."""
    for f in range(X.shape[1]):
        v = sorted(set(X[:, f].tolist()))
        ts = [-np.inf] + [(a + b) / 2 for a, b in zip(v, v[1:])] + [np.inf]
        for t in ts:
            for p in (-1, 1):
                yield Stump(f, t, p)


class TestStump:
    def test_two_points(self):
        S = Dataset.parametric([[0.0], [1.0]], [-1, 1])
        h = stump_weak_learner()(S, 0)
        assert h == Stump(0, 0.5, 1)
        assert corr(S, h) == 1

    def test_all_positive(self):
        S = Dataset.parametric([[0.0, 5.0], [1.0, 2.0]], [1, 1])
        h = stump_weak_learner()(S, 0)
        assert h == Stump(0, -np.inf, 1)
        assert corr(S, h) == 1

    def test_alternating(self):
        S = Dataset.parametric([[0.0], [1.0], [2.0], [3.0]], [1, -1, 1, -1])
        h = stump_weak_learner()(S, 0)
        assert corr(S, h) == 0.5
        assert max(corr(S, g) for g in stump_grid(S.x)) == 0.5

    def test_rejects_finite_data(self):
        with pytest.raises(RepresentationError):
            stump_weak_learner()(Dataset.finite([0], [1]), 0)
        with pytest.raises(EmptyDatasetError):
            stump_weak_learner()(Dataset.parametric(np.empty((0, 1)), []), 0)

    @given(
        st.integers(1, 10).flatmap(
            lambda n: st.tuples(
                st.lists(
                    st.lists(st.integers(-3, 3).map(float), min_size=2, max_size=2),
                    min_size=n, max_size=n,
                ),
                st.lists(labels, min_size=n, max_size=n),
            )
        )
    )
    def test_matches_exhaustive_scan(self, data):
        X, y = data
        S = Dataset.parametric(X, y)
        h = stump_weak_learner()(S, 0)
        cands = list(stump_grid(S.x))
        best = max(corr(S, g) for g in cands)
        assert corr(S, h) == best
        first = min(
            (g for g in cands if corr(S, g) == best),
            key=lambda g: (g.feature, g.threshold, g.polarity),
        )
        assert h == first


class TestFaulty:
    S = Dataset.finite([0, 1], [1, -1], 2)
    H = TabulatedClass.full(2)
    bad = Tabulated((-1, 1))

    def test_never_fails(self):
        W = faulty_weak_learner(erm_weak_learner(self.H), 0.0, self.bad)
        assert all(W(self.S, s) == Tabulated((1, -1)) for s in range(200))

    def test_always_fails(self):
        W = faulty_weak_learner(erm_weak_learner(self.H), 1.0, self.bad)
        assert all(W(self.S, s) == self.bad for s in range(200))

    def test_failure_frequency(self):
        W = faulty_weak_learner(erm_weak_learner(self.H), 0.5, self.bad)
        rate = np.mean([W.fails(s) for s in range(10_000)])
        assert 0.47 <= rate <= 0.53

    def test_deterministic(self):
        W = faulty_weak_learner(erm_weak_learner(self.H), 0.5, self.bad)
        assert [W(self.S, s) for s in range(50)] == [W(self.S, s) for s in range(50)]

    def test_range(self):
        with pytest.raises(ParameterError):
            faulty_weak_learner(erm_weak_learner(self.H), 1.5, self.bad)


class TestCheckGuarantee:
    params = WeakLearnerParams(1.0, 0.0, 0.1, 3)

    def test_point_mass_correct(self):
        D = FiniteDistribution([1], [-1], [1.0], 3)
        W = erm_weak_learner(TabulatedClass.full(3))
        assert check_weak_guarantee(W, TabulatedClass.full(3), D, self.params, 50, 0) == 0

    def test_constant_wrong(self):
        D = FiniteDistribution([1], [-1], [1.0], 3)
        W = ConstantWeakLearner(Tabulated((1, 1, 1)))
        assert check_weak_guarantee(W, TabulatedClass.full(3), D, self.params, 50, 0) == 1

    def test_needs_finite_distribution(self):
        W = erm_weak_learner(TabulatedClass.full(2))
        with pytest.raises(ParameterError):
            check_weak_guarantee(W, TabulatedClass.full(2), Dataset.finite([0], [1]), self.params, 5, 0)

    def test_slack_formula(self):
        assert erm_slack(16, 200, 0.1) == pytest.approx(2 * np.sqrt(2 * np.log(320) / 200))

    def test_erm_within_slack(self):
        H = TabulatedClass.thresholds(5)
        rnd = np.random.default_rng(3)
        p = rnd.random(10)
        D = FiniteDistribution(
            list(itertools.chain.from_iterable((x, x) for x in range(5))),
            [1, -1] * 5, p / p.sum(), 5,
        )
        m0, d0 = 60, 0.2
        params = WeakLearnerParams(1.0, min(0.99, erm_slack(len(H), m0, d0)), d0, m0)
        rate = check_weak_guarantee(erm_weak_learner(H), H, D, params, 200, 1)
        assert rate <= d0 + 3 * np.sqrt(d0 * (1 - d0) / 200)
