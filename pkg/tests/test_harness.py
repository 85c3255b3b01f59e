import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agnoboost.booster import agnostic_boost
from agnoboost.bounds import weak_call_count
from agnoboost.core import FiniteDistribution, Tabulated, TabulatedClass, corr
from agnoboost.errors import ParameterError
from agnoboost.harness import (
    BoostParams,
    ExperimentResult,
    SyntheticSpec,
    best_in_class_err,
    check_bound,
    exact_population_err,
    make_distribution,
    run_curve,
    sample_dataset,
)
from agnoboost.weak_learners import erm_weak_learner

F4 = TabulatedClass.full(4)


class TestSpec:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(domain_size=0, target_index=0),
            dict(domain_size=4, target_index=0, eta=0.5),
            dict(domain_size=4, target_index=0, eta=-0.1),
            dict(domain_size=2, target_index=0, marginal=(0.5, 0.6)),
            dict(domain_size=2, target_index=0, marginal=(1.0,)),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            SyntheticSpec(**kw)

    def test_target_range(self):
        with pytest.raises(ParameterError):
            make_distribution(SyntheticSpec(4, 16), F4)
        with pytest.raises(ParameterError):
            make_distribution(SyntheticSpec(3, 0), F4)

    def test_json(self):
        s = SyntheticSpec(3, 2, 0.1, (0.2, 0.3, 0.5))
        assert SyntheticSpec.from_json(s.to_json()) == s


class TestDistribution:
    def test_realizable(self):
        D = make_distribution(SyntheticSpec(4, 6), F4)
        assert best_in_class_err(D, F4) == 0

    def test_noise_rate(self):
        D = make_distribution(SyntheticSpec(4, 6, 0.1), F4)
        f = F4.hypotheses[6]
        assert exact_population_err(D, f) == pytest.approx(0.1, abs=1e-15)
        assert exact_population_err(D, Tabulated(tuple(-v for v in f.values))) == pytest.approx(0.9, abs=1e-15)

    @given(st.integers(0, 15), st.floats(0.0, 0.49), st.lists(st.integers(1, 9), min_size=4, max_size=4))
    def test_best_in_class_equals_noise(self, t, eta, m):
        marg = tuple(np.asarray(m) / sum(m))
        D = make_distribution(SyntheticSpec(4, t, eta, marg), F4)
        assert best_in_class_err(D, F4) == pytest.approx(eta, abs=1e-12)

    def test_best_in_class_restricted(self):
        D = make_distribution(SyntheticSpec(4, 5, 0.1), F4)
        H = TabulatedClass(4, [F4.matrix[0], F4.matrix[1]])
        brute = min(exact_population_err(D, h) for h in H.hypotheses)
        assert best_in_class_err(D, H) == pytest.approx(brute, abs=1e-15)

    @given(st.integers(0, 15), st.floats(0.0, 0.49), st.lists(st.sampled_from([-1, 1]), min_size=4, max_size=4))
    def test_error_correlation_identity(self, t, eta, vals):
        D = make_distribution(SyntheticSpec(4, t, eta), F4)
        h = Tabulated(tuple(vals))
        e = exact_population_err(D, h)
        assert 0 <= e <= 1
        assert e == pytest.approx((1 - corr(D, h)) / 2, abs=1e-12)

    def test_monte_carlo_cross_check(self):
        D = make_distribution(SyntheticSpec(4, 9, 0.15), F4)
        res = agnostic_boost(D.sample(8, 4), 0.1, erm_weak_learner(F4), 0.5, 1, 0.45, 2, 4)
        exact = exact_population_err(D, res.voter)
        draws = sample_dataset(D, 100_000, 123)
        mc = np.mean(res.voter.predict(draws.x) != draws.y)
        sigma = np.sqrt(exact * (1 - exact) / 100_000)
        assert abs(mc - exact) <= 3 * sigma + 1e-12

    def test_requires_finite_distribution(self):
        with pytest.raises(ParameterError):
            exact_population_err(F4, F4.hypotheses[0])


class TestSampling:
    def test_point_mass(self):
        D = FiniteDistribution([2], [-1], [1.0], 4)
        S = sample_dataset(D, 5, 0)
        assert S.x.tolist() == [2] * 5 and S.y.tolist() == [-1] * 5

    def test_replay(self):
        D = make_distribution(SyntheticSpec(4, 3, 0.2), F4)
        assert sample_dataset(D, 30, 8) == sample_dataset(D, 30, 8)

    def test_label_frequency(self):
        D = make_distribution(SyntheticSpec(4, 0, 0.25), F4)
        S = sample_dataset(D, 100_000, 2)
        assert 0.24 <= np.mean(S.y == -1) <= 0.26

    def test_n_positive(self):
        with pytest.raises(ParameterError):
            sample_dataset(FiniteDistribution([0], [1], [1.0], 1), 0, 0)


class TestRunCurve:
    params = BoostParams(theta=0.45, delta=0.1, delta0=0.5, m0=1)

    def test_realizable_zero_excess(self):
        res = run_curve(SyntheticSpec(4, 0, 0.0), F4, F4, self.params, [8, 16], 3, 1)
        assert len(res.rows) == 6
        assert all(r.excess == 0 for r in res.rows)

    def test_no_trials(self):
        res = run_curve(SyntheticSpec(4, 0, 0.1), F4, F4, self.params, [8], 0, 1)
        assert res.rows == []
        assert res.to_csv() == "n,trial,seed,err_pop,err_star,excess,bound_value,weak_calls,combos\n"

    def test_rows_and_invariants(self):
        res = run_curve(SyntheticSpec(4, 6, 0.15), F4, F4, self.params, [16, 8], 4, 3)
        assert [(r.n, r.trial) for r in res.rows] == [(n, t) for n in (8, 16) for t in range(4)]
        for r in res.rows:
            assert r.excess == pytest.approx(r.err_pop - r.err_star, abs=1e-12)
            assert r.weak_calls == weak_call_count(r.n, 1, 0.45, 0.1, 0.5)

    def test_reproducible_and_replayable(self):
        spec = SyntheticSpec(4, 6, 0.15)
        a = run_curve(spec, F4, F4, self.params, [8], 3, 5).to_csv()
        b = run_curve(spec, F4, F4, self.params, [8], 3, 5).to_csv()
        assert a == b
        # each cell has its own seed, so rows do not depend on the rest of the grid
        wider = run_curve(spec, F4, F4, self.params, [8, 16], 3, 5)
        assert [r for r in wider.rows if r.n == 8] == ExperimentResult.from_csv(a).rows

    def test_csv_round_trip(self):
        res = run_curve(SyntheticSpec(4, 6, 0.15), F4, F4, self.params, [8], 2, 5)
        back = ExperimentResult.from_csv(res.to_csv(include_timing=True))
        assert back.rows == res.rows
        assert "wall_ms" in res.to_csv(include_timing=True).splitlines()[0]

    def test_rejects_odd_n(self):
        with pytest.raises(ParameterError):
            run_curve(SyntheticSpec(4, 0), F4, F4, self.params, [7], 1, 0)

    def test_check_bound(self):
        res = run_curve(SyntheticSpec(4, 6, 0.15), F4, F4, self.params, [8], 2, 5)
        chk = check_bound(res, 0.1)
        assert chk.rows == 2 and chk.violations == 0 and chk.within()
        rows = [r.__class__(**{**r.__dict__, "bound_value": -1.0}) for r in res.rows]
        assert check_bound(ExperimentResult(rows)).violations == 2

    def test_resolves_dimensions(self):
        p = self.params.resolved(F4)
        assert (p.d, p.d_star) == (4, 2)
