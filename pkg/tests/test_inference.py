import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from bbbvpa.gibbs import Chain
from bbbvpa.inference import bayes_estimate, credible_interval, summarize


def contained(draws, lo, hi):
    d = np.asarray(draws)
    return int(np.count_nonzero((d >= lo) & (d <= hi)))


class TestBayesEstimate:
    def test_constant_chain(self):
        row = [0.3, 0.4, 0.6, 0.7, 1.7, 1.2, 1.4]
        est = bayes_estimate(Chain(np.tile(row, (5, 1))))
        assert_allclose(est.as_array(), row)

    def test_two_draws(self):
        est = bayes_estimate(Chain(np.array([[1.0] * 7, [3.0] * 7])))
        assert_allclose(est.as_array(), 2.0)

    def test_empty_chain(self):
        with pytest.raises(ValueError):
            bayes_estimate(Chain(np.empty((0, 7))))


class TestCredibleInterval:
    def test_tie_goes_to_first_window(self):
        assert credible_interval(np.arange(1.0, 11.0), 0.2) == (1.0, 9.0)

    def test_outlier_excluded(self):
        d = np.arange(1.0, 11.0)
        d[-1] = 100.0
        assert credible_interval(d, 0.2) == (1.0, 9.0)

    def test_standard_normal(self):
        x = np.random.default_rng(0).standard_normal(100_000)
        lo, hi = credible_interval(x, 0.05)
        assert abs(lo + 1.96) < 0.05 and abs(hi - 1.96) < 0.05
        # same-draw quantile oracle
        assert abs(lo - np.quantile(x, 0.025)) < 0.05
        assert abs(hi - np.quantile(x, 0.975)) < 0.05

    def test_content_on_random_sets(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            m = int(rng.integers(20, 400))
            gamma = float(rng.uniform(0.01, 0.5))
            d = rng.standard_normal(m) * rng.uniform(0.1, 5)
            k = int(np.floor(m * gamma))
            if k < 1:
                continue
            lo, hi = credible_interval(d, gamma)
            # the window spans sorted positions j .. j + M - K: M - K gaps,
            # M - K + 1 draws including both endpoints
            assert np.count_nonzero((d >= lo) & (d < hi)) == m - k
            assert contained(d, lo, hi) == m - k + 1
            s = np.sort(d)
            assert hi - lo == pytest.approx(min(s[j + m - k] - s[j] for j in range(k)), abs=0)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        d = rng.gamma(2.0, size=500)
        assert credible_interval(d, 0.1) == credible_interval(rng.permutation(d), 0.1)

    def test_monotone_in_gamma(self):
        d = np.random.default_rng(3).standard_cauchy(2000)
        widths = [np.subtract(*credible_interval(d, g)[::-1]) for g in (0.01, 0.05, 0.1, 0.2, 0.4)]
        assert all(b <= a for a, b in zip(widths, widths[1:]))

    @pytest.mark.parametrize("draws,gamma", [([1.0], 0.5), ([1.0, 2.0, 3.0], 0.1), ([1.0, 2.0], 0.0)])
    def test_too_few(self, draws, gamma):
        with pytest.raises(ValueError):
            credible_interval(draws, gamma)


def test_summarize_matches_parts():
    rng = np.random.default_rng(4)
    chain = Chain(rng.gamma(3.0, size=(400, 7)))
    out = summarize(chain, 0.05)
    assert [s.param for s in out][:2] == ["mu1", "mu2"]
    for i, s in enumerate(out):
        assert s.point == chain.draws.mean(axis=0)[i]
        assert (s.lo, s.hi) == credible_interval(chain.draws[:, i], 0.05)
        assert s.lo <= s.hi and s.contains(s.lo)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=10, max_size=300),
    st.floats(0.1, 0.9),
)
def test_interval_properties(draws, gamma):
    lo, hi = credible_interval(draws, gamma)
    s = np.sort(draws)
    k = int(np.floor(len(s) * gamma))
    assert lo <= hi
    assert lo in s and hi in s
    assert hi - lo == min(s[j + len(s) - k] - s[j] for j in range(k))
    assert credible_interval(draws[::-1], gamma) == (lo, hi)
