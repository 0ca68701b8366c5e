import math

import numpy as np
import pytest
from scipy import stats

from bbbvpa.errors import ConfigError, SamplerStuckError
from bbbvpa.slice import SliceConfig, slice_step_modified, slice_step_standard

from _oracles import effective_sample_size


def normal_kernel(x):
    return -0.5 * x * x


def gamma_kernel(x):
    # Gamma(shape=2, scale=3)
    return math.log(x) - x / 3.0 if x > 0 else None


def two_piece_flat(x):
    return 0.0 if (0.0 <= x <= 1.0 or 2.0 <= x <= 3.0) else None


def run(step, f, x0, n, seed, cfg=SliceConfig()):
    rng = np.random.default_rng(seed)
    out = np.empty(n)
    x = x0
    for i in range(n):
        x = step(x, f, rng, cfg)
        out[i] = x
    return out


class TestConfig:
    def test_defaults(self):
        cfg = SliceConfig()
        assert (cfg.width, cfg.max_stepout, cfg.max_shrink) == (1.0, 100, 1000)

    @pytest.mark.parametrize("kwargs", [{"width": 0.0}, {"max_stepout": 0}, {"max_shrink": 0},
                                        {"max_redraw": -1}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            SliceConfig(**kwargs)


class TestStandard:
    def test_normal_moments(self):
        x = run(slice_step_standard, normal_kernel, 0.0, 10_000, 1)
        se = x.std() / math.sqrt(effective_sample_size(x))
        assert abs(x.mean()) < 3 * se
        assert abs(x.var() - 1.0) < 0.1

    def test_gamma_mean(self):
        x = run(slice_step_standard, gamma_kernel, 6.0, 10_000, 2)
        se = x.std() / math.sqrt(effective_sample_size(x))
        assert abs(x.mean() - 6.0) < 3 * se

    def test_returns_defined_points(self):
        x = run(slice_step_standard, gamma_kernel, 1.0, 2000, 3)
        assert np.all(x > 0)

    def test_deterministic(self):
        a = run(slice_step_standard, normal_kernel, 0.0, 200, 9)
        b = run(slice_step_standard, normal_kernel, 0.0, 200, 9)
        assert np.array_equal(a, b)

    def test_undefined_start_raises(self):
        with pytest.raises(SamplerStuckError):
            slice_step_standard(-1.0, gamma_kernel, np.random.default_rng(0))

    def test_shrink_budget(self):
        # the slice is a needle at the current point: nothing else is accepted
        spike = lambda x: 0.0 if x == 0.25 else -1e6
        with pytest.raises(SamplerStuckError) as info:
            slice_step_standard(0.25, spike, np.random.default_rng(0), SliceConfig(max_shrink=20))
        assert info.value.diagnostics["max_shrink"] == 20

    def test_stepout_cap_is_not_fatal(self):
        # a flat target never stops the step-out
        flat = lambda x: 0.0
        x = run(slice_step_standard, flat, 0.0, 50, 4, SliceConfig(width=0.5, max_stepout=7))
        assert np.all(np.abs(x) < 0.5 * 7 + 50)


class TestModified:
    def test_two_piece_mass_split(self):
        x = run(slice_step_modified, two_piece_flat, 0.5, 50_000, 5)
        assert all(two_piece_flat(v) is not None for v in x)
        left = x <= 1.0
        se = math.sqrt(0.25 / x.size)
        assert abs(left.mean() - 0.5) < 3 * se
        for lo in (0.0, 2.0):
            piece = x[(x >= lo) & (x <= lo + 1.0)]
            counts, _ = np.histogram(piece, bins=20, range=(lo, lo + 1.0))
            assert stats.chisquare(counts).pvalue > 0.01

    def test_truncated_support(self):
        m = 0.7
        trunc = lambda x: -0.5 * x * x if x < m else None
        x = run(slice_step_modified, trunc, 0.0, 100_000, 6)
        assert x.max() < m

    def test_matches_standard_on_smooth_target(self):
        a = run(slice_step_standard, normal_kernel, 0.0, 10_000, 7)
        b = run(slice_step_modified, normal_kernel, 0.0, 10_000, 8)
        assert stats.ks_2samp(a, b).pvalue > 0.01

    def test_undefined_half_line_cost_bounded(self):
        # the bracket can reach far into an undefined half-line
        half = lambda x: -x if x > 0 else None
        rng = np.random.default_rng(10)
        calls = 0

        def counted(x):
            nonlocal calls
            calls += 1
            return half(x)

        x = 1.0
        for _ in range(2000):
            x = slice_step_modified(x, counted, rng, SliceConfig(width=1.0))
        assert calls / 2000 < 200

    def test_redraw_budget(self):
        pocket = lambda x: 0.0 if x == 0.5 else None
        with pytest.raises(SamplerStuckError) as info:
            slice_step_modified(0.5, pocket, np.random.default_rng(0), SliceConfig(max_shrink=30))
        assert info.value.diagnostics["redraws"] == 30

    def test_deterministic(self):
        a = run(slice_step_modified, two_piece_flat, 0.5, 300, 12)
        b = run(slice_step_modified, two_piece_flat, 0.5, 300, 12)
        assert np.array_equal(a, b)
