import numpy as np
import pytest
from numpy.testing import assert_array_equal

from bbbvpa.errors import BvpaError, ConfigError
from bbbvpa.gibbs import GibbsConfig
from bbbvpa.harness import (
    ABALONE_BOOTSTRAP_TRUTH,
    ReplicateRecord,
    StudySpec,
    aggregate,
    load_records,
    replicate_seeds,
    run_bootstrap,
    run_study,
)
from bbbvpa.model import BvpaParams
from bbbvpa.slice import SliceConfig

from conftest import TRUTH_A

QUICK = GibbsConfig(burn_in=20, draws=60)


def quick_spec(**kw):
    base = dict(truth=TRUTH_A, n=150, replicates=3, gibbs=QUICK, master_seed=4)
    base.update(kw)
    return StudySpec(**base)


def test_bootstrap_truth():
    assert ABALONE_BOOTSTRAP_TRUTH.as_array().tolist() == [10.852, 8.630, 2.316, 1.923, 4.049, 1.240, 1.158]


def test_zero_replicates_rejected():
    with pytest.raises(ConfigError):
        quick_spec(replicates=0)


def test_replicate_seeds_stable():
    assert replicate_seeds(3, 7) == replicate_seeds(3, 7)
    assert replicate_seeds(3, 7) != replicate_seeds(3, 8)
    assert replicate_seeds(3, 7) != replicate_seeds(4, 7)


class TestAggregate:
    def _record(self, i, est, lo, hi):
        return ReplicateRecord(i, 0, 0, tuple(est), tuple(lo), tuple(hi))

    def test_single_replicate_mse(self):
        est = np.array(TRUTH_A.as_array()) + np.arange(7) * 0.1
        rec = self._record(0, est, est - 1, est + 1)
        res = aggregate(TRUTH_A, 10, 0.05, [rec])
        assert_array_equal(res.mse, (est - TRUTH_A.as_array()) ** 2)
        assert_array_equal(res.coverage, np.ones(7))

    def test_coverage_fraction(self):
        t = TRUTH_A.as_array()
        recs = [
            self._record(0, t, t - 1, t + 1),
            self._record(1, t, t + 0.5, t + 1),
            self._record(2, t, t, t),  # closed interval: endpoints count
            self._record(3, t, t - 2, t - 1),
        ]
        assert_array_equal(aggregate(TRUTH_A, 10, 0.05, recs).coverage, np.full(7, 0.5))

    def test_failed_records_skipped(self):
        t = TRUTH_A.as_array()
        recs = [self._record(0, t, t, t), ReplicateRecord(1, 0, 0, error="boom")]
        res = aggregate(TRUTH_A, 10, 0.05, recs)
        assert_array_equal(res.mean_estimate, t)
        assert len(res.records) == 2

    def test_nothing_to_aggregate(self):
        with pytest.raises(BvpaError):
            aggregate(TRUTH_A, 10, 0.05, [ReplicateRecord(0, 0, 0, error="x")])


class TestStudy:
    def test_records_and_recomputation(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        res = run_study(quick_spec(), records_path=path)
        assert len(res.records) == 3
        again = aggregate(TRUTH_A, 150, 0.05, load_records(path))
        assert_array_equal(again.mse, res.mse)
        assert_array_equal(again.coverage, res.coverage)
        assert np.all((res.coverage >= 0) & (res.coverage <= 1)) and np.all(res.mse >= 0)

    def test_resume_after_crash(self, tmp_path):
        full = run_study(quick_spec())
        path = tmp_path / "rec.jsonl"
        run_study(quick_spec(replicates=1), records_path=path)
        with open(path, "a") as fh:
            fh.write('{"index": 1, "data_se')  # torn write
        seen = []
        resumed = run_study(quick_spec(), records_path=path, progress=lambda r: seen.append(r.index))
        assert seen == [1, 2]
        assert [r.index for r in load_records(path)] == [0, 1, 2]
        assert_array_equal(resumed.mean_estimate, full.mean_estimate)
        assert_array_equal(resumed.mean_lo, full.mean_lo)

    def test_torn_last_line_ignored(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        run_study(quick_spec(replicates=1), records_path=path)
        with open(path, "a") as fh:
            fh.write('{"index": 1, "da')
        assert [r.index for r in load_records(path)] == [0]

    def test_parallel_matches_serial(self):
        serial = run_study(quick_spec())
        parallel = run_study(quick_spec(), jobs=2)
        assert_array_equal(serial.mean_estimate, parallel.mean_estimate)

    def test_reproducible(self):
        assert_array_equal(run_study(quick_spec()).mse, run_study(quick_spec()).mse)

    def test_failure_budget(self):
        stuck = GibbsConfig(burn_in=5, draws=5, slice=SliceConfig(max_shrink=1))
        with pytest.raises(BvpaError, match="budget"):
            run_study(quick_spec(gibbs=stuck))

    def test_bootstrap_is_a_study(self):
        fitted = BvpaParams(1.0, 2.0, 0.4, 0.5, 0.5, 0.7, 0.65)
        a = run_bootstrap(fitted, 100, 2, QUICK, master_seed=9)
        b = run_study(StudySpec(fitted, 100, 2, QUICK, master_seed=9))
        assert_array_equal(a.mean_estimate, b.mean_estimate)
        assert a.truth == fitted


@pytest.mark.slow
def test_mse_decreases_with_sample_size():
    results = {
        n: run_study(StudySpec(TRUTH_A, n, 50, GibbsConfig(check_invariants=False), master_seed=23))
        for n in (450, 1000)
    }
    worse = np.count_nonzero(results[1000].mse > results[450].mse)
    assert worse <= 1, (results[450].mse, results[1000].mse)
