"""Repeated-sampling studies: bias, MSE and credible-interval coverage.

A study draws ``replicates`` BB-BVPA samples from a known truth, runs one
chain per sample and aggregates the posterior summaries.  Replicate
seeds are derived from the master seed and the replicate index, so a
study gives identical results whether replicates run serially, in
parallel, or are resumed from persisted records.
"""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BvpaError, ConfigError
from .gibbs import GibbsConfig, initialize_default, run_chain
from .inference import summarize
from .model import PARAM_NAMES, BvpaParams, sample_bb
from .priors import DEFAULT_PRIORS, PriorSpec

__all__ = [
    "ABALONE_BOOTSTRAP_TRUTH",
    "StudySpec",
    "ReplicateRecord",
    "StudyResult",
    "replicate_seeds",
    "run_replicate",
    "run_study",
    "run_bootstrap",
    "aggregate",
    "load_records",
]

log = logging.getLogger(__name__)

# Bayes estimates of the abalone fit used as the parametric-bootstrap truth.
ABALONE_BOOTSTRAP_TRUTH = BvpaParams(10.852, 8.630, 2.316, 1.923, 4.049, 1.240, 1.158)


@dataclass(frozen=True)
class StudySpec:
    truth: BvpaParams
    n: int
    replicates: int
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)
    gamma: float = 0.05
    master_seed: int = 0
    failure_budget: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.n < 1:
            raise ConfigError("sample size must be >= 1")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError("gamma must lie in (0, 1)")
        if self.failure_budget < 0:
            raise ConfigError("failure_budget must be >= 0")


@dataclass(frozen=True)
class ReplicateRecord:
    index: int
    data_seed: int
    chain_seed: int
    estimate: tuple = ()
    lo: tuple = ()
    hi: tuple = ()
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_json(self) -> str:
        return json.dumps(
            {
                "index": self.index,
                "data_seed": self.data_seed,
                "chain_seed": self.chain_seed,
                "estimate": list(self.estimate),
                "lo": list(self.lo),
                "hi": list(self.hi),
                "error": self.error,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "ReplicateRecord":
        d = json.loads(line)
        return cls(
            index=int(d["index"]),
            data_seed=int(d["data_seed"]),
            chain_seed=int(d["chain_seed"]),
            estimate=tuple(d["estimate"]),
            lo=tuple(d["lo"]),
            hi=tuple(d["hi"]),
            error=d["error"],
        )


@dataclass
class StudyResult:
    """Aggregated study output; arrays are ordered like ``PARAM_NAMES``."""

    truth: BvpaParams
    n: int
    gamma: float
    records: list
    mean_estimate: np.ndarray
    mse: np.ndarray
    coverage: np.ndarray
    mean_lo: np.ndarray
    mean_hi: np.ndarray

    def table(self) -> dict:
        return {
            name: {
                "truth": getattr(self.truth, name),
                "estimate": float(self.mean_estimate[i]),
                "mse": float(self.mse[i]),
                "lo": float(self.mean_lo[i]),
                "hi": float(self.mean_hi[i]),
                "coverage": float(self.coverage[i]),
            }
            for i, name in enumerate(PARAM_NAMES)
        }


def replicate_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """(data seed, chain seed) for one replicate."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    data_seed, chain_seed = ss.generate_state(2, dtype=np.uint64)
    return int(data_seed), int(chain_seed)


def run_replicate(spec: StudySpec, priors: PriorSpec, index: int) -> ReplicateRecord:
    data_seed, chain_seed = replicate_seeds(spec.master_seed, index)
    try:
        sample = sample_bb(spec.truth, spec.n, np.random.default_rng(data_seed))
        init = spec.gibbs.init
        if init is None or not (init.mu1 < sample.min_x1 and init.mu2 < sample.min_x2):
            init = initialize_default(sample)
        cfg = replace(spec.gibbs, init=init, seed=chain_seed)
        summary = summarize(run_chain(sample, cfg, priors), spec.gamma)
    except BvpaError as exc:
        return ReplicateRecord(index, data_seed, chain_seed, error=f"{type(exc).__name__}: {exc}")
    return ReplicateRecord(
        index,
        data_seed,
        chain_seed,
        estimate=tuple(s.point for s in summary),
        lo=tuple(s.lo for s in summary),
        hi=tuple(s.hi for s in summary),
    )


def aggregate(truth: BvpaParams, n: int, gamma: float, records) -> StudyResult:
    """Fold successful replicate records into study-level summaries."""
    records = sorted(records, key=lambda r: r.index)
    ok = [r for r in records if not r.failed]
    if not ok:
        raise BvpaError("no successful replicates to aggregate")
    est = np.array([r.estimate for r in ok])
    lo = np.array([r.lo for r in ok])
    hi = np.array([r.hi for r in ok])
    t = truth.as_array()
    return StudyResult(
        truth=truth,
        n=n,
        gamma=gamma,
        records=records,
        mean_estimate=est.mean(axis=0),
        mse=((est - t) ** 2).mean(axis=0),
        coverage=((lo <= t) & (t <= hi)).mean(axis=0),
        mean_lo=lo.mean(axis=0),
        mean_hi=hi.mean(axis=0),
    )


def load_records(path) -> list[ReplicateRecord]:
    """Read persisted records; a torn final line from a crash is ignored."""
    records = []
    if not os.path.exists(path):
        return records
    with open(path) as fh:
        for line in fh:
            if not line.endswith("\n"):
                break
            records.append(ReplicateRecord.from_json(line))
    return records


def _trim_torn_tail(path) -> None:
    # drop a partial last line so appended records start on a fresh line
    with open(path, "rb+") as fh:
        data = fh.read()
        if data and not data.endswith(b"\n"):
            fh.truncate(data.rfind(b"\n") + 1)


def _replicate_task(args):
    spec, priors, index = args
    return run_replicate(spec, priors, index)


def run_study(
    spec: StudySpec,
    priors: PriorSpec = DEFAULT_PRIORS,
    *,
    jobs: int = 1,
    records_path=None,
    progress=None,
) -> StudyResult:
    """Run (or resume) a simulation study.

    Parameters
    ----------
    jobs : int
        Number of worker processes; chains themselves stay sequential.
    records_path : path-like, optional
        JSON-lines file of per-replicate records.  Existing records are
        reused and only missing replicates are run; new records are
        appended as they complete.
    progress : callable, optional
        Called with each newly completed :class:`ReplicateRecord`.

    Raises
    ------
    BvpaError
        When more replicates fail than ``spec.failure_budget`` allows.
    """
    done = {}
    if records_path is not None:
        for rec in load_records(records_path):
            if rec.index < spec.replicates:
                done[rec.index] = rec
        if done:
            log.info("resuming study: %d of %d replicates on record", len(done), spec.replicates)
    todo = [i for i in range(spec.replicates) if i not in done]
    if records_path is not None and os.path.exists(records_path):
        _trim_torn_tail(records_path)

    sink = open(records_path, "a") if records_path is not None else None
    failures = sum(r.failed for r in done.values())

    def consume(rec):
        nonlocal failures
        done[rec.index] = rec
        if sink is not None:
            sink.write(rec.to_json() + "\n")
            sink.flush()
        if progress is not None:
            progress(rec)
        if rec.failed:
            failures += 1
            log.warning("replicate %d failed: %s", rec.index, rec.error)
            if failures > spec.failure_budget:
                raise BvpaError(
                    f"study aborted: {failures} failed replicate(s) exceed the budget "
                    f"of {spec.failure_budget}; last failure at replicate {rec.index}: {rec.error}"
                )

    try:
        if failures > spec.failure_budget:
            raise BvpaError(f"{failures} recorded failures exceed the budget")
        if jobs <= 1:
            for i in todo:
                consume(run_replicate(spec, priors, i))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for rec in pool.map(_replicate_task, [(spec, priors, i) for i in todo]):
                    consume(rec)
    finally:
        if sink is not None:
            sink.close()
    return aggregate(spec.truth, spec.n, spec.gamma, done.values())


def run_bootstrap(
    fitted: BvpaParams,
    n: int,
    replicates: int,
    gibbs: GibbsConfig = GibbsConfig(),
    priors: PriorSpec = DEFAULT_PRIORS,
    *,
    gamma: float = 0.05,
    master_seed: int = 0,
    failure_budget: int = 0,
    **kwargs,
) -> StudyResult:
    """Parametric bootstrap: a study whose truth is a fitted parameter vector."""
    spec = StudySpec(
        truth=fitted, n=n, replicates=replicates, gibbs=gibbs, gamma=gamma,
        master_seed=master_seed, failure_budget=failure_budget,
    )
    return run_study(spec, priors, **kwargs)
