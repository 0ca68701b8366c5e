"""Slice-within-Gibbs sweeps over the seven BB-BVPA parameters.

Approach 1 updates the shapes from their bivariate conditionals and the
locations/scales from conditionals built on the marginal likelihood of
each coordinate, all with the standard stepper.  Because the marginal
conditionals are not the full conditionals of the joint posterior,
Approach 1 is an approximate Gibbs scheme.  Approach 2 updates all seven
parameters from the bivariate conditionals with the modified stepper,
which tolerates the undefined half-lines of the location conditionals.

The update order is fixed: alpha0, alpha1, alpha2, mu1, mu2, sigma1, sigma2.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, ParameterError, SamplerStuckError
from .model import PARAM_NAMES, BivariateSample, BvpaParams, region_stats
from .posterior import ConditionalTarget, Mode, log_posterior
from .priors import DEFAULT_PRIORS, PriorSpec
from .slice import DEFAULT_SLICE, SliceConfig, slice_step_modified, slice_step_standard

__all__ = [
    "Approach",
    "GibbsConfig",
    "Chain",
    "UPDATE_ORDER",
    "run_chain",
    "initialize_default",
    "spawn_seeds",
]

UPDATE_ORDER = ("alpha0", "alpha1", "alpha2", "mu1", "mu2", "sigma1", "sigma2")
_INDEX = {name: i for i, name in enumerate(PARAM_NAMES)}


class Approach(enum.IntEnum):
    A1 = 1
    A2 = 2


@dataclass(frozen=True)
class GibbsConfig:
    approach: Approach = Approach.A1
    burn_in: int = 500
    draws: int = 2000
    thin: int = 1
    init: BvpaParams | None = None
    slice: SliceConfig = DEFAULT_SLICE
    seed: int = 0
    check_invariants: bool = True

    def __post_init__(self):
        object.__setattr__(self, "approach", Approach(int(self.approach)))
        if self.draws < 1:
            raise ConfigError("draws must be >= 1")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if self.thin < 1:
            raise ConfigError("thin must be >= 1")

    def echo(self) -> dict:
        """JSON-friendly view used in chain metadata."""
        return {
            "approach": int(self.approach),
            "burn_in": self.burn_in,
            "draws": self.draws,
            "thin": self.thin,
            "init": None if self.init is None else self.init.as_dict(),
            "slice": asdict(self.slice),
            "seed": self.seed,
        }


@dataclass
class Chain:
    """Post burn-in, post thinning draws, one row per stored state.

    Columns follow :data:`bbbvpa.model.PARAM_NAMES`.  ``meta`` echoes the
    configuration and records how many log-density evaluations each
    parameter needed per update.
    """

    draws: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float).reshape(-1, 7)

    def __len__(self):
        return self.draws.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.draws[:, _INDEX[name]]

    def states(self):
        for row in self.draws:
            yield BvpaParams.from_array(row)


def spawn_seeds(master_seed: int, count: int) -> list[int]:
    """Independent integer seeds derived from one master seed."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def initialize_default(sample: BivariateSample) -> BvpaParams:
    """Deterministic in-domain starting point.

    Locations sit 5% of the data range below each minimum, scales are half
    the sample standard deviation (floored at 1e-6), shapes are 1.
    """
    init = []
    for x, lo in ((sample.x1, sample.min_x1), (sample.x2, sample.min_x2)):
        spread = float(x.max()) - lo
        init.append(lo - max(0.05 * spread, 1e-6))
    for x in (sample.x1, sample.x2):
        sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
        init.append(max(0.5 * sd, 1e-6))
    return BvpaParams(*init, 1.0, 1.0, 1.0)


class _Counted:
    __slots__ = ("fn", "calls")

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def run_chain(
    sample: BivariateSample, cfg: GibbsConfig, priors: PriorSpec = DEFAULT_PRIORS
) -> Chain:
    """Run one slice-within-Gibbs chain and return the retained draws.

    Raises
    ------
    ConfigError
        If the initial state is outside the posterior support.
    SamplerStuckError
        If a slice update fails; the message names the iteration and
        parameter.
    """
    init = cfg.init if cfg.init is not None else initialize_default(sample)
    try:
        init.check_support(sample)
    except ParameterError as exc:
        raise ConfigError(f"invalid initial state: {exc}") from exc
    if log_posterior(sample, init.as_array(), priors) is None:
        raise ConfigError("log posterior is undefined at the initial state")

    rng = np.random.default_rng(cfg.seed)
    state = list(init.as_array())
    if cfg.approach is Approach.A1:
        step, location_mode = slice_step_standard, Mode.UNIVARIATE
    else:
        step, location_mode = slice_step_modified, Mode.BIVARIATE

    total = cfg.burn_in + cfg.draws * cfg.thin
    out = np.empty((cfg.draws, 7))
    evals = dict.fromkeys(UPDATE_ORDER, 0)
    kept = 0
    started = time.perf_counter()
    for it in range(total):
        stats = region_stats(sample.x1, sample.x2, *state[:4])
        for name in UPDATE_ORDER:
            i = _INDEX[name]
            if name.startswith("alpha"):
                target = ConditionalTarget(name, state, sample, priors, stats=stats)
            else:
                target = ConditionalTarget(name, state, sample, priors, mode=location_mode)
            f = _Counted(target)
            try:
                state[i] = step(state[i], f, rng, cfg.slice)
            except SamplerStuckError as exc:
                exc.diagnostics.update(iteration=it, parameter=name)
                raise SamplerStuckError(
                    f"slice update of {name} failed at iteration {it}: {exc}",
                    exc.diagnostics,
                ) from exc
            evals[name] += f.calls
        if cfg.check_invariants:
            lp = log_posterior(sample, state, priors)
            if lp is None or not math.isfinite(lp):
                raise SamplerStuckError(
                    f"chain left the posterior support at iteration {it}",
                    {"iteration": it, "state": list(state)},
                )
        if it >= cfg.burn_in and (it - cfg.burn_in) % cfg.thin == cfg.thin - 1:
            out[kept] = state
            kept += 1

    meta = {
        "config": cfg.echo(),
        "priors": priors.as_dict(),
        "n": sample.n,
        "evaluations_per_update": {k: v / total for k, v in evals.items()},
        "wall_time": time.perf_counter() - started,
    }
    return Chain(out, meta)
