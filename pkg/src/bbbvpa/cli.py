"""Command-line entry point.

Exit codes: 0 success, 2 bad input or configuration, 3 sampler or study
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace

import jsonschema
import numpy as np

from . import data as data_io
from .errors import (
    BvpaError,
    ConfigError,
    CorruptFileError,
    DataFormatError,
    ParameterError,
    SamplerStuckError,
)
from .gibbs import GibbsConfig, run_chain
from .harness import ABALONE_BOOTSTRAP_TRUTH, StudySpec, run_study
from .inference import summarize
from .model import PARAM_NAMES, BvpaParams, sample_bb
from .priors import DEFAULT_PRIORS, PriorSpec
from .slice import SliceConfig

log = logging.getLogger("bbbvpa")

EXIT_OK, EXIT_INPUT, EXIT_SAMPLER, EXIT_IO = 0, 2, 3, 4

_POS = {"type": "number", "exclusiveMinimum": 0}
_PARAMS_SCHEMA = {
    "type": "object",
    "properties": {
        "mu1": {"type": "number"},
        "mu2": {"type": "number"},
        **{name: _POS for name in PARAM_NAMES[2:]},
    },
    "required": list(PARAM_NAMES),
    "additionalProperties": False,
}
_COUNT = {"type": "integer", "minimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "priors": {
            "type": "object",
            "properties": {
                **{k: _POS for k in ("k0", "k1", "k2", "theta0", "theta1", "theta2",
                                     "c1", "c2", "d1", "d2", "sig_p1", "sig_p2")},
                "mu_p1": {"type": "number"},
                "mu_p2": {"type": "number"},
            },
            "additionalProperties": False,
        },
        "gibbs": {
            "type": "object",
            "properties": {
                "approach": {"enum": [1, 2]},
                "burn_in": _COUNT,
                "draws": {"type": "integer", "minimum": 1},
                "thin": {"type": "integer", "minimum": 1},
                "check_invariants": {"type": "boolean"},
                "init": _PARAMS_SCHEMA,
                "slice": {
                    "type": "object",
                    "properties": {
                        "width": _POS,
                        "max_stepout": {"type": "integer", "minimum": 1},
                        "max_shrink": {"type": "integer", "minimum": 1},
                        "max_redraw": _COUNT,
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "pot": {
            "type": "object",
            "properties": {
                "threshold1": _POS,
                "threshold2": _POS,
                "t": {"type": "number", "minimum": 1},
            },
            "required": ["threshold1", "threshold2"],
            "additionalProperties": False,
        },
        "study": {
            "type": "object",
            "properties": {
                "truth": _PARAMS_SCHEMA,
                "n": {"type": "integer", "minimum": 1},
                "replicates": {"type": "integer", "minimum": 1},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "failure_budget": _COUNT,
            },
            "additionalProperties": False,
        },
        "paths": {
            "type": "object",
            "properties": {
                k: {"type": "string"} for k in ("data", "abalone", "out", "records", "table")
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    priors: PriorSpec = DEFAULT_PRIORS
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)
    pot: data_io.PotConfig | None = None
    study: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    seed: int = 0


def validate_config(doc: dict) -> None:
    """Raise :class:`ConfigError` naming the offending field path."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {err.message}")


def parse_config(doc: dict) -> RunConfig:
    validate_config(doc)
    priors = DEFAULT_PRIORS.replace(**doc.get("priors", {}))
    g = dict(doc.get("gibbs", {}))
    slice_cfg = SliceConfig(**g.pop("slice", {}))
    init = g.pop("init", None)
    seed = doc.get("seed", 0)
    gibbs = GibbsConfig(
        slice=slice_cfg,
        init=None if init is None else BvpaParams(**init),
        seed=seed,
        **g,
    )
    pot = data_io.PotConfig(**doc["pot"]) if "pot" in doc else None
    return RunConfig(priors, gibbs, pot, dict(doc.get("study", {})), dict(doc.get("paths", {})), seed)


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(doc)


def _params_arg(text: str) -> BvpaParams:
    try:
        return BvpaParams.from_array(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"bad parameter list {text!r}: {exc}") from exc


def _resolve(cfg: RunConfig, args) -> RunConfig:
    gibbs = cfg.gibbs
    if getattr(args, "approach", None) is not None:
        gibbs = replace(gibbs, approach=args.approach)
    seed = cfg.seed if args.seed is None else args.seed
    return replace(cfg, gibbs=replace(gibbs, seed=seed), seed=seed)


def _path(args, cfg: RunConfig, key: str, required: bool = True):
    value = getattr(args, key, None) or cfg.paths.get(key)
    if value is None and required:
        raise ConfigError(f"missing --{key} (or paths.{key} in the config)")
    return value


def _print_summary(chain, gamma, stream=None):
    stream = sys.stdout if stream is None else stream
    stream.write(f"{'param':<8}{'estimate':>14}{'lo':>14}{'hi':>14}\n")
    for s in summarize(chain, gamma):
        stream.write(f"{s.param:<8}{s.point:>14.6g}{s.lo:>14.6g}{s.hi:>14.6g}\n")


def write_summary(chain, gamma, path) -> None:
    """Tab-separated estimates and intervals at full precision."""
    with open(path, "w") as fh:
        fh.write("param\testimate\tlo\thi\n")
        for s in summarize(chain, gamma):
            fh.write(f"{s.param}\t{s.point!r}\t{s.lo!r}\t{s.hi!r}\n")


def cmd_sample(args, cfg: RunConfig) -> int:
    truth = _params_arg(args.truth) if args.truth else BvpaParams(**cfg.study["truth"]) \
        if "truth" in cfg.study else None
    if truth is None:
        raise ConfigError("missing --truth (or study.truth in the config)")
    n = args.n if args.n is not None else cfg.study.get("n")
    if n is None or n < 1:
        raise ConfigError("sample size must be >= 1")
    sample = sample_bb(truth, n, np.random.default_rng(cfg.seed))
    data_io.write_sample(sample, _path(args, cfg, "out"))
    return EXIT_OK


def cmd_fit(args, cfg: RunConfig) -> int:
    sample = data_io.read_sample(_path(args, cfg, "data"))
    chain = run_chain(sample, cfg.gibbs, cfg.priors)
    data_io.write_chain(chain, _path(args, cfg, "out"))
    if args.summary:
        write_summary(chain, args.gamma, args.summary)
    _print_summary(chain, args.gamma)
    return EXIT_OK


def _report_study(result, args, cfg):
    out = _path(args, cfg, "out")
    data_io.write_study(result, out)
    table = _path(args, cfg, "table", required=False)
    if table:
        data_io.write_study_table(result, table)
    for name, row in result.table().items():
        print(f"{name:<8} est={row['estimate']:.6g} mse={row['mse']:.4g} "
              f"cov={row['coverage']:.3f} ci=[{row['lo']:.6g}, {row['hi']:.6g}]")


def _progress(rec):
    status = "failed: " + rec.error if rec.failed else "ok"
    print(f"replicate {rec.index} {status}", file=sys.stderr, flush=True)


def _study_spec(cfg: RunConfig, truth: BvpaParams, n: int, replicates: int) -> StudySpec:
    return StudySpec(
        truth=truth,
        n=n,
        replicates=replicates,
        gibbs=cfg.gibbs,
        gamma=cfg.study.get("gamma", 0.05),
        master_seed=cfg.seed,
        failure_budget=cfg.study.get("failure_budget", 0),
    )


def cmd_study(args, cfg: RunConfig) -> int:
    if "truth" not in cfg.study:
        raise ConfigError("study.truth is required")
    spec = _study_spec(
        cfg,
        BvpaParams(**cfg.study["truth"]),
        args.n or cfg.study.get("n", 1000),
        args.replicates or cfg.study.get("replicates", 200),
    )
    result = run_study(spec, cfg.priors, jobs=args.jobs,
                       records_path=_path(args, cfg, "records", required=False),
                       progress=_progress)
    _report_study(result, args, cfg)
    return EXIT_OK


def cmd_bootstrap(args, cfg: RunConfig) -> int:
    fitted = _params_arg(args.fitted) if args.fitted else ABALONE_BOOTSTRAP_TRUTH
    spec = _study_spec(
        cfg, fitted,
        args.n or cfg.study.get("n", 329),
        args.replicates or cfg.study.get("replicates", 200),
    )
    result = run_study(spec, cfg.priors, jobs=args.jobs,
                       records_path=_path(args, cfg, "records", required=False),
                       progress=_progress)
    _report_study(result, args, cfg)
    return EXIT_OK


def cmd_ingest(args, cfg: RunConfig) -> int:
    table = data_io.load_abalone(_path(args, cfg, "abalone"))
    pot = cfg.pot
    if pot is None or args.target_n is not None:
        pot = data_io.search_pot_config(table, args.target_n or 329, t=args.t)
    sample = data_io.pot_transform(table, pot)
    data_io.write_sample(sample, _path(args, cfg, "out"))
    print(json.dumps({"pot": {"threshold1": pot.threshold1, "threshold2": pot.threshold2,
                              "t": pot.t}, "female_rows": len(table), "n": sample.n}))
    return EXIT_OK


def cmd_plotdata(args, cfg: RunConfig) -> int:
    sample = data_io.read_sample(_path(args, cfg, "data"))
    if args.params:
        params = _params_arg(args.params)
    elif args.chain:
        params = BvpaParams.from_array(data_io.read_chain(args.chain).draws.mean(axis=0))
    else:
        raise ConfigError("give --params or --chain")
    series = data_io.empirical_survival_series(sample, params, grid_size=args.grid)
    with open(_path(args, cfg, "out"), "w") as fh:
        fh.write("series,x,survival\n")
        for key, s in series.items():
            for x, v in zip(s["x"], s["empirical"]):
                fh.write(f"{key}_empirical,{float(x)!r},{float(v)!r}\n")
            for x, v in zip(s["grid"], s["model"]):
                fh.write(f"{key}_model,{float(x)!r},{float(v)!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbbvpa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, approach=False, jobs=False):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--out", help="output file")
        if approach:
            p.add_argument("--approach", type=int, choices=(1, 2))
        if jobs:
            p.add_argument("--jobs", type=int, default=1)
        return p

    p = common(sub.add_parser("sample", help="simulate BB-BVPA data"))
    p.add_argument("--truth", help="mu1,mu2,sigma1,sigma2,alpha0,alpha1,alpha2")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_sample)

    p = common(sub.add_parser("fit", help="run one chain on a sample file"), approach=True)
    p.add_argument("--data")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--summary", help="tab-separated summary table")
    p.set_defaults(func=cmd_fit)

    for name, func, helptext in (
        ("study", cmd_study, "simulation study from a known truth"),
        ("bootstrap", cmd_bootstrap, "parametric bootstrap from fitted parameters"),
    ):
        p = common(sub.add_parser(name, help=helptext), approach=True, jobs=True)
        p.add_argument("--n", type=int)
        p.add_argument("--replicates", type=int)
        p.add_argument("--records", help="JSON-lines replicate records (resumable)")
        p.add_argument("--table", help="tab-separated summary table")
        if name == "bootstrap":
            p.add_argument("--fitted", help="mu1,mu2,sigma1,sigma2,alpha0,alpha1,alpha2")
        p.set_defaults(func=func)

    p = common(sub.add_parser("ingest", help="abalone file to a POT-transformed sample"))
    p.add_argument("--abalone")
    p.add_argument("--target-n", type=int, help="search thresholds leaving this many rows")
    p.add_argument("--t", type=float, default=1.0)
    p.set_defaults(func=cmd_ingest)

    p = common(sub.add_parser("plotdata", help="marginal survival series for plotting"))
    p.add_argument("--data")
    p.add_argument("--params", help="mu1,mu2,sigma1,sigma2,alpha0,alpha1,alpha2")
    p.add_argument("--chain", help="use the posterior mean of this chain file")
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(load_config(args.config), args)
        return args.func(args, cfg)
    except SamplerStuckError as exc:
        print(f"sampler failure: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except (CorruptFileError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ParameterError, DataFormatError, ValueError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BvpaError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_SAMPLER


if __name__ == "__main__":
    sys.exit(main())
