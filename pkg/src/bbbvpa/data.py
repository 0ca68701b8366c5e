"""Abalone ingestion, peak-over-threshold transform and file formats.

Samples and chains are stored as comma-separated text with a one-line
versioned header, e.g.::

    # bbbvpa chain v1 rows=2000 meta={...}
    mu1,mu2,sigma1,sigma2,alpha0,alpha1,alpha2
    0.29991,0.39987,...

Floats are written with ``repr`` so a round trip is bit-exact.  Study
results are JSON documents holding the per-replicate records; summaries
are recomputed from the records on load.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import astuple, dataclass

import numpy as np

from .errors import (
    ConfigError,
    CorruptFileError,
    DataFormatError,
    InsufficientExceedancesError,
    VersionMismatchError,
)
from .gibbs import Chain
from .harness import ReplicateRecord, StudyResult, aggregate
from .model import PARAM_NAMES, BivariateSample, BvpaParams, marginal_sf_x1, marginal_sf_x2

__all__ = [
    "ABALONE_COLUMNS",
    "FORMAT_VERSION",
    "RawTable",
    "PotConfig",
    "load_abalone",
    "pot_transform",
    "search_pot_config",
    "write_sample",
    "read_sample",
    "write_chain",
    "read_chain",
    "write_study",
    "read_study",
    "write_study_table",
    "empirical_survival_series",
]

FORMAT_VERSION = 1
MIN_EXCEEDANCES = 10

ABALONE_COLUMNS = (
    "sex", "length", "diameter", "height", "whole_weight",
    "shucked_weight", "viscera_weight", "shell_weight", "rings",
)


@dataclass(frozen=True)
class RawTable:
    """Female abalone rows: shell length and diameter with source line numbers."""

    length: np.ndarray
    diameter: np.ndarray
    line: np.ndarray

    def __len__(self):
        return self.length.size


@dataclass(frozen=True)
class PotConfig:
    threshold1: float
    threshold2: float
    t: float = 1.0

    def __post_init__(self):
        if not (self.threshold1 > 0 and self.threshold2 > 0):
            raise ConfigError("POT thresholds must be > 0")
        if not self.t >= 1.0:
            raise ConfigError("POT scale t must be >= 1")


def _norm(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_abalone(path) -> RawTable:
    """Parse a UCI abalone file and keep the female rows.

    A header line is optional; if present, columns are located by name.
    An unreadable path raises :class:`OSError`; content problems raise
    :class:`DataFormatError` naming the offending line.
    """
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(f.strip() for f in r)]
    if not rows:
        raise DataFormatError(f"{path} is empty")

    cols = {name: i for i, name in enumerate(ABALONE_COLUMNS)}
    width = len(ABALONE_COLUMNS)
    first_line, first = rows[0]
    if len(first) > 1 and not _is_number(first[1]):
        header = [_norm(h) for h in first]
        missing = [c for c in ("sex", "length", "diameter") if c not in header]
        if missing:
            raise DataFormatError(f"{path}: missing column(s) {', '.join(missing)}")
        cols = {name: header.index(name) for name in ("sex", "length", "diameter")}
        width = len(header)
        rows = rows[1:]

    length, diameter, lines = [], [], []
    for lineno, row in rows:
        if len(row) != width:
            raise DataFormatError(
                f"{path}:{lineno}: expected {width} fields, found {len(row)}"
            )
        if row[cols["sex"]].strip() != "F":
            continue
        try:
            u1 = float(row[cols["length"]])
            u2 = float(row[cols["diameter"]])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
        if not (u1 > 0 and u2 > 0 and math.isfinite(u1) and math.isfinite(u2)):
            raise DataFormatError(f"{path}:{lineno}: length and diameter must be positive")
        length.append(u1)
        diameter.append(u2)
        lines.append(lineno)
    return RawTable(np.array(length, dtype=float), np.array(diameter, dtype=float),
                    np.array(lines, dtype=int))


def pot_transform(table: RawTable, cfg: PotConfig) -> BivariateSample:
    """Keep rows at or above both thresholds and rescale to ``t * u / x0``.

    Pairs whose transformed coordinates tie exactly get ``1e-9 * x0`` added
    to the second coordinate so that no observation sits on the diagonal.
    Kept rows stay in file order.
    """
    if len(table) == 0:
        raise InsufficientExceedancesError("table has no rows")
    if cfg.threshold1 > table.length.max() or cfg.threshold2 > table.diameter.max():
        raise ConfigError("POT threshold lies above the data maximum")
    keep = (table.length >= cfg.threshold1) & (table.diameter >= cfg.threshold2)
    if np.count_nonzero(keep) < MIN_EXCEEDANCES:
        raise InsufficientExceedancesError(
            f"only {np.count_nonzero(keep)} rows exceed both thresholds "
            f"(need {MIN_EXCEEDANCES})"
        )
    x1 = cfg.t * table.length[keep] / cfg.threshold1
    x2 = cfg.t * table.diameter[keep] / cfg.threshold2
    ties = x1 == x2
    x2 = np.where(ties, x2 + 1e-9 * cfg.threshold2, x2)
    return BivariateSample(x1, x2)


def search_pot_config(
    table: RawTable, target_n: int = 329, t: float = 1.0, levels=None
) -> PotConfig:
    """Grid search for thresholds that leave exactly ``target_n`` rows.

    Candidate thresholds are empirical quantiles of each column on the
    grid ``levels`` (default 0, 0.005, ..., 0.995).  Among pairs hitting
    the target, the one with the most similar quantile levels wins, then
    the lowest levels.  If no pair hits the target exactly, the closest
    count is used.
    """
    if len(table) < target_n:
        raise InsufficientExceedancesError(
            f"table has {len(table)} rows, fewer than the target {target_n}"
        )
    if levels is None:
        levels = np.round(np.arange(0.0, 1.0, 0.005), 3)
    levels = np.asarray(levels, dtype=float)
    q1 = np.quantile(table.length, levels, method="inverted_cdf")
    q2 = np.quantile(table.diameter, levels, method="inverted_cdf")
    above1 = table.length[None, :] >= q1[:, None]
    above2 = table.diameter[None, :] >= q2[:, None]
    counts = above1.astype(np.int64) @ above2.T.astype(np.int64)
    miss = np.abs(counts - target_n)
    i_idx, j_idx = np.nonzero(miss == miss.min())
    best = min(
        zip(i_idx, j_idx),
        key=lambda ij: (abs(levels[ij[0]] - levels[ij[1]]), levels[ij[0]] + levels[ij[1]], ij),
    )
    return PotConfig(float(q1[best[0]]), float(q2[best[1]]), t)


# serialization -------------------------------------------------------------

def _write_header(fh, kind: str, rows: int, meta: dict | None = None):
    head = f"# bbbvpa {kind} v{FORMAT_VERSION} rows={rows}"
    if meta is not None:
        head += " meta=" + json.dumps(meta, sort_keys=True)
    fh.write(head + "\n")


_HEADER = re.compile(r"^# bbbvpa (\w+) v(\d+) rows=(\d+)(?: meta=(.*))?$")


def _read_header(line: str, kind: str, path) -> tuple[int, dict]:
    m = _HEADER.match(line)
    if m is None or m.group(1) != kind:
        raise CorruptFileError(f"{path}: not a bbbvpa {kind} file")
    if int(m.group(2)) != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: format v{m.group(2)} is not supported (expected v{FORMAT_VERSION})"
        )
    meta = {}
    if m.group(4) is not None:
        try:
            meta = json.loads(m.group(4))
        except json.JSONDecodeError as exc:
            raise CorruptFileError(f"{path}: malformed header metadata") from exc
    return int(m.group(3)), meta


def _read_table(path, kind: str, columns) -> tuple[np.ndarray, dict]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CorruptFileError(f"cannot read {path}: {exc}") from exc
    lines = text.split("\n")
    if len(lines) < 2:
        raise CorruptFileError(f"{path}: truncated file")
    rows, meta = _read_header(lines[0], kind, path)
    if lines[1] != ",".join(columns):
        raise CorruptFileError(f"{path}: unexpected column header {lines[1]!r}")
    body = lines[2:]
    # a complete file ends with a newline, leaving one empty trailing element
    if body and body[-1] == "":
        body = body[:-1]
    else:
        raise CorruptFileError(f"{path}: truncated file (missing final newline)")
    if len(body) != rows:
        raise CorruptFileError(f"{path}: expected {rows} rows, found {len(body)}")
    try:
        values = np.array([[float(v) for v in line.split(",")] for line in body], dtype=float)
    except ValueError as exc:
        raise CorruptFileError(f"{path}: unparsable row ({exc})") from exc
    values = values.reshape(rows, len(columns))
    return values, meta


def _write_rows(fh, rows):
    for row in rows:
        fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_sample(sample: BivariateSample, path) -> None:
    with open(path, "w") as fh:
        _write_header(fh, "sample", sample.n)
        fh.write("x1,x2\n")
        _write_rows(fh, zip(sample.x1, sample.x2))


def read_sample(path) -> BivariateSample:
    values, _ = _read_table(path, "sample", ("x1", "x2"))
    if values.shape[0] == 0:
        raise CorruptFileError(f"{path}: sample has no rows")
    return BivariateSample(values[:, 0], values[:, 1])


def write_chain(chain: Chain, path) -> None:
    """Write a chain; run-time measurements are left out so reruns are
    byte-identical."""
    meta = {k: v for k, v in chain.meta.items() if k != "wall_time"}
    with open(path, "w") as fh:
        _write_header(fh, "chain", len(chain), meta)
        fh.write(",".join(PARAM_NAMES) + "\n")
        _write_rows(fh, chain.draws)


def read_chain(path) -> Chain:
    values, meta = _read_table(path, "chain", PARAM_NAMES)
    return Chain(values, meta)


def write_study(result: StudyResult, path) -> None:
    doc = {
        "format": "bbbvpa-study",
        "version": FORMAT_VERSION,
        "truth": result.truth.as_dict(),
        "n": result.n,
        "gamma": result.gamma,
        "records": [json.loads(r.to_json()) for r in result.records],
        "summary": result.table(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_study(path) -> StudyResult:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: truncated or malformed study file") from exc
    except OSError as exc:
        raise CorruptFileError(f"cannot read {path}: {exc}") from exc
    if doc.get("format") != "bbbvpa-study":
        raise CorruptFileError(f"{path}: not a bbbvpa study file")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: study format v{doc.get('version')} not supported")
    records = [ReplicateRecord.from_json(json.dumps(r)) for r in doc["records"]]
    truth = BvpaParams(**doc["truth"])
    return aggregate(truth, int(doc["n"]), float(doc["gamma"]), records)


def write_study_table(result: StudyResult, path) -> None:
    """Tab-separated summary laid out like a results table: one column per
    parameter, one row per statistic."""
    rows = [
        ["", *PARAM_NAMES],
        ["Original Parameter", *(f"{v:.6g}" for v in astuple(result.truth))],
        ["Average Bayes Estimates", *(f"{v:.6g}" for v in result.mean_estimate)],
        ["Mean Square Error", *(f"{v:.6g}" for v in result.mse)],
        ["Credible Intervals",
         *(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in zip(result.mean_lo, result.mean_hi))],
        ["Coverage Probability", *(f"{v:.6g}" for v in result.coverage)],
    ]
    with open(path, "w") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def empirical_survival_series(sample: BivariateSample, p: BvpaParams, grid_size: int = 200) -> dict:
    """Plot-ready marginal survival curves, empirical and fitted.

    Returns ``{"x1": {...}, "x2": {...}}``; each entry holds ``x`` and
    ``empirical`` (the step points ``(x_(i), (n - i) / n)``) and ``grid``
    and ``model`` (closed-form marginal survival from ``mu_j`` to the
    sample maximum).
    """
    out = {}
    for key, x, mu, sf in (
        ("x1", sample.x1, p.mu1, marginal_sf_x1),
        ("x2", sample.x2, p.mu2, marginal_sf_x2),
    ):
        xs = np.sort(x)
        n = xs.size
        grid = np.linspace(mu, max(float(xs[-1]), mu), grid_size)
        out[key] = {
            "x": xs,
            "empirical": (n - np.arange(1, n + 1)) / n,
            "grid": grid,
            "model": np.asarray(sf(p, grid), dtype=float),
        }
    return out
