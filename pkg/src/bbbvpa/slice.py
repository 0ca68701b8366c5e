"""Univariate slice sampling with stepping out and shrinkage.

Two transitions are provided.  :func:`slice_step_standard` is Neal's
(2003) stepping-out/shrinkage update, with points where the log density
is undefined (``None``) treated as outside the slice.
:func:`slice_step_modified` targets densities with undefined pockets or
half-lines: stepping out continues through undefined endpoints, and
proposals that land on undefined points are redrawn from the same
interval instead of shrinking it.

Both work on the log scale: the slice level is ``f(x0) - E`` with
``E ~ Exp(1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, SamplerStuckError

__all__ = ["SliceConfig", "LogDensityFn", "slice_step_standard", "slice_step_modified"]

LogDensityFn = Callable[[float], Optional[float]]


@dataclass(frozen=True)
class SliceConfig:
    """Tuning constants for one-dimensional slice updates.

    Attributes
    ----------
    width : float
        Initial bracket width ``w``.
    max_stepout : int
        Total number of step-out extensions allowed (Neal's ``m``), split
        at random between the two sides.  Reaching it ends stepping out.
    max_shrink : int
        Maximum number of proposals per transition, redraws included.
        Exceeding it raises :class:`SamplerStuckError`.
    max_redraw : int
        Modified stepper only: after this many consecutive undefined
        proposals the next undefined proposal shrinks the bracket.
    """

    width: float = 1.0
    max_stepout: int = 100
    max_shrink: int = 1000
    max_redraw: int = 10

    def __post_init__(self):
        if not self.width > 0.0:
            raise ConfigError("slice width must be > 0")
        if self.max_stepout < 1 or self.max_shrink < 1 or self.max_redraw < 0:
            raise ConfigError("slice limits must be positive")


DEFAULT_SLICE = SliceConfig()


def _initial_bracket(x0, cfg, rng):
    left = x0 - cfg.width * rng.random()
    right = left + cfg.width
    j = int(math.floor(cfg.max_stepout * rng.random()))
    k = cfg.max_stepout - 1 - j
    return left, right, j, k


def _start_level(x0, f, rng):
    fx0 = f(x0)
    if fx0 is None or not math.isfinite(fx0):
        raise SamplerStuckError(
            "slice update started at a point with undefined log density",
            {"x0": x0, "f(x0)": fx0},
        )
    return fx0 - rng.standard_exponential()


def slice_step_standard(
    x0: float, f: LogDensityFn, rng: np.random.Generator, cfg: SliceConfig = DEFAULT_SLICE
) -> float:
    """One stepping-out/shrinkage slice transition from ``x0``.

    ``f`` returns the unnormalised log density, or ``None`` outside its
    support.  The returned point ``x1`` satisfies ``f(x1) > level``.
    """
    level = _start_level(x0, f, rng)
    left, right, j, k = _initial_bracket(x0, cfg, rng)

    def inside(x):
        v = f(x)
        return v is not None and v > level

    while j > 0 and inside(left):
        left -= cfg.width
        j -= 1
    while k > 0 and inside(right):
        right += cfg.width
        k -= 1

    for _ in range(cfg.max_shrink):
        x1 = left + (right - left) * rng.random()
        v = f(x1)
        if v is not None and v > level:
            return x1
        if x1 < x0:
            left = x1
        else:
            right = x1
    raise SamplerStuckError(
        "standard slice shrinkage exceeded its proposal budget",
        {"x0": x0, "level": level, "left": left, "right": right,
         "max_shrink": cfg.max_shrink},
    )


def slice_step_modified(
    x0: float, f: LogDensityFn, rng: np.random.Generator, cfg: SliceConfig = DEFAULT_SLICE
) -> float:
    """Slice transition for targets that are undefined on part of the line.

    Differences from :func:`slice_step_standard`:

    * stepping out continues past an endpoint where ``f`` is undefined,
      as well as past an endpoint inside the slice;
    * a proposal where ``f`` is undefined is redrawn from the current
      bracket without shrinking it;
    * a defined proposal below the slice level shrinks the bracket.

    Long runs of undefined proposals (more than ``cfg.max_redraw`` in a
    row) shrink the bracket at the undefined point, which keeps the cost
    bounded when the bracket reaches far into an undefined half-line.
    Every rule depends only on the proposal and the bracket, so the
    transition still leaves the target invariant.
    """
    level = _start_level(x0, f, rng)
    left, right, j, k = _initial_bracket(x0, cfg, rng)

    def keep_going(x):
        v = f(x)
        return v is None or v > level

    while j > 0 and keep_going(left):
        left -= cfg.width
        j -= 1
    while k > 0 and keep_going(right):
        right += cfg.width
        k -= 1

    undefined_run = 0
    redraws = 0
    for _ in range(cfg.max_shrink):
        x1 = left + (right - left) * rng.random()
        v = f(x1)
        if v is None:
            redraws += 1
            undefined_run += 1
            if undefined_run <= cfg.max_redraw:
                continue
        elif v > level:
            return x1
        undefined_run = 0
        if x1 < x0:
            left = x1
        else:
            right = x1
    raise SamplerStuckError(
        "modified slice sampler exceeded its proposal budget",
        {"x0": x0, "level": level, "left": left, "right": right,
         "redraws": redraws, "max_shrink": cfg.max_shrink},
    )
