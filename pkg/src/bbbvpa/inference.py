"""Posterior summaries: squared-error-loss Bayes estimates and shortest
order-statistic credible intervals (Chen and Shao, 1999)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gibbs import Chain
from .model import PARAM_NAMES, BvpaParams

__all__ = ["IntervalEstimate", "bayes_estimate", "credible_interval", "summarize"]


@dataclass(frozen=True)
class IntervalEstimate:
    param: str
    point: float
    lo: float
    hi: float
    gamma: float

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def bayes_estimate(chain: Chain) -> BvpaParams:
    """Coordinate-wise posterior mean of the retained draws."""
    if len(chain) == 0:
        raise ValueError("cannot summarise an empty chain")
    return BvpaParams.from_array(chain.draws.mean(axis=0))


def credible_interval(draws, gamma: float = 0.05) -> tuple[float, float]:
    """Shortest ``100(1 - gamma)%`` interval among order-statistic windows.

    With ``M`` sorted draws and ``K = floor(M * gamma)``, the candidates are
    ``(theta_(j), theta_(j + M - K))`` for ``j = 1..K`` (1-based); the
    narrowest wins and ties go to the smallest ``j``.
    """
    theta = np.sort(np.asarray(draws, dtype=float).ravel())
    m = theta.size
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if m < 2:
        raise ValueError("need at least two draws")
    k = int(math.floor(m * gamma))
    if k < 1:
        raise ValueError(f"M * gamma = {m * gamma} gives no candidate window")
    widths = theta[m - k:m] - theta[:k]
    j = int(np.argmin(widths))
    return float(theta[j]), float(theta[j + m - k])


def summarize(chain: Chain, gamma: float = 0.05) -> list[IntervalEstimate]:
    """Posterior mean and shortest credible interval for every parameter."""
    point = bayes_estimate(chain).as_array()
    out = []
    for i, name in enumerate(PARAM_NAMES):
        lo, hi = credible_interval(chain.draws[:, i], gamma)
        out.append(IntervalEstimate(name, float(point[i]), lo, hi, gamma))
    return out
