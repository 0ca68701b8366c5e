"""Log full-conditional densities for slice-within-Gibbs.

Each evaluator is a function of one free parameter with the other six
held in a :class:`ConditionalTarget`.  Values are unnormalised log
densities; ``None`` marks points where the conditional is undefined
(non-positive scale or shape, location at or above the data minimum,
or a candidate that puts an observation on the diagonal).

The shape conditionals only need the region statistics at the frozen
locations and scales, so they are O(1) per evaluation.  Location and
scale conditionals move observations between ``I1`` and ``I2``; they are
evaluated as the full log-likelihood plus the prior kernel with the
partition recomputed at every candidate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .model import (
    PARAM_NAMES,
    BivariateSample,
    RegionStats,
    log_likelihood,
    log_likelihood_from_stats,
    region_stats,
)
from .priors import (
    PriorSpec,
    log_prior_alpha,
    log_prior_joint,
    log_prior_mu,
    log_prior_sigma,
)

__all__ = [
    "Mode",
    "ConditionalTarget",
    "log_posterior",
    "log_cond_alpha0",
    "log_cond_alpha1",
    "log_cond_alpha2",
    "log_cond_mu1",
    "log_cond_mu2",
    "log_cond_sigma1",
    "log_cond_sigma2",
    "log_cond_uni_mu1",
    "log_cond_uni_mu2",
    "log_cond_uni_sigma1",
    "log_cond_uni_sigma2",
]

_INDEX = {name: i for i, name in enumerate(PARAM_NAMES)}


class Mode(enum.Enum):
    BIVARIATE = "bivariate"
    UNIVARIATE = "univariate"


@dataclass(frozen=True, eq=False)
class ConditionalTarget:
    """One-dimensional slice of the posterior.

    Parameters
    ----------
    which : str
        Free parameter, one of :data:`bbbvpa.model.PARAM_NAMES`.
    state : sequence of float
        Current values of all seven parameters; the entry for ``which``
        is ignored.
    data : BivariateSample
    priors : PriorSpec
    mode : Mode
        ``UNIVARIATE`` is only meaningful for locations and scales and
        selects the marginal-likelihood conditional.
    stats : RegionStats, optional
        Precomputed region statistics at the frozen locations and scales,
        shared across the three shape updates of a sweep.
    """

    which: str
    state: tuple
    data: BivariateSample
    priors: PriorSpec
    mode: Mode = Mode.BIVARIATE
    stats: RegionStats | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.which not in _INDEX:
            raise ValueError(f"unknown parameter {self.which!r}")
        state = tuple(float(v) for v in self.state)
        if len(state) != 7:
            raise ValueError("state must hold 7 values")
        object.__setattr__(self, "state", state)
        if self.mode is Mode.UNIVARIATE and self.which.startswith("alpha"):
            raise ValueError("shape parameters have no univariate conditional")

    def __call__(self, value: float) -> float | None:
        return _EVALUATORS[self.mode, self.which](value, self)

    @cached_property
    def region(self) -> RegionStats:
        if self.stats is not None:
            return self.stats
        mu1, mu2, s1, s2 = self.state[:4]
        return region_stats(self.data.x1, self.data.x2, mu1, mu2, s1, s2)

    @cached_property
    def _other_coordinate(self):
        # standardized coordinate and log1p terms of the axis not being varied
        mu1, mu2, s1, s2 = self.state[:4]
        if self.which in ("mu1", "sigma1"):
            z = (self.data.x2 - mu2) / s2
        else:
            z = (self.data.x1 - mu1) / s1
        l = np.log1p(z)
        return z, l, float(l.sum())


def log_posterior(sample: BivariateSample, theta, priors: PriorSpec) -> float | None:
    """Joint unnormalised log posterior: log-likelihood plus all seven kernels."""
    ll = log_likelihood(sample, theta)
    if ll is None:
        return None
    lp = log_prior_joint(theta, priors, sample.min_x1, sample.min_x2)
    if lp is None:
        return None
    return ll + lp


# shape parameters --------------------------------------------------------

def log_cond_alpha0(a0: float, t: ConditionalTarget) -> float | None:
    if not a0 > 0.0:
        return None
    st = t.region
    if st.n0:
        return None
    _, _, _, _, _, a1, a2 = t.state
    return (
        st.n * math.log(a0 + a1 + a2)
        + st.n1 * math.log(a0 + a2)
        - (a0 + a2 + 1.0) * st.s12
        + st.n2 * math.log(a0 + a1)
        - (a0 + a1 + 1.0) * st.s21
        + log_prior_alpha(0, a0, t.priors)
    )


def log_cond_alpha1(a1: float, t: ConditionalTarget) -> float | None:
    if not a1 > 0.0:
        return None
    st = t.region
    if st.n0:
        return None
    _, _, _, _, a0, _, a2 = t.state
    return (
        st.n * math.log(a0 + a1 + a2)
        - st.n * math.log(a1 + a2)
        + st.n1 * math.log(a1)
        - (a1 + 1.0) * st.s11
        + st.n2 * math.log(a0 + a1)
        - (a0 + a1 + 1.0) * st.s21
        + log_prior_alpha(1, a1, t.priors)
    )


def log_cond_alpha2(a2: float, t: ConditionalTarget) -> float | None:
    if not a2 > 0.0:
        return None
    st = t.region
    if st.n0:
        return None
    _, _, _, _, a0, a1, _ = t.state
    return (
        st.n * math.log(a0 + a1 + a2)
        - st.n * math.log(a1 + a2)
        + st.n1 * math.log(a0 + a2)
        - (a0 + a2 + 1.0) * st.s12
        + st.n2 * math.log(a2)
        - (a2 + 1.0) * st.s22
        + log_prior_alpha(2, a2, t.priors)
    )


# locations and scales, bivariate likelihood ------------------------------

def _loglik_varying(t: ConditionalTarget, axis: int, mu: float, sigma: float) -> float | None:
    z_other, l_other, l_other_sum = t._other_coordinate
    x = t.data.x1 if axis == 1 else t.data.x2
    z = (x - mu) / sigma
    l = np.log1p(z)
    if axis == 1:
        in1 = z < z_other
        in2 = z > z_other
    else:
        in1 = z_other < z
        in2 = z_other > z
    n1 = int(np.count_nonzero(in1))
    n2 = int(np.count_nonzero(in2))
    n = x.size
    if n1 + n2 != n:
        return None
    l_sum = float(l.sum())
    if axis == 1:
        s11 = float(l @ in1)
        s12 = float(l_other @ in1)
        s21, s22 = l_sum - s11, l_other_sum - s12
    else:
        s12 = float(l @ in1)
        s11 = float(l_other @ in1)
        s21, s22 = l_other_sum - s11, l_sum - s12
    st = RegionStats(n, 0, n1, n2, s11, s12, s21, s22)
    _, _, s1, s2, a0, a1, a2 = t.state
    if axis == 1:
        s1 = sigma
    else:
        s2 = sigma
    return log_likelihood_from_stats(st, s1, s2, a0, a1, a2)


def log_cond_mu1(m1: float, t: ConditionalTarget) -> float | None:
    if not m1 < t.data.min_x1:
        return None
    ll = _loglik_varying(t, 1, m1, t.state[2])
    if ll is None:
        return None
    return ll + log_prior_mu(1, m1, t.priors, t.data.min_x1)


def log_cond_mu2(m2: float, t: ConditionalTarget) -> float | None:
    if not m2 < t.data.min_x2:
        return None
    ll = _loglik_varying(t, 2, m2, t.state[3])
    if ll is None:
        return None
    return ll + log_prior_mu(2, m2, t.priors, t.data.min_x2)


def log_cond_sigma1(s1: float, t: ConditionalTarget) -> float | None:
    if not s1 > 0.0:
        return None
    ll = _loglik_varying(t, 1, t.state[0], s1)
    if ll is None:
        return None
    return ll + log_prior_sigma(1, s1, t.priors)


def log_cond_sigma2(s2: float, t: ConditionalTarget) -> float | None:
    if not s2 > 0.0:
        return None
    ll = _loglik_varying(t, 2, t.state[1], s2)
    if ll is None:
        return None
    return ll + log_prior_sigma(2, s2, t.priors)


# locations and scales, marginal likelihood --------------------------------

def _marginal_loglik(x, mu, sigma, a_own, a0, a_other) -> float:
    # sum of log{(a0+a_own)/s (1+z)^-(a0+a_own+1) - a0/s (1+z)^-(a0+a1+a2+1)}
    l = np.log1p((x - mu) / sigma)
    inner = np.log((a0 + a_own) - a0 * np.exp(-a_other * l))
    return float(np.sum(inner - (a0 + a_own + 1.0) * l)) - x.size * math.log(sigma)


def log_cond_uni_mu1(m1: float, t: ConditionalTarget) -> float | None:
    if not m1 < t.data.min_x1:
        return None
    _, _, s1, _, a0, a1, a2 = t.state
    return (
        _marginal_loglik(t.data.x1, m1, s1, a1, a0, a2)
        + log_prior_mu(1, m1, t.priors, t.data.min_x1)
    )


def log_cond_uni_mu2(m2: float, t: ConditionalTarget) -> float | None:
    if not m2 < t.data.min_x2:
        return None
    _, _, _, s2, a0, a1, a2 = t.state
    return (
        _marginal_loglik(t.data.x2, m2, s2, a2, a0, a1)
        + log_prior_mu(2, m2, t.priors, t.data.min_x2)
    )


def log_cond_uni_sigma1(s1: float, t: ConditionalTarget) -> float | None:
    if not s1 > 0.0:
        return None
    mu1, _, _, _, a0, a1, a2 = t.state
    return (
        _marginal_loglik(t.data.x1, mu1, s1, a1, a0, a2)
        + log_prior_sigma(1, s1, t.priors)
    )


def log_cond_uni_sigma2(s2: float, t: ConditionalTarget) -> float | None:
    if not s2 > 0.0:
        return None
    _, mu2, _, _, a0, a1, a2 = t.state
    return (
        _marginal_loglik(t.data.x2, mu2, s2, a2, a0, a1)
        + log_prior_sigma(2, s2, t.priors)
    )


_EVALUATORS = {
    (Mode.BIVARIATE, "alpha0"): log_cond_alpha0,
    (Mode.BIVARIATE, "alpha1"): log_cond_alpha1,
    (Mode.BIVARIATE, "alpha2"): log_cond_alpha2,
    (Mode.BIVARIATE, "mu1"): log_cond_mu1,
    (Mode.BIVARIATE, "mu2"): log_cond_mu2,
    (Mode.BIVARIATE, "sigma1"): log_cond_sigma1,
    (Mode.BIVARIATE, "sigma2"): log_cond_sigma2,
    (Mode.UNIVARIATE, "mu1"): log_cond_uni_mu1,
    (Mode.UNIVARIATE, "mu2"): log_cond_uni_mu2,
    (Mode.UNIVARIATE, "sigma1"): log_cond_uni_sigma1,
    (Mode.UNIVARIATE, "sigma2"): log_cond_uni_sigma2,
}
