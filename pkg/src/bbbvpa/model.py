"""Marshall-Olkin bivariate Pareto (MOBVPA) and its absolutely continuous
part (BB-BVPA).

Both distributions are built from three independent Pareto type II
variables

.. math::
    U_0 \\sim PA(II)(0, 1, \\alpha_0), \\quad
    U_j \\sim PA(II)(\\mu_j, \\sigma_j, \\alpha_j), \\quad j = 1, 2

with :math:`X_j = \\min\\{\\mu_j + \\sigma_j U_0, U_j\\}`.  MOBVPA puts
probability :math:`1 - p = \\alpha_0 / (\\alpha_0 + \\alpha_1 + \\alpha_2)` on
the standardized diagonal :math:`z_1 = z_2`, where
:math:`z_j = (x_j - \\mu_j) / \\sigma_j`.  BB-BVPA is MOBVPA conditioned off
that diagonal.

All densities are evaluated in log space with ``log1p`` of the
standardized coordinates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import astuple, dataclass, field, fields

import numpy as np

from .errors import DegenerateInputError, ParameterError

__all__ = [
    "PARAM_NAMES",
    "BvpaParams",
    "BivariateSample",
    "Region",
    "RegionPartition",
    "RegionStats",
    "survival_mo",
    "survival_bb",
    "survival_singular",
    "pdf_mo",
    "pdf_bb",
    "log_pdf_bb",
    "marginal_pdf_x1",
    "marginal_pdf_x2",
    "marginal_sf_x1",
    "marginal_sf_x2",
    "mixture_weight",
    "partition",
    "region_stats",
    "log_likelihood",
    "log_likelihood_from_stats",
    "pareto2_quantile",
    "sample_pareto2",
    "sample_mo",
    "sample_bb",
]

PARAM_NAMES = ("mu1", "mu2", "sigma1", "sigma2", "alpha0", "alpha1", "alpha2")


@dataclass(frozen=True)
class BvpaParams:
    """Seven-parameter vector ``(mu1, mu2, sigma1, sigma2, alpha0, alpha1, alpha2)``.

    Scales and shapes must be strictly positive; construction raises
    :class:`ParameterError` otherwise.
    """

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    alpha0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, value)
        for name in PARAM_NAMES[2:]:
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)!r}")

    @classmethod
    def from_array(cls, values) -> "BvpaParams":
        values = [float(v) for v in values]
        if len(values) != 7:
            raise ParameterError(f"expected 7 values, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def as_dict(self) -> dict:
        return dict(zip(PARAM_NAMES, astuple(self)))

    @property
    def alpha_sum(self) -> float:
        return self.alpha0 + self.alpha1 + self.alpha2

    def check_support(self, sample: "BivariateSample") -> None:
        """Raise unless both locations lie strictly below the data minima."""
        if not (self.mu1 < sample.min_x1 and self.mu2 < sample.min_x2):
            raise ParameterError(
                f"locations ({self.mu1}, {self.mu2}) must lie below the data "
                f"minima ({sample.min_x1}, {sample.min_x2})"
            )


def _unpack(p) -> tuple:
    if isinstance(p, BvpaParams):
        return astuple(p)
    values = tuple(float(v) for v in p)
    if len(values) != 7:
        raise ParameterError(f"expected 7 parameter values, got {len(values)}")
    return values


@dataclass(frozen=True)
class BivariateSample:
    """``n`` observed pairs stored column-wise.

    ``singular`` is only set by :func:`sample_mo` and flags pairs generated
    on the diagonal component.
    """

    x1: np.ndarray
    x2: np.ndarray
    singular: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        x1 = np.ascontiguousarray(self.x1, dtype=float)
        x2 = np.ascontiguousarray(self.x2, dtype=float)
        if x1.ndim != 1 or x1.shape != x2.shape:
            raise ValueError("x1 and x2 must be 1-D arrays of equal length")
        if x1.size == 0:
            raise ValueError("a BivariateSample must contain at least one pair")
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValueError("sample contains non-finite values")
        x1.flags.writeable = False
        x2.flags.writeable = False
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "min_x1", float(x1.min()))
        object.__setattr__(self, "min_x2", float(x2.min()))

    @classmethod
    def from_pairs(cls, pairs) -> "BivariateSample":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self) -> int:
        return self.x1.size

    def __len__(self):
        return self.x1.size

    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x1, self.x2])


class Region(enum.Enum):
    LOWER = 1  # (x1 - mu1)/sigma1 < (x2 - mu2)/sigma2, index set I1
    UPPER = 2  # (x1 - mu1)/sigma1 > (x2 - mu2)/sigma2, index set I2
    DIAGONAL = 0  # equality, index set I0


@dataclass(frozen=True)
class RegionPartition:
    i0: np.ndarray
    i1: np.ndarray
    i2: np.ndarray

    @property
    def n0(self) -> int:
        return self.i0.size

    @property
    def n1(self) -> int:
        return self.i1.size

    @property
    def n2(self) -> int:
        return self.i2.size


@dataclass(frozen=True)
class RegionStats:
    """Sufficient statistics of the bivariate likelihood for fixed locations
    and scales.

    ``s11`` is the sum of ``log1p(z1)`` over ``I1``, ``s12`` the sum of
    ``log1p(z2)`` over ``I1``; ``s21`` and ``s22`` are the same over ``I2``.
    """

    n: int
    n0: int
    n1: int
    n2: int
    s11: float
    s12: float
    s21: float
    s22: float


def _std(x, mu, sigma):
    return (np.asarray(x, dtype=float) - mu) / sigma


def _scalar_or_array(values):
    values = np.asarray(values)
    return float(values) if values.ndim == 0 else values


def mixture_weight(p) -> float:
    """Weight ``(alpha1 + alpha2) / (alpha0 + alpha1 + alpha2)`` of the
    absolutely continuous part."""
    _, _, _, _, a0, a1, a2 = _unpack(p)
    return (a1 + a2) / (a0 + a1 + a2)


def survival_mo(p: BvpaParams, x1, x2):
    """Joint survival ``P(X1 > x1, X2 > x2)`` of MOBVPA.

    Coordinates below their location contribute a factor of one.
    """
    if not isinstance(p, BvpaParams):
        p = BvpaParams.from_array(p)
    l1 = np.log1p(np.maximum(_std(x1, p.mu1, p.sigma1), 0.0))
    l2 = np.log1p(np.maximum(_std(x2, p.mu2, p.sigma2), 0.0))
    log_s = -p.alpha0 * np.maximum(l1, l2) - p.alpha1 * l1 - p.alpha2 * l2
    return _scalar_or_array(np.exp(log_s))


def survival_singular(p: BvpaParams, x1, x2):
    """Survival of the singular (diagonal) component."""
    if not isinstance(p, BvpaParams):
        p = BvpaParams.from_array(p)
    l1 = np.log1p(np.maximum(_std(x1, p.mu1, p.sigma1), 0.0))
    l2 = np.log1p(np.maximum(_std(x2, p.mu2, p.sigma2), 0.0))
    return _scalar_or_array(np.exp(-p.alpha_sum * np.maximum(l1, l2)))


def survival_bb(p: BvpaParams, x1, x2):
    """Joint survival of BB-BVPA (the absolutely continuous part)."""
    if not isinstance(p, BvpaParams):
        p = BvpaParams.from_array(p)
    a0, a1, a2 = p.alpha0, p.alpha1, p.alpha2
    a = a0 + a1 + a2
    l1 = np.log1p(np.maximum(_std(x1, p.mu1, p.sigma1), 0.0))
    l2 = np.log1p(np.maximum(_std(x2, p.mu2, p.sigma2), 0.0))
    lower = l1 <= l2
    first = np.where(
        lower, -(a0 + a2) * l2 - a1 * l1, -a2 * l2 - (a0 + a1) * l1
    )
    lmax = np.maximum(l1, l2)
    out = (a * np.exp(first) - a0 * np.exp(-a * lmax)) / (a1 + a2)
    return _scalar_or_array(out)


def _log_f1(a0, a1, a2, s1, s2, l1, l2):
    return (
        math.log(a1) + math.log(a0 + a2) - math.log(s1) - math.log(s2)
        - (a0 + a2 + 1.0) * l2 - (a1 + 1.0) * l1
    )


def _log_f2(a0, a1, a2, s1, s2, l1, l2):
    return (
        math.log(a2) + math.log(a0 + a1) - math.log(s1) - math.log(s2)
        - (a2 + 1.0) * l2 - (a0 + a1 + 1.0) * l1
    )


def pdf_mo(p: BvpaParams, x1: float, x2: float) -> tuple[Region, float]:
    """Region of ``(x1, x2)`` and the matching MOBVPA density branch.

    On the diagonal the returned value is the density of the singular part
    with respect to one-dimensional measure in ``x1``.
    """
    z1 = (float(x1) - p.mu1) / p.sigma1
    z2 = (float(x2) - p.mu2) / p.sigma2
    if z1 < 0.0 or z2 < 0.0:
        raise ParameterError("density requires x1 >= mu1 and x2 >= mu2")
    l1, l2 = math.log1p(z1), math.log1p(z2)
    a0, a1, a2 = p.alpha0, p.alpha1, p.alpha2
    if z1 < z2:
        return Region.LOWER, math.exp(_log_f1(a0, a1, a2, p.sigma1, p.sigma2, l1, l2))
    if z1 > z2:
        return Region.UPPER, math.exp(_log_f2(a0, a1, a2, p.sigma1, p.sigma2, l1, l2))
    log_f0 = math.log(a0) - math.log(p.sigma1) - (a0 + a1 + a2 + 1.0) * l1
    return Region.DIAGONAL, math.exp(log_f0)


def log_pdf_bb(p: BvpaParams, x1, x2):
    """Log density of BB-BVPA; vectorised over ``x1``, ``x2``.

    Raises :class:`DegenerateInputError` for points on the standardized
    diagonal and :class:`ParameterError` for points below the locations.
    """
    z1 = _std(x1, p.mu1, p.sigma1)
    z2 = _std(x2, p.mu2, p.sigma2)
    if np.any(z1 <= 0.0) or np.any(z2 <= 0.0):
        raise ParameterError("density requires x1 > mu1 and x2 > mu2")
    if np.any(z1 == z2):
        raise DegenerateInputError("BB-BVPA density is undefined on the diagonal")
    a0, a1, a2 = p.alpha0, p.alpha1, p.alpha2
    l1, l2 = np.log1p(z1), np.log1p(z2)
    log_inv_p = math.log(a0 + a1 + a2) - math.log(a1 + a2)
    out = np.where(
        z1 < z2,
        _log_f1(a0, a1, a2, p.sigma1, p.sigma2, l1, l2),
        _log_f2(a0, a1, a2, p.sigma1, p.sigma2, l1, l2),
    )
    return _scalar_or_array(out + log_inv_p)


def pdf_bb(p: BvpaParams, x1, x2):
    """Density of BB-BVPA off the diagonal (``f1 / p`` or ``f2 / p``)."""
    return _scalar_or_array(np.exp(log_pdf_bb(p, x1, x2)))


def _log_marginal(x, mu, sigma, a_own, a0, a_other):
    z = _std(x, mu, sigma)
    if np.any(z <= 0.0):
        raise ParameterError("marginal density requires x > mu")
    l = np.log1p(z)
    a = a0 + a_own + a_other
    # (a0 + a_own) - a0 * (1 + z)^(-a_other) > 0 for z >= 0
    inner = np.log((a0 + a_own) - a0 * np.exp(-a_other * l))
    return (
        math.log(a) - math.log(a_own + a_other) - math.log(sigma)
        - (a0 + a_own + 1.0) * l + inner
    )


def marginal_pdf_x1(p: BvpaParams, x1):
    """Marginal density of ``X1`` under BB-BVPA."""
    return _scalar_or_array(
        np.exp(_log_marginal(x1, p.mu1, p.sigma1, p.alpha1, p.alpha0, p.alpha2))
    )


def marginal_pdf_x2(p: BvpaParams, x2):
    """Marginal density of ``X2`` under BB-BVPA."""
    return _scalar_or_array(
        np.exp(_log_marginal(x2, p.mu2, p.sigma2, p.alpha2, p.alpha0, p.alpha1))
    )


def _marginal_sf(x, mu, sigma, a_own, a0, a_other):
    l = np.log1p(np.maximum(_std(x, mu, sigma), 0.0))
    a = a0 + a_own + a_other
    return (a * np.exp(-(a0 + a_own) * l) - a0 * np.exp(-a * l)) / (a_own + a_other)


def marginal_sf_x1(p: BvpaParams, x1):
    """Closed-form marginal survival of ``X1``, i.e. ``survival_bb(p, x1, mu2)``."""
    return _scalar_or_array(
        _marginal_sf(x1, p.mu1, p.sigma1, p.alpha1, p.alpha0, p.alpha2)
    )


def marginal_sf_x2(p: BvpaParams, x2):
    return _scalar_or_array(
        _marginal_sf(x2, p.mu2, p.sigma2, p.alpha2, p.alpha0, p.alpha1)
    )


def partition(sample: BivariateSample, p) -> RegionPartition:
    """Split sample indices by comparing standardized coordinates.

    Exact float equality defines the diagonal set ``I0``.
    """
    mu1, mu2, s1, s2 = _unpack(p)[:4]
    z1 = (sample.x1 - mu1) / s1
    z2 = (sample.x2 - mu2) / s2
    return RegionPartition(
        i0=np.flatnonzero(z1 == z2),
        i1=np.flatnonzero(z1 < z2),
        i2=np.flatnonzero(z1 > z2),
    )


def region_stats(x1, x2, mu1, mu2, sigma1, sigma2) -> RegionStats:
    """Partition counts and the four region-restricted log sums."""
    z1 = (x1 - mu1) / sigma1
    z2 = (x2 - mu2) / sigma2
    l1 = np.log1p(z1)
    l2 = np.log1p(z2)
    in1 = z1 < z2
    in2 = z1 > z2
    n1 = int(np.count_nonzero(in1))
    n2 = int(np.count_nonzero(in2))
    n = x1.size
    return RegionStats(
        n=n,
        n0=n - n1 - n2,
        n1=n1,
        n2=n2,
        s11=float(np.sum(l1, where=in1)),
        s12=float(np.sum(l2, where=in1)),
        s21=float(np.sum(l1, where=in2)),
        s22=float(np.sum(l2, where=in2)),
    )


def log_likelihood_from_stats(st: RegionStats, sigma1, sigma2, a0, a1, a2) -> float:
    """BB-BVPA log-likelihood from region statistics (``n0`` must be 0)."""
    return (
        st.n * (math.log(a0 + a1 + a2) - math.log(a1 + a2))
        + st.n1 * (math.log(a1) + math.log(a0 + a2))
        + st.n2 * (math.log(a2) + math.log(a0 + a1))
        - (st.n1 + st.n2) * (math.log(sigma1) + math.log(sigma2))
        - (a0 + a2 + 1.0) * st.s12
        - (a1 + 1.0) * st.s11
        - (a0 + a1 + 1.0) * st.s21
        - (a2 + 1.0) * st.s22
    )


def log_likelihood(sample: BivariateSample, p) -> float | None:
    """BB-BVPA log-likelihood, or ``None`` where it is undefined.

    ``p`` may be a :class:`BvpaParams` or any length-7 sequence, so that
    out-of-domain vectors probed by samplers map to ``None`` instead of
    raising.  Undefined cases: a location at or above the data minimum,
    a non-positive scale or shape, or any observation on the diagonal.
    """
    mu1, mu2, s1, s2, a0, a1, a2 = _unpack(p)
    if not (s1 > 0.0 and s2 > 0.0 and a0 > 0.0 and a1 > 0.0 and a2 > 0.0):
        return None
    if not (mu1 < sample.min_x1 and mu2 < sample.min_x2):
        return None
    st = region_stats(sample.x1, sample.x2, mu1, mu2, s1, s2)
    if st.n0 > 0:
        return None
    return log_likelihood_from_stats(st, s1, s2, a0, a1, a2)


def pareto2_quantile(u, mu: float, sigma: float, alpha: float):
    """Inverse CDF of ``PA(II)(mu, sigma, alpha)``: ``mu + sigma((1-u)^(-1/alpha) - 1)``."""
    u = np.asarray(u, dtype=float)
    # tiny shapes can exceed the float range; +inf is the rounded value
    with np.errstate(over="ignore"):
        return _scalar_or_array(mu + sigma * np.expm1(-np.log1p(-u) / alpha))


def sample_pareto2(mu: float, sigma: float, alpha: float, rng: np.random.Generator, size=None):
    """Draw Pareto type II variates by inversion."""
    if sigma <= 0 or alpha <= 0:
        raise ParameterError("sigma and alpha must be > 0")
    return pareto2_quantile(rng.random(size), mu, sigma, alpha)


def _draw_mo(p: BvpaParams, n: int, rng: np.random.Generator):
    u0 = sample_pareto2(0.0, 1.0, p.alpha0, rng, n)
    u1 = sample_pareto2(p.mu1, p.sigma1, p.alpha1, rng, n)
    u2 = sample_pareto2(p.mu2, p.sigma2, p.alpha2, rng, n)
    common1 = p.mu1 + p.sigma1 * u0
    common2 = p.mu2 + p.sigma2 * u0
    # branch bookkeeping: singular iff the shared shock wins both minima
    win1 = common1 <= u1
    win2 = common2 <= u2
    x1 = np.where(win1, common1, u1)
    x2 = np.where(win2, common2, u2)
    return x1, x2, win1 & win2


def sample_mo(p: BvpaParams, n: int, rng: np.random.Generator) -> BivariateSample:
    """Draw ``n`` MOBVPA pairs; ``singular`` marks diagonal draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x1, x2, singular = _draw_mo(p, n, rng)
    return BivariateSample(x1, x2, singular=singular)


def sample_bb(p: BvpaParams, n: int, rng: np.random.Generator) -> BivariateSample:
    """Draw ``n`` BB-BVPA pairs by discarding singular MOBVPA draws.

    Draws are generated in batches sized from the acceptance rate ``p``;
    the first ``n`` accepted pairs in generation order are returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    accept = mixture_weight(p)
    xs1, xs2 = [], []
    have = 0
    while have < n:
        batch = int(math.ceil((n - have) / accept * 1.1)) + 16
        x1, x2, singular = _draw_mo(p, batch, rng)
        keep = ~singular
        xs1.append(x1[keep])
        xs2.append(x2[keep])
        have += int(keep.sum())
    return BivariateSample(np.concatenate(xs1)[:n], np.concatenate(xs2)[:n])
