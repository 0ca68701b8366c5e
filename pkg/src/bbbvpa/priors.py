"""Independent priors on the seven parameters.

Shapes ``alpha_i ~ Gamma(k_i, theta_i)`` and scales
``sigma_j ~ Gamma(c_j, d_j)`` (shape/scale parametrisation); locations
``mu_j`` are normal with mean ``mu_p_j`` and standard deviation
``sig_p_j`` truncated to ``(-inf, min_i x_ji)``.

Every kernel drops its additive normalising constant and returns
``None`` outside the support.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import ParameterError

__all__ = [
    "PriorSpec",
    "DEFAULT_PRIORS",
    "log_prior_alpha",
    "log_prior_sigma",
    "log_prior_mu",
    "log_prior_joint",
]


@dataclass(frozen=True)
class PriorSpec:
    k0: float
    k1: float
    k2: float
    theta0: float
    theta1: float
    theta2: float
    c1: float
    c2: float
    d1: float
    d2: float
    mu_p1: float
    mu_p2: float
    sig_p1: float
    sig_p2: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value):
                raise ParameterError(f"prior {f.name} must be finite")
            if not f.name.startswith("mu_p") and value <= 0.0:
                raise ParameterError(f"prior {f.name} must be > 0, got {value!r}")
            object.__setattr__(self, f.name, value)

    def as_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "PriorSpec":
        return PriorSpec(**{**asdict(self), **changes})


DEFAULT_PRIORS = PriorSpec(
    k0=2.0, k1=4.0, k2=3.0,
    theta0=3.0, theta1=3.0, theta2=2.0,
    c1=0.1, c2=3.0, d1=0.25, d2=2.0,
    mu_p1=0.0, mu_p2=0.0, sig_p1=1.0, sig_p2=1.0,
)


def _gamma_kernel(x: float, shape: float, scale: float) -> float | None:
    if not x > 0.0:
        return None
    return (shape - 1.0) * math.log(x) - x / scale


def log_prior_alpha(i: int, alpha: float, spec: PriorSpec) -> float | None:
    """``(k_i - 1) log(alpha) - alpha / theta_i``; ``None`` for ``alpha <= 0``."""
    shape = (spec.k0, spec.k1, spec.k2)[i]
    scale = (spec.theta0, spec.theta1, spec.theta2)[i]
    return _gamma_kernel(alpha, shape, scale)


def log_prior_sigma(j: int, sigma: float, spec: PriorSpec) -> float | None:
    """``(c_j - 1) log(sigma) - sigma / d_j``; ``None`` for ``sigma <= 0``.

    ``j`` is 1 or 2.
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    shape = spec.c1 if j == 1 else spec.c2
    scale = spec.d1 if j == 1 else spec.d2
    return _gamma_kernel(sigma, shape, scale)


def log_prior_mu(j: int, mu: float, spec: PriorSpec, data_min: float) -> float | None:
    """Truncated-normal kernel ``-0.5 (mu - mu_p_j)^2 / sig_p_j^2``.

    The truncation is to the open half-line below ``data_min``; the
    normaliser ``Phi(data_min)`` does not depend on ``mu`` and is dropped.
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    if not mu < data_min:
        return None
    centre = spec.mu_p1 if j == 1 else spec.mu_p2
    sd = spec.sig_p1 if j == 1 else spec.sig_p2
    return -0.5 * (mu - centre) ** 2 / (sd * sd)


def log_prior_joint(theta, spec: PriorSpec, min_x1: float, min_x2: float) -> float | None:
    """Sum of the seven independent kernels at ``theta`` (order of
    :data:`bbbvpa.model.PARAM_NAMES`)."""
    mu1, mu2, s1, s2, a0, a1, a2 = (float(v) for v in theta)
    parts = (
        log_prior_mu(1, mu1, spec, min_x1),
        log_prior_mu(2, mu2, spec, min_x2),
        log_prior_sigma(1, s1, spec),
        log_prior_sigma(2, s2, spec),
        log_prior_alpha(0, a0, spec),
        log_prior_alpha(1, a1, spec),
        log_prior_alpha(2, a2, spec),
    )
    if any(v is None for v in parts):
        return None
    return sum(parts)
