"""Gamma, log-Gamma and Bessel J of the first kind, plus the first positive zero of J_nu.

Gamma and log-Gamma delegate to :mod:`math` (Lanczos-type, ~1 ulp). Bessel J is an
ascending series on ``x <= 12`` with elementary closed forms for ``nu = +-1/2``; the
oscillatory range beyond the series cut-over is delegated to :func:`scipy.special.jv`.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from scipy import optimize, special

__all__ = [
    "BesselOrder",
    "bessel_first_zero",
    "bessel_j",
    "gamma_fn",
    "log_gamma",
]

_SERIES_MAX_X = 12.0


@dataclass(frozen=True)
class BesselOrder:
    """Order of J_nu. Only ``nu >= -1/2`` is supported."""

    nu: float

    def __post_init__(self):
        if not math.isfinite(self.nu) or self.nu < -0.5:
            raise ValueError(f"Bessel order must satisfy nu >= -1/2, got {self.nu!r}")


def _as_order(order) -> BesselOrder:
    return order if isinstance(order, BesselOrder) else BesselOrder(float(order))


def log_gamma(x: float) -> float:
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x!r}")
    if x < 170.0:
        return math.gamma(x)
    # math.gamma raises OverflowError past ~171.6; the exp route returns inf instead.
    return math.exp(math.lgamma(x))


def _series_j(nu: float, x: float) -> float:
    # J_nu(x) = sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))
    q = -0.25 * x * x
    term = math.exp(nu * (math.log(x) - math.log(2.0)) - math.lgamma(nu + 1.0))  # x/2 may underflow
    terms = [term]
    k = 0
    while k < 500:
        k += 1
        term *= q / (k * (k + nu))
        terms.append(term)
        if k > x and abs(term) < 1e-17 * abs(terms[0]) + 1e-300:
            break
    return math.fsum(terms)


_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def bessel_j(order, x: float) -> float:
    """J_nu(x) for ``nu >= -1/2`` and ``x >= 0``.

    >>> bessel_j(0, 0.0)
    1.0
    """
    nu = _as_order(order).nu
    if not x >= 0:
        raise ValueError(f"bessel_j requires x >= 0, got {x!r}")
    if nu == -0.5:
        if x == 0:
            return math.inf
        # sqrt(2/pi) / sqrt(x) rather than sqrt(2/(pi x)), which overflows for subnormal x
        return _SQRT_2_OVER_PI / math.sqrt(x) * math.cos(x)
    if nu == 0.5:
        if x == 0:
            return 0.0
        return _SQRT_2_OVER_PI / math.sqrt(x) * math.sin(x)
    if x == 0:
        return 1.0 if nu == 0 else (0.0 if nu > 0 else math.inf)
    if x <= _SERIES_MAX_X:
        return _series_j(nu, x)
    return float(special.jv(nu, x))


def _mcmahon_first_zero(nu: float) -> float:
    mu = 4.0 * nu * nu
    b = (1.0 + 0.5 * nu - 0.25) * math.pi
    eight_b = 8.0 * b
    return b - (mu - 1.0) / eight_b - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * eight_b**3)


class BesselZeroError(RuntimeError):
    """Bracket search for the first zero failed (an internal invariant violation)."""


def bessel_first_zero(order) -> float:
    """Smallest positive zero of J_nu.

    J_nu is positive on (0, j_nu,1) for nu > -1, so the bracket is found by stepping
    forward from a point below the McMahon estimate until the sign flips.
    """
    nu = _as_order(order).nu
    if nu == -0.5:
        return 0.5 * math.pi
    if nu == 0.5:
        return math.pi

    guess = _mcmahon_first_zero(nu)
    # j_nu,1 > nu always; the McMahon estimate is within ~0.1 for small nu and
    # drifts high for large nu, so start the scan well below both.
    lo = max(1e-3, min(nu, guess - 1.0), 0.5 * guess)
    f_lo = bessel_j(nu, lo)
    if not f_lo > 0:
        raise BesselZeroError(f"J_{nu} not positive at scan start x={lo}")
    step = 0.25
    hi = lo + step
    for _ in range(4000):
        f_hi = bessel_j(nu, hi)
        if f_hi <= 0:
            break
        lo, f_lo = hi, f_hi
        hi += step
    else:
        raise BesselZeroError(f"no sign change of J_{nu} found up to x={hi}")
    if f_hi == 0:
        return hi
    return optimize.brentq(lambda s: bessel_j(nu, s), lo, hi, xtol=1e-15, rtol=4 * sys.float_info.epsilon,
                          maxiter=200)
