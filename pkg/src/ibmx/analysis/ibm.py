"""Deterministic survival of iterated Brownian motion from the outer exit-time law.

Conditionally on the two outer exit times ``u = tau-`` and ``v = tau+`` the IBM stays in the
domain up to time t exactly when the inner Brownian motion stays in ``(-u, v)``. Hence

    P[tau(Z) > t] = int int P0[eta(-u,v) > t] f(u) f(v) du dv                (density form)
                  = int int d2/du dv P0[eta(-u,v) > t] * S(u) S(v) du dv      (mixed form)

where the second line is the first integrated by parts in both variables; the boundary
terms vanish because the interval survival is zero when u or v is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import interval
from .quadrature import QuadratureError, log_integral_lx
from .tails import TailFunction

__all__ = ["QuadratureResult", "log_quadrature_ibm", "quadrature_ibm", "quadrature_ibm_report"]

_PI2_HALF = 0.5 * math.pi**2
FORM_RTOL = 1e-8


@dataclass(frozen=True)
class QuadratureResult:
    t: float
    log_value: float
    log_density_form: float | None
    discrepancy: float | None
    refinement: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _log_mixed_partial(u, v, t):
    L = u + v
    theta = t / (L * L)
    la = np.full(u.shape, -np.inf)
    sg = np.zeros(u.shape)
    big = theta >= interval.THETA_CROSSOVER
    with np.errstate(divide="ignore", under="ignore"):
        if np.any(big):
            s = interval._mixed_partial_eigen(u[big], v[big], t, scaled=True)
            la[big] = np.log(np.abs(s)) - _PI2_HALF * theta[big]
            sg[big] = np.sign(s)
        small = ~big
        if np.any(small):
            s = interval._mixed_partial_images(u[small], v[small], t)
            la[small] = np.log(np.abs(s))
            sg[small] = np.sign(s)
    return la, sg


def _mixed_integrand(tail, t):
    def fn(L, x):
        u = x * L
        v = (1.0 - x) * L
        la, sg = _log_mixed_partial(u, v, t)
        with np.errstate(invalid="ignore"):
            la = la + tail.log_survival(u) + tail.log_survival(v)
        la = np.where(np.isnan(la), -np.inf, la)
        return la, sg

    return fn


def _density_integrand(tail, t):
    def fn(L, x):
        L, x = np.broadcast_arrays(L, x)
        u = x * L
        v = (1.0 - x) * L
        with np.errstate(divide="ignore", invalid="ignore"):
            la = interval._unit_log_survival(x, t / (L * L)) + tail.log_density(u) + tail.log_density(v)
        la = np.where(np.isnan(la), -np.inf, la)
        return la, np.ones(la.shape)

    return fn


def _check(tail, t):
    if not isinstance(tail, TailFunction):
        raise TypeError("tail must be a TailFunction")
    if not (math.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and >= 0, got {t}")


def quadrature_ibm_report(tail: TailFunction, t: float, density_check: bool = True,
                          rtol: float = FORM_RTOL) -> QuadratureResult:
    """Mixed-form quadrature at time t, plus the density form when the law has a density.

    ``discrepancy`` is the relative difference between the two forms; it is recorded,
    not enforced (see :func:`verify` helpers for the enforced check).
    """
    _check(tail, t)
    t = float(t)
    if t == 0:
        return QuadratureResult(0.0, 0.0, 0.0 if tail.has_density else None, 0.0 if tail.has_density else None, 0.0)
    scale = 2.0 * tail.scale
    split = math.sqrt(t / 10.0)  # half the L panels where the mixed partial is provably positive
    log_m, sign_m, rel = log_integral_lx(_mixed_integrand(tail, t), scale=scale, split=split, rtol=rtol)
    if sign_m <= 0:
        raise QuadratureError(f"mixed-form integral is not positive at t={t}")
    log_d = disc = None
    if density_check and tail.has_density:
        log_d, _, _ = log_integral_lx(_density_integrand(tail, t), scale=scale, split=split, rtol=rtol)
        disc = abs(math.expm1(log_d - log_m))
    return QuadratureResult(t, min(log_m, 0.0), log_d, disc, rel)


def log_quadrature_ibm(tail: TailFunction, t: float, rtol: float = FORM_RTOL) -> float:
    return quadrature_ibm_report(tail, t, density_check=False, rtol=rtol).log_value


def quadrature_ibm(tail: TailFunction, t: float, rtol: float = FORM_RTOL) -> float:
    """``P[tau(Z) > t]`` for IBM whose outer exit times have survival ``tail``."""
    return math.exp(log_quadrature_ibm(tail, t, rtol))
