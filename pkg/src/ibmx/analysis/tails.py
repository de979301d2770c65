"""Laws of positive random variables given through their survival function."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .. import interval

__all__ = ["TailFunction", "log_gammaincc"]


def _log_gammaincc_cf(a, z):
    # modified Lentz continued fraction for Q(a, z), valid for z > a + 1
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return -z + a * np.log(z) - special.gammaln(a) + np.log(h)


def log_gammaincc(a: float, z):
    """``log Q(a, z)`` (regularized upper incomplete gamma) without underflow."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    with np.errstate(divide="ignore"):
        direct = np.log(special.gammaincc(a, z))
    far = z > a + 1.0
    out[~far] = direct[~far]
    if np.any(far):
        out[far] = _log_gammaincc_cf(a, z[far])
    return out[()] if out.ndim == 0 else out


def _log_of(fn):
    def log_fn(t):
        with np.errstate(divide="ignore"):
            return np.log(fn(t))

    return log_fn


@dataclass(frozen=True)
class TailFunction:
    """``t -> P[xi > t]`` with optional log forms, density, CDF and quantile.

    ``quantile(q)`` returns the t with ``P[xi > t] = q``. ``scale`` is a typical size of
    ``xi`` used to seed integration grids.
    """

    survival: Callable
    log_survival: Callable | None = None
    density: Callable | None = None
    log_density: Callable | None = None
    log_cdf: Callable | None = None
    quantile: Callable | None = None
    scale: float = 1.0
    name: str = "tail"

    def __post_init__(self):
        if self.log_survival is None:
            object.__setattr__(self, "log_survival", _log_of(self.survival))
        if self.density is not None and self.log_density is None:
            object.__setattr__(self, "log_density", _log_of(self.density))
        if self.log_cdf is None:
            surv = self.survival

            def log_cdf(t):
                with np.errstate(divide="ignore"):
                    return np.log1p(-np.asarray(surv(t)))

            object.__setattr__(self, "log_cdf", log_cdf)

    @property
    def has_density(self) -> bool:
        return self.density is not None

    def __call__(self, t):
        return self.survival(t)

    @classmethod
    def interval_exit(cls, u: float, v: float) -> "TailFunction":
        """Exit time of standard Brownian motion from ``(-u, v)`` started at 0."""
        law = interval.IntervalLaw(u, v)

        def quantile(q):
            q = np.asarray(q, dtype=float)
            return interval.sample_exit_uv(u, v, q)

        def pos(fn, at_zero):
            def wrapped(t):
                t = np.asarray(t, dtype=float)
                out = np.full(t.shape, at_zero)
                live = t > 0
                if np.any(live):
                    out[live] = fn(u, v, t[live])
                return out[()] if out.ndim == 0 else out

            return wrapped

        return cls(
            survival=lambda t: interval.survival_uv(u, v, t),
            log_survival=lambda t: interval.log_survival_uv(u, v, t),
            density=pos(interval.density_uv, 0.0),
            log_density=pos(interval.log_density_uv, -np.inf),
            log_cdf=lambda t: interval.log_cdf_uv(u, v, t),
            quantile=quantile,
            scale=law.mean,
            name=f"interval-exit({u:g},{v:g})",
        )

    @classmethod
    def stretched_exponential(cls, beta: float, c: float) -> "TailFunction":
        """``P[xi > t] = exp(-c t**beta)``."""
        if not (beta > 0 and c > 0):
            raise ValueError("stretched exponential needs beta > 0 and c > 0")

        def log_surv(t):
            t = np.maximum(np.asarray(t, dtype=float), 0.0)
            return -c * t**beta

        def log_dens(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = math.log(c * beta) + (beta - 1.0) * np.log(t) - c * t**beta
            return np.where(t > 0, out, -np.inf)

        def log_cdf(t):
            with np.errstate(divide="ignore"):
                return np.log(-np.expm1(log_surv(t)))

        return cls(
            survival=lambda t: np.exp(log_surv(t)),
            log_survival=log_surv,
            density=lambda t: np.exp(log_dens(t)),
            log_density=log_dens,
            log_cdf=log_cdf,
            quantile=lambda q: (-np.log(np.asarray(q, dtype=float)) / c) ** (1.0 / beta),
            scale=(1.0 / c) ** (1.0 / beta),
            name=f"stretched-exp({beta:g},{c:g})",
        )

    @classmethod
    def inverse_power_gamma(cls, beta: float, acoef: float) -> "TailFunction":
        """Density ``g u**-2 exp(-acoef * u**(-beta/2))`` on ``u > 0``, normalized.

        ``P[X <= x] = Q(2/beta, acoef * x**(-beta/2))``, so ``-log P[X <= x] ~ acoef x**(-beta/2)``
        as ``x -> 0``.
        """
        if not (beta > 0 and acoef > 0):
            raise ValueError("need beta > 0 and acoef > 0")
        a = 2.0 / beta
        log_norm = math.log(beta / 2.0) + a * math.log(acoef) - math.lgamma(a)

        def arg(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return acoef * np.power(x, -beta / 2.0)

        def log_cdf(x):
            x = np.asarray(x, dtype=float)
            out = np.full(x.shape, -np.inf)
            live = x > 0
            out[live] = log_gammaincc(a, arg(x[live]))
            return out[()] if out.ndim == 0 else out

        def survival(x):
            x = np.asarray(x, dtype=float)
            out = np.ones(x.shape)
            live = x > 0
            out[live] = special.gammainc(a, arg(x[live]))
            return out[()] if out.ndim == 0 else out

        def log_dens(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = log_norm - 2.0 * np.log(x) - arg(x)
            return np.where(x > 0, out, -np.inf)

        return cls(
            survival=survival,
            density=lambda x: np.exp(log_dens(x)),
            log_density=log_dens,
            log_cdf=log_cdf,
            quantile=lambda q: (special.gammaincinv(a, np.asarray(q, dtype=float)) / acoef) ** (-2.0 / beta),
            scale=acoef ** (2.0 / beta),
            name=f"inverse-power-gamma({beta:g},{acoef:g})",
        )
