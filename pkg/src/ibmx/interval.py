"""Exit-time law of standard (generator Delta/2) Brownian motion from an interval.

The process starts at 0 and the interval is ``(-u, v)``. By translation and diffusive
scaling everything reduces to the unit interval ``(0, 1)`` started at ``x = u/(u+v)``
at scaled time ``theta = t/(u+v)**2``. Two exact series are used:

* eigenfunction series, fast for large ``theta``;
* method-of-images series, fast for small ``theta``.

They switch at ``THETA_CROSSOVER``. All array functions broadcast their arguments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "IllConditionedWarning",
    "IntervalLaw",
    "THETA_CROSSOVER",
    "THETA_MIN",
    "asymptotic_survival_unit",
    "density",
    "density_uv",
    "log_density_uv",
    "log_cdf_uv",
    "log_survival_uv",
    "mixed_partial",
    "mixed_partial_uv",
    "sample_exit",
    "sample_exit_uv",
    "survival",
    "survival_unit",
    "survival_uv",
]

THETA_CROSSOVER = 0.08
THETA_MIN = 0.01
MAX_TERMS = 200
_PI2 = math.pi**2
_LOG_4_OVER_PI = math.log(4.0 / math.pi)
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class IllConditionedWarning(RuntimeWarning):
    """The eigen-series mixed partial was evaluated at small scaled time."""


@dataclass(frozen=True)
class IntervalLaw:
    """Brownian motion from 0 in ``(-u, v)``."""

    u: float
    v: float

    def __post_init__(self):
        if not (self.u > 0 and self.v > 0 and math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"IntervalLaw needs finite u > 0 and v > 0, got u={self.u!r}, v={self.v!r}")

    @property
    def width(self) -> float:
        return self.u + self.v

    @property
    def mean(self) -> float:
        return self.u * self.v


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


# --------------------------------------------------------------------------------------
# term counts


def _eigen_terms(theta_min: float, slack: float = 40.0) -> int:
    # smallest N with ((2N+1)^2 - 1) pi^2 theta / 2 >= slack, i.e. a relative
    # contribution of e^-slack from the first neglected mode
    if theta_min <= 0:
        return MAX_TERMS
    k = math.sqrt(1.0 + 2.0 * slack / (_PI2 * theta_min))
    return int(min(MAX_TERMS, max(2, math.ceil((k - 1.0) / 2.0) + 1)))


def _image_terms(theta_max: float) -> int:
    # image shifts 2k with (2k - 1)/sqrt(theta) > 9 contribute below 1e-18
    return int(max(2, math.ceil((9.0 * math.sqrt(max(theta_max, 0.0)) + 1.0) / 2.0) + 1))


# --------------------------------------------------------------------------------------
# unit-interval kernels (x in (0,1), theta > 0, already broadcast to a common shape)


def _eigen_survival(x, theta):
    n = _eigen_terms(float(np.min(theta)))
    k = (2 * np.arange(n) + 1).reshape((-1,) + (1,) * x.ndim)
    terms = np.exp(-(k**2) * (_PI2 / 2.0) * theta) * np.sin(k * math.pi * x) / k
    return (4.0 / math.pi) * terms.sum(axis=0)


def _image_cdf_scaled(x, theta):
    # P_x[eta <= t] from the images series as (m, a0) with P = m * exp(-a0**2). Every
    # term is an erfc of an argument >= a0 = min(x, 1-x) / s, carried as
    # erfcx(z) exp(a0^2 - z^2), so nothing cancels against 1 and nothing underflows
    n = _image_terms(float(np.max(theta)))
    s = np.sqrt(2.0 * theta)
    a0 = np.minimum(x, 1.0 - x) / s

    def e(z):
        return special.erfcx(z) * np.exp((a0 - z) * (a0 + z))

    total = e(x / s) - 0.5 * (e((1.0 + x) / s) - e((1.0 - x) / s))
    for k in range(1, n + 1):
        for sign in (1.0, -1.0):
            # shift 2k for k >= 1 (all arguments positive) and -2k (all negative)
            a = sign * (1.0 - x) + 2.0 * k
            b = sign * (-x) + 2.0 * k
            c = sign * (1.0 + x) + 2.0 * k
            d = sign * x + 2.0 * k
            term = 0.5 * (e(a / s) - e(b / s) - e(c / s) + e(d / s))
            total = total + term if sign > 0 else total - term
    return total, a0


def _image_survival(x, theta):
    n = _image_terms(float(np.max(theta)))
    s = np.sqrt(2.0 * theta)
    erfc = special.erfc
    total = special.erf(x / s) + 0.5 * (erfc((1.0 + x) / s) - erfc((1.0 - x) / s))
    for k in range(1, n + 1):
        for sign in (1.0, -1.0):
            a = sign * (1.0 - x) + 2.0 * k
            b = sign * (-x) + 2.0 * k
            c = sign * (1.0 + x) + 2.0 * k
            d = sign * x + 2.0 * k
            if sign > 0:
                total -= 0.5 * (erfc(a / s) - erfc(b / s) - erfc(c / s) + erfc(d / s))
            else:
                total += 0.5 * (erfc(a / s) - erfc(b / s) - erfc(c / s) + erfc(d / s))
    return total


def _unit_survival(x, theta):
    out = np.empty(np.shape(x))
    big = theta >= THETA_CROSSOVER
    if np.any(big):
        out[big] = _eigen_survival(x[big], theta[big])
    small = ~big
    if np.any(small):
        out[small] = _image_survival(x[small], theta[small])
    return np.clip(out, 0.0, 1.0)


def _eigen_log_survival(x, theta):
    n = _eigen_terms(float(np.min(theta)))
    s1 = np.sin(math.pi * x)
    rest = np.zeros_like(x)
    for j in range(1, n):
        k = 2 * j + 1
        rest += np.exp(-(k * k - 1) * (_PI2 / 2.0) * theta) * np.sin(k * math.pi * x) / (k * s1)
    return _LOG_4_OVER_PI + np.log(s1) - (_PI2 / 2.0) * theta + np.log1p(rest)


def _unit_log_survival(x, theta):
    out = np.empty(np.shape(x))
    big = theta >= THETA_CROSSOVER
    if np.any(big):
        out[big] = _eigen_log_survival(x[big], theta[big])
    small = ~big
    if np.any(small):
        with np.errstate(divide="ignore"):
            out[small] = np.log(np.clip(_image_survival(x[small], theta[small]), 0.0, 1.0))
    return np.minimum(out, 0.0)


def _unit_log_cdf(x, theta):
    out = np.empty(np.shape(x))
    big = theta >= THETA_CROSSOVER
    with np.errstate(divide="ignore"):
        if np.any(big):
            out[big] = np.log1p(-np.exp(_eigen_log_survival(x[big], theta[big])))
        small = ~big
        if np.any(small):
            m, a0 = _image_cdf_scaled(x[small], theta[small])
            out[small] = np.log(np.maximum(m, 0.0)) - a0 * a0
    return np.minimum(out, 0.0)


def _eigen_density(x, theta):
    # -d/dtheta of the eigen series
    n = _eigen_terms(float(np.min(theta)))
    k = (2 * np.arange(n) + 1).reshape((-1,) + (1,) * x.ndim)
    terms = k * np.exp(-(k**2) * (_PI2 / 2.0) * theta) * np.sin(k * math.pi * x)
    return 2.0 * math.pi * terms.sum(axis=0)


def _image_density(x, theta):
    n = _image_terms(float(np.max(theta)))
    rt = np.sqrt(theta)
    scale = 1.0 / (2.0 * theta * rt)

    def h(a):
        # -d/dtheta Phi(a / sqrt(theta))
        z = a / rt
        return a * np.exp(-0.5 * z * z) * _INV_SQRT_2PI * scale

    total = np.zeros_like(x)
    for k in range(-n, n + 1):
        total += h(1.0 - x + 2 * k) - h(-x + 2 * k) - h(1.0 + x + 2 * k) + h(x + 2 * k)
    return total


def _unit_density(x, theta):
    out = np.empty(np.shape(x))
    big = theta >= THETA_CROSSOVER
    if np.any(big):
        out[big] = _eigen_density(x[big], theta[big])
    small = ~big
    if np.any(small):
        out[small] = _image_density(x[small], theta[small])
    return np.maximum(out, 0.0)


def _eigen_log_density(x, theta):
    n = _eigen_terms(float(np.min(theta)))
    s1 = np.sin(math.pi * x)
    rest = np.zeros_like(x)
    for j in range(1, n):
        k = 2 * j + 1
        rest += k * np.exp(-(k * k - 1) * (_PI2 / 2.0) * theta) * np.sin(k * math.pi * x) / s1
    return math.log(2.0 * math.pi) + np.log(s1) - (_PI2 / 2.0) * theta + np.log1p(rest)


# --------------------------------------------------------------------------------------
# validation helpers


def _unit_args(x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(x > 0) | ~(x < 1)):
        raise ValueError("survival_unit requires 0 < x < 1")
    if np.any(~(t >= 0)):
        raise ValueError("survival_unit requires t >= 0")
    return np.broadcast_arrays(x, t)


def _uv_args(u, v, t, *, strict_t=False):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(u >= 0)) or np.any(~(v >= 0)) or np.any(~np.isfinite(u + v)):
        raise ValueError("interval distances must be finite and nonnegative")
    if strict_t:
        if np.any(~(t > 0)):
            raise ValueError("t must be > 0")
    elif np.any(~(t >= 0)):
        raise ValueError("t must be >= 0")
    return np.broadcast_arrays(u, v, t)


# --------------------------------------------------------------------------------------
# public API


def survival_unit(x, t):
    """``P_x[eta_(0,1) > t]``."""
    x, t = _unit_args(x, t)
    out = np.ones(x.shape)
    pos = t > 0
    if np.any(pos):
        out[pos] = _unit_survival(x[pos], t[pos])
    return _out(out)


def asymptotic_survival_unit(x, t):
    """Leading eigenmode ``(4/pi) exp(-pi^2 t / 2) sin(pi x)``, the large-t equivalent."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return _out((4.0 / math.pi) * np.exp(-(_PI2 / 2.0) * t) * np.sin(math.pi * x))


def survival_uv(u, v, t):
    """``P_0[eta_(-u,v) > t]``; a zero distance means instant exit."""
    u, v, t = _uv_args(u, v, t)
    out = np.zeros(u.shape)
    out[t == 0] = 1.0
    live = (t > 0) & (u > 0) & (v > 0)
    if np.any(live):
        L = u[live] + v[live]
        out[live] = _unit_survival(u[live] / L, t[live] / (L * L))
    return _out(out)


def log_survival_uv(u, v, t):
    """``log P_0[eta_(-u,v) > t]``, accurate far below the float underflow of the survival."""
    u, v, t = _uv_args(u, v, t)
    out = np.full(u.shape, -np.inf)
    out[t == 0] = 0.0
    live = (t > 0) & (u > 0) & (v > 0)
    if np.any(live):
        L = u[live] + v[live]
        out[live] = _unit_log_survival(u[live] / L, t[live] / (L * L))
    return _out(out)


def log_cdf_uv(u, v, t):
    """``log P_0[eta_(-u,v) <= t]``, accurate when the exit is very unlikely by time t."""
    u, v, t = _uv_args(u, v, t)
    out = np.zeros(u.shape)
    out[t == 0] = -np.inf
    live = (t > 0) & (u > 0) & (v > 0)
    if np.any(live):
        L = u[live] + v[live]
        out[live] = _unit_log_cdf(u[live] / L, t[live] / (L * L))
    return _out(out)


def survival(law: IntervalLaw, t):
    return survival_uv(law.u, law.v, t)


def density_uv(u, v, t):
    """``-d/dt P_0[eta_(-u,v) > t]``."""
    u, v, t = _uv_args(u, v, t, strict_t=True)
    out = np.zeros(u.shape)
    live = (u > 0) & (v > 0)
    if np.any(live):
        L = u[live] + v[live]
        out[live] = _unit_density(u[live] / L, t[live] / (L * L)) / (L * L)
    return _out(out)


def log_density_uv(u, v, t):
    u, v, t = _uv_args(u, v, t, strict_t=True)
    out = np.full(u.shape, -np.inf)
    live = (u > 0) & (v > 0)
    if np.any(live):
        L = u[live] + v[live]
        x = u[live] / L
        theta = t[live] / (L * L)
        res = np.empty(x.shape)
        big = theta >= THETA_CROSSOVER
        if np.any(big):
            res[big] = _eigen_log_density(x[big], theta[big])
        small = ~big
        if np.any(small):
            with np.errstate(divide="ignore"):
                res[small] = np.log(np.maximum(_image_density(x[small], theta[small]), 0.0))
        out[live] = res - 2.0 * np.log(L)
    return _out(out)


def density(law: IntervalLaw, t):
    return density_uv(law.u, law.v, t)


def _mixed_partial_eigen(u, v, t, scaled):
    # term-by-term mixed derivative of the eigen series; with ``scaled`` the common
    # factor exp(-pi^2 t / (2 L^2)) is left out
    L = u + v
    theta = t / (L * L)
    n = _eigen_terms(float(np.min(theta)), slack=50.0)
    total = np.zeros_like(u)
    pi = math.pi
    for j in range(n):
        k = 2 * j + 1
        expo = (k * k - 1) if scaled else k * k
        e = np.exp(-expo * (_PI2 / 2.0) * theta)
        arg = k * pi * u / L
        sin_part = np.sin(arg) / L**4 * (pi**3 * k**3 * t * t / (L * L) - 3.0 * pi * k * t + k * pi * u * v)
        cos_part = np.cos(arg) / L**3 * (k * k * _PI2 * t * (v - u) / (L * L) + u - v)
        total += e * (sin_part + cos_part)
    return 4.0 * total


def _mixed_partial_images(u, v, t):
    L = u + v
    theta = t / (L * L)
    n = _image_terms(float(np.max(theta)))
    rt = np.sqrt(t)
    c = 1.0 / (t * rt) * _INV_SQRT_2PI

    def d2(a, alpha, beta):
        # d^2/du dv Phi((alpha u + beta v)/sqrt t) = -alpha beta a phi(a/sqrt t) / t^(3/2)
        z = a / rt
        return -alpha * beta * a * np.exp(-0.5 * z * z) * c

    total = np.zeros_like(u)
    for k in range(-n, n + 1):
        s = 2 * k * L
        total += d2(v + s, 2 * k, 2 * k + 1)
        total -= d2(-u + s, 2 * k - 1, 2 * k)
        total -= d2(2 * u + v + s, 2 * k + 2, 2 * k + 1)
        total += d2(u + s, 2 * k + 1, 2 * k)
    return total


def mixed_partial_uv(u, v, t, method: str = "auto", scaled: bool = False):
    """``d^2/du dv P_0[eta_(-u,v) > t]``.

    ``method="series"`` sums the term-wise differentiated eigen series everywhere and
    warns (:class:`IllConditionedWarning`) below ``THETA_MIN``; ``"images"`` differentiates
    the method-of-images series; ``"auto"`` uses the series at ``theta >= THETA_CROSSOVER``
    and images below. ``scaled=True`` returns the value times ``exp(pi^2 t / (2 (u+v)^2))``.
    """
    u, v, t = _uv_args(u, v, t, strict_t=True)
    if np.any(~(u > 0)) or np.any(~(v > 0)):
        raise ValueError("mixed_partial requires u > 0 and v > 0")
    if method not in ("auto", "series", "images"):
        raise ValueError(f"unknown method {method!r}")
    L = u + v
    theta = t / (L * L)
    out = np.empty(u.shape)
    if method == "series":
        if np.any(theta < THETA_MIN):
            warnings.warn(
                f"eigen-series mixed partial at scaled time {float(np.min(theta)):.3g} < {THETA_MIN}",
                IllConditionedWarning,
                stacklevel=2,
            )
        out[...] = _mixed_partial_eigen(u, v, t, scaled)
        return _out(out)
    big = theta >= THETA_CROSSOVER if method == "auto" else np.zeros(u.shape, dtype=bool)
    if np.any(big):
        out[big] = _mixed_partial_eigen(u[big], v[big], t[big], scaled)
    small = ~big
    if np.any(small):
        val = _mixed_partial_images(u[small], v[small], t[small])
        if scaled:
            val = val * np.exp((_PI2 / 2.0) * theta[small])
        out[small] = val
    return _out(out)


def mixed_partial(law: IntervalLaw, t, method: str = "auto"):
    return mixed_partial_uv(law.u, law.v, t, method=method)


def _unit_inverse(x, target_log):
    """Solve ``log S_unit(x, theta) = target_log`` for theta.

    Safeguarded Newton in ``log theta``, iterating only on unconverged entries. The
    start is the leading-mode inverse, which is already close for large theta.
    """
    lo = np.full(x.shape, -30.0)
    guess = 2.0 * (_LOG_4_OVER_PI + np.log(np.sin(math.pi * x)) - target_log) / _PI2
    hi = np.log(np.maximum(guess, 0.0) + 1.0)
    for _ in range(60):
        bad = _unit_log_survival(x, np.exp(hi)) > target_log
        if not np.any(bad):
            break
        hi[bad] += 1.0
    s = np.where(guess > THETA_CROSSOVER, np.log(np.maximum(guess, 1e-300)), 0.5 * (lo + hi))
    s = np.clip(s, lo, hi)
    active = np.arange(x.size)
    xf, tf = x.ravel(), target_log.ravel()
    s, lo, hi = s.ravel().copy(), lo.ravel().copy(), hi.ravel().copy()
    for _ in range(200):
        if active.size == 0:
            break
        sa = s[active]
        theta = np.exp(sa)
        logS = _unit_log_survival(xf[active], theta)
        g = logS - tf[active]
        above = g > 0
        lo[active] = np.where(above, sa, lo[active])
        hi[active] = np.where(above, hi[active], sa)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # d log S / d log theta = -theta f / S
            slope = -theta * _unit_density(xf[active], theta) / np.exp(logS)
            step = g / slope
            newton = sa - step
        la, ha = lo[active], hi[active]
        ok = np.isfinite(newton) & (newton > la) & (newton < ha)
        s_new = np.where(ok, newton, 0.5 * (la + ha))
        done = (np.abs(s_new - sa) < 1e-14) | (ha - la < 1e-14)
        s[active] = s_new
        active = active[~done]
    return np.exp(s).reshape(x.shape)


def sample_exit_uv(u, v, uniform):
    """Exact inverse-CDF sample of ``eta_(-u,v)``: the t with survival equal to ``uniform``."""
    u, v, w = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (u, v, uniform)))
    if np.any(~(u > 0)) or np.any(~(v > 0)):
        raise ValueError("sample_exit requires u > 0 and v > 0")
    if np.any(~(w > 0)) or np.any(~(w < 1)):
        raise ValueError("uniform must lie in (0, 1)")
    L = u + v
    theta = _unit_inverse(u / L, np.log(w))
    return _out(theta * L * L)


def sample_exit(law: IntervalLaw, uniform):
    return sample_exit_uv(law.u, law.v, uniform)
