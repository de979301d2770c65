"""Closed-form exit-time constants for Brownian and iterated Brownian motion.

Every law here is read as ``-log P[xi > t] ~ c * t**beta`` for ``t -> oo``. Constants are
assembled in log space and exponentiated once, since the Gamma ratios and power towers
overflow for small ``alpha`` or ``p``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .specfun import bessel_first_zero

__all__ = [
    "AmpVariant",
    "LimitReport",
    "ParabolaSpec",
    "TailLaw",
    "TwistedSpec",
    "brownian_parabola_tail",
    "debruijn_constant",
    "integrability_threshold",
    "iterated_bracket",
    "iterated_limit",
    "iterated_parabola_limit",
    "iterated_twisted_limit",
    "lemma23_constant",
    "lemma24_constant",
    "twisted_cp",
    "twisted_tail",
]

_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)


class AmpVariant(str, enum.Enum):
    """How the parabola amplitude ``A`` enters the Brownian constant.

    ``AS_PRINTED`` uses ``A**2`` (the published formula); ``SCALING_CONSISTENT`` uses
    ``A**(2/alpha)``, which makes the constant obey Brownian scaling
    ``l(A) = l(1) * A**(-2/(1+alpha))``. The two coincide at ``A = 1``.
    """

    AS_PRINTED = "AS_PRINTED"
    SCALING_CONSISTENT = "SCALING_CONSISTENT"


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


def _unit_open(name, value):
    if not (isinstance(value, (int, float)) and 0 < value < 1):
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


@dataclass(frozen=True)
class TailLaw:
    """``-log P[xi > t] ~ c * t**beta``."""

    beta: float
    c: float

    def __post_init__(self):
        _positive("beta", self.beta)
        _positive("c", self.c)


@dataclass(frozen=True)
class ParabolaSpec:
    """``{(x, Y) in R x R^(dim-1): x > 0, |Y| < amp * x**alpha}``."""

    alpha: float
    amp: float = 1.0
    dim: int = 2

    def __post_init__(self):
        _unit_open("alpha", self.alpha)
        _positive("amp", self.amp)
        if not (isinstance(self.dim, int) and self.dim >= 2):
            raise ValueError(f"dim must be an integer >= 2, got {self.dim!r}")


@dataclass(frozen=True)
class TwistedSpec:
    """Planar twisted domain with growth radius ``gamma * r**p``."""

    p: float
    gamma: float = 1.0

    def __post_init__(self):
        _unit_open("p", self.p)
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class LimitReport:
    """``lim t**(-exponent) log P[tau > t] = -constant``."""

    exponent: float
    constant: float
    formula_id: str
    variant: AmpVariant | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "formula_id": self.formula_id,
            "exponent": self.exponent,
            "constant": self.constant,
            "variant": None if self.variant is None else self.variant.value,
            "notes": list(self.notes),
        }


def _log_brownian_parabola_constant(spec: ParabolaSpec, variant: AmpVariant) -> float:
    a = spec.alpha
    j = bessel_first_zero((spec.dim - 3) / 2)
    if variant is AmpVariant.AS_PRINTED:
        log_amp = 2.0 * math.log(spec.amp)
    else:
        log_amp = (2.0 / a) * math.log(spec.amp)
    r = (1.0 - a) / a
    inner = (
        _LOG_PI
        + (2.0 / a) * math.log(j)
        - log_amp
        - ((3.0 * a + 1.0) / a) * _LOG_2
        - r * math.log(r)
        + 2.0 * math.lgamma((1.0 - a) / (2.0 * a))
        - 2.0 * math.lgamma(1.0 / (2.0 * a))
    )
    return math.log((1.0 + a) / a) + (a / (a + 1.0)) * inner


def brownian_parabola_tail(spec: ParabolaSpec, variant: AmpVariant = AmpVariant.AS_PRINTED) -> TailLaw:
    """Brownian exit law from the parabola-shaped domain: ``beta = (1-a)/(1+a)``, ``c = l``."""
    variant = AmpVariant(variant)
    a = spec.alpha
    return TailLaw(beta=(1.0 - a) / (1.0 + a), c=math.exp(_log_brownian_parabola_constant(spec, variant)))


def _log_twisted_cp(p: float) -> float:
    inner = (
        (2.0 + p) * _LOG_PI
        - p * 3.0 * _LOG_2
        - 2.0 * p * math.log(p)
        - (1.0 - p) * math.log(1.0 - p)
        + 2.0 * p * (math.lgamma((1.0 - p) / (2.0 * p)) - math.lgamma(1.0 / (2.0 * p)))
    )
    return math.log(1.0 + p) + inner / (p + 1.0)


def twisted_cp(p: float) -> float:
    _unit_open("p", p)
    return math.exp(_log_twisted_cp(p))


def twisted_tail(spec: TwistedSpec) -> TailLaw:
    p = spec.p
    log_pref = (2.0 * p - 1.0) * _LOG_PI - math.log(spec.gamma) - 2.0 * p * _LOG_2 - 2.0 * p * math.log(1.0 - p)
    log_l1 = (2.0 / (p + 1.0)) * log_pref + _log_twisted_cp(p)
    return TailLaw(beta=(1.0 - p) / (1.0 + p), c=math.exp(log_l1))


def _log_iterated_magnitude(beta: float, c: float) -> float:
    # ((2+b)/2) c^(2/(2+b)) b^(-b/(2+b)) pi^(2b/(2+b))
    s = 2.0 + beta
    return math.log(s / 2.0) + (2.0 / s) * math.log(c) - (beta / s) * math.log(beta) + (2.0 * beta / s) * _LOG_PI


def iterated_limit(tail: TailLaw) -> LimitReport:
    """Map a Brownian tail law ``(beta, c)``, ``0 < beta <= 1``, to the iterated one."""
    if not 0 < tail.beta <= 1:
        raise ValueError(f"iterated_limit needs 0 < beta <= 1 (got {tail.beta}); use iterated_bracket for beta > 1")
    return LimitReport(
        exponent=tail.beta / (2.0 + tail.beta),
        constant=math.exp(_log_iterated_magnitude(tail.beta, tail.c)),
        formula_id="ibm-map",
    )


def iterated_bracket(tail: TailLaw) -> tuple[float, float]:
    """Bounds ``(lower_mag, upper_mag)`` on ``-lim t**(-b/(2+b)) log P`` when ``beta > 1``.

    The liminf is at least ``-lower_mag`` and the limsup at most ``-upper_mag``;
    ``lower_mag >= upper_mag`` because ``c * 2**(1-beta) < c``.
    """
    if not tail.beta > 1:
        raise ValueError(f"iterated_bracket needs beta > 1, got {tail.beta}")
    lower = math.exp(_log_iterated_magnitude(tail.beta, tail.c))
    upper = math.exp(_log_iterated_magnitude(tail.beta, tail.c * 2.0 ** (1.0 - tail.beta)))
    return lower, upper


def _closed_form_iterated(shape: float, log_c: float) -> tuple[float, float]:
    # Shared closed form of the two main theorems, written in the domain shape parameter
    # (alpha or p) rather than through the generic beta map.
    s = 3.0 + shape
    exponent = (1.0 - shape) / s
    log_const = (
        math.log(s / (2.0 + 2.0 * shape))
        + ((1.0 - shape) / s) * math.log((1.0 + shape) / (1.0 - shape))
        + ((2.0 - 2.0 * shape) / s) * _LOG_PI
        + ((2.0 + 2.0 * shape) / s) * log_c
    )
    return exponent, math.exp(log_const)


def iterated_parabola_limit(spec: ParabolaSpec, variant: AmpVariant = AmpVariant.AS_PRINTED) -> LimitReport:
    variant = AmpVariant(variant)
    exponent, constant = _closed_form_iterated(spec.alpha, _log_brownian_parabola_constant(spec, variant))
    return LimitReport(exponent=exponent, constant=constant, formula_id="ibm-parabola", variant=variant)


def iterated_twisted_limit(spec: TwistedSpec) -> LimitReport:
    exponent, constant = _closed_form_iterated(spec.p, math.log(twisted_tail(spec).c))
    return LimitReport(exponent=exponent, constant=constant, formula_id="ibm-twisted")


def integrability_threshold(spec: ParabolaSpec, variant: AmpVariant = AmpVariant.AS_PRINTED) -> float:
    """Critical ``b*``: ``E exp(b * tau**((1-a)/(a+3)))`` is finite below it, infinite above.

    The behaviour at ``b = b*`` itself is not determined.
    """
    return iterated_parabola_limit(spec, variant).constant


def debruijn_constant(p: float, B: float) -> float:
    """``-log P[X <= x] ~ B x**(-p)`` (x -> 0) gives ``-log E exp(-lam X) ~ K lam**(p/(p+1))``; returns K."""
    _positive("p", p)
    _positive("B", B)
    return (p + 1.0) * B ** (1.0 / (p + 1.0)) * p ** (-p / (p + 1.0))


def lemma23_constant(tail: TailLaw) -> float:
    """Coefficient of ``lam**(b/(b+2))`` in ``-log E exp(-lam / (xi1 + xi2)**2)``."""
    c = tail.c if tail.beta <= 1 else tail.c * 2.0 ** (1.0 - tail.beta)
    return debruijn_constant(tail.beta / 2.0, c)


def lemma24_constant(beta: float, acoef: float) -> float:
    """Laplace-transform coefficient for the density ``gamma u**-2 exp(-acoef / u**(beta/2))``."""
    _positive("beta", beta)
    _positive("acoef", acoef)
    return debruijn_constant(beta / 2.0, acoef)
