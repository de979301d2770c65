"""Exit times of Brownian and iterated Brownian motion from parabola-shaped and twisted domains.

Closed-form tail constants (:mod:`ibmx.limits`), exact interval exit laws
(:mod:`ibmx.interval`), domain geometry (:mod:`ibmx.domains`), Monte Carlo estimators
(:mod:`ibmx.montecarlo`), deterministic quadrature and tail checks (:mod:`ibmx.analysis`)
and a command-line front end (:mod:`ibmx.cli`).
"""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

from . import analysis, domains, interval, limits, montecarlo, rng, specfun
from .domains import BallDomain, IntervalDomain, ParabolaDomain, TwistedDomain, parse_domain
from .limits import (
    AmpVariant,
    LimitReport,
    ParabolaSpec,
    TailLaw,
    TwistedSpec,
    brownian_parabola_tail,
    integrability_threshold,
    iterated_bracket,
    iterated_limit,
    iterated_parabola_limit,
    iterated_twisted_limit,
)
from .montecarlo import SimConfig, SurvivalCurve

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+unknown"

__all__ = [
    "AmpVariant",
    "BallDomain",
    "IntervalDomain",
    "LimitReport",
    "ParabolaDomain",
    "ParabolaSpec",
    "SimConfig",
    "SurvivalCurve",
    "TailLaw",
    "TwistedDomain",
    "TwistedSpec",
    "analysis",
    "brownian_parabola_tail",
    "domains",
    "integrability_threshold",
    "interval",
    "iterated_bracket",
    "iterated_limit",
    "iterated_parabola_limit",
    "iterated_twisted_limit",
    "limits",
    "montecarlo",
    "parse_domain",
    "rng",
    "specfun",
]
