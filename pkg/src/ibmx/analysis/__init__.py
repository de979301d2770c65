"""Deterministic numerics: IBM survival quadrature, tail fits, Laplace-transform checks."""

from .checks import CHECKS, CheckResult, run_check
from .fit import FitError, FitResult, fit_tail
from .ibm import QuadratureResult, log_quadrature_ibm, quadrature_ibm, quadrature_ibm_report
from .lemmas import (
    LaplaceReport,
    SumTailReport,
    laplace_transform,
    log_laplace_transform,
    verify_lemma23,
    verify_lemma24,
    verify_sum_tail,
)
from .quadrature import QuadratureError
from .tails import TailFunction

__all__ = [
    "CHECKS",
    "CheckResult",
    "FitError",
    "FitResult",
    "LaplaceReport",
    "QuadratureError",
    "QuadratureResult",
    "SumTailReport",
    "TailFunction",
    "fit_tail",
    "laplace_transform",
    "log_laplace_transform",
    "log_quadrature_ibm",
    "quadrature_ibm",
    "quadrature_ibm_report",
    "run_check",
    "verify_lemma23",
    "verify_lemma24",
    "verify_sum_tail",
]
