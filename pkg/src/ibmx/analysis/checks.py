"""Named pass/fail checks with machine-readable results (the ``verify`` command runs these)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import interval
from ..limits import TailLaw
from .ibm import quadrature_ibm_report
from .lemmas import verify_lemma23, verify_lemma24, verify_sum_tail
from .tails import TailFunction

__all__ = ["CHECKS", "CheckResult", "run_check"]


@dataclass
class CheckResult:
    check: str
    passed: bool
    tolerance: float
    observed: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def check_sum_tail(beta=1.0, c=1.0, samples=10_000_000, seed=0, t_grid=None, tol=0.10):
    rep = verify_sum_tail(TailLaw(beta, c), n_samples=samples, t_grid=t_grid, seed=seed, tol=tol)
    return CheckResult("sum-tail", rep.passed, tol, abs(rep.c_hat / rep.c_target - 1.0), rep.to_json())


def check_lemma23(beta=1.0, c=1.0, lambdas=(1e4, 1e6, 1e8), tol=0.15):
    rep = verify_lemma23(TailLaw(beta, c), lambdas, tol)
    return CheckResult("lemma23", rep.passed, tol, abs(rep.ratios[-1] - 1.0), rep.to_json())


def check_lemma24(beta=1.0, acoef=1.0, lambdas=(1e4, 1e6, 1e8), tol=0.15):
    rep = verify_lemma24(beta, acoef, lambdas, tol)
    return CheckResult("lemma24", rep.passed, tol, abs(rep.ratios[-1] - 1.0), rep.to_json())


def check_lemma44(u=1.0, v=1.0, ts=(1.0, 5.0, 25.0), tol=1e-8):
    """Density form and mixed-partial form of the IBM survival integral agree."""
    tail = TailFunction.interval_exit(u, v)
    rows = []
    for t in ts:
        r = quadrature_ibm_report(tail, t)
        rows.append({"t": t, "mixed": r.value, "density": math.exp(r.log_density_form), "rel_diff": r.discrepancy})
    worst = max(row["rel_diff"] for row in rows)
    return CheckResult("lemma44", worst <= tol, tol, worst, {"rows": rows})


def _fd_mixed(u, v, t, h):
    s = interval.survival_uv
    return (s(u + h, v + h, t) - s(u + h, v - h, t) - s(u - h, v + h, t) + s(u - h, v - h, t)) / (4.0 * h * h)


def fd_mixed_partial(u, v, t):
    """Richardson-extrapolated central difference of the survival, with its roundoff floor.

    The step shrinks with the decay rate of the dominant eigenmode so that the
    truncation error stays small for large scaled times as well.
    """
    L = u + v
    theta = t / (L * L)
    h = 2e-3 * min(u, v) / max(1.0, math.pi * math.sqrt(theta))
    d1 = _fd_mixed(u, v, t, h)
    d2 = _fd_mixed(u, v, t, 0.5 * h)
    value = (4.0 * d2 - d1) / 3.0
    floor = 8.0 * np.finfo(float).eps * float(interval.survival_uv(u, v, t)) / (0.5 * h) ** 2
    return float(value), floor


def check_mixed_partial_fd(tol=1e-4):
    """Mixed partial (term-wise differentiated series, images below the crossover) against
    finite differences of the survival.

    Points whose mixed partial is below 1e4 times the roundoff floor of the differences
    cannot be resolved this way (tiny scaled times, where the survival is ~1); they are
    counted and skipped.
    """
    rows = []
    worst = 0.0
    skipped = 0
    for u in (0.3, 1.0, 2.5):
        for v in (0.5, 1.0, 3.0):
            L = u + v
            for theta in (0.02, 0.05, 0.1, 0.3, 1.0, 3.0, 10.0):
                t = theta * L * L
                exact = float(interval.mixed_partial_uv(u, v, t))
                fd, floor = fd_mixed_partial(u, v, t)
                if abs(exact) < 1e4 * floor:
                    skipped += 1
                    continue
                rel = abs(fd - exact) / abs(exact)
                worst = max(worst, rel)
                rows.append({"u": u, "v": v, "t": t, "exact": exact, "fd": fd, "rel": rel})
    return CheckResult("mixed-partial-fd", worst <= tol and len(rows) > 0, tol, worst,
                       {"rows": rows, "skipped_below_roundoff": skipped})


def check_series_crossover(tol=1e-10, band=(0.04, 0.16)):
    """Eigen and images series for survival and density agree on a band around the switch."""
    x = np.linspace(0.005, 0.995, 199)
    theta = np.geomspace(band[0], band[1], 41)
    X, T = np.meshgrid(x, theta)
    ds = np.abs(interval._eigen_survival(X, T) - interval._image_survival(X, T))
    fe = interval._eigen_density(X, T)
    fi = interval._image_density(X, T)
    dd = np.abs(fe - fi) / np.max(np.abs(fe))
    worst = float(max(ds.max(), dd.max()))
    return CheckResult("series-crossover", worst <= tol, tol, worst,
                       {"survival_max_abs": float(ds.max()), "density_max_rel": float(dd.max()), "band": list(band)})


def check_mixed_partial_positive(theta_min=10.0, n=20_000, seed=1):
    """Mixed partial is positive wherever ``t / (u+v)**2 >= theta_min`` (sampled)."""
    rng = np.random.default_rng(seed)
    u = np.exp(rng.uniform(-4, 4, n))
    v = np.exp(rng.uniform(-4, 4, n))
    theta = theta_min * np.exp(rng.uniform(0, 3, n))
    t = theta * (u + v) ** 2
    scaled = interval.mixed_partial_uv(u, v, t, scaled=True)
    frac_bad = float(np.mean(scaled <= 0))
    return CheckResult("mixed-partial-positive", frac_bad == 0.0, 0.0, frac_bad,
                       {"samples": n, "min_scaled": float(np.min(scaled))})


CHECKS = {
    "sum-tail": check_sum_tail,
    "lemma23": check_lemma23,
    "lemma24": check_lemma24,
    "lemma44": check_lemma44,
    "mixed-partial-fd": check_mixed_partial_fd,
    "series-crossover": check_series_crossover,
    "mixed-partial-positive": check_mixed_partial_positive,
}


def run_check(name: str, **kwargs) -> CheckResult:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    return CHECKS[name](**kwargs)
