"""Straight-line fits of ``log(-log p)`` against ``log t`` for stretched-exponential tails."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FitError", "FitResult", "fit_tail"]

P_MAX = 0.9
P_MIN = 1e-300
REL_SE_MAX = 0.5
MIN_POINTS = 5


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    """``-log p ~ c_hat * t**beta_hat`` over the window ``(t_lo, t_hi)``."""

    beta_hat: float
    c_hat: float
    r_squared: float
    window: tuple[float, float]
    n_points: int
    beta_se: float = float("nan")
    log_c_se: float = float("nan")

    def to_json(self) -> dict:
        return {
            "beta_hat": self.beta_hat,
            "c_hat": self.c_hat,
            "r_squared": self.r_squared,
            "t_lo": self.window[0],
            "t_hi": self.window[1],
            "n_points": self.n_points,
            "beta_se": self.beta_se,
            "log_c_se": self.log_c_se,
        }


def _columns(curve, p, stderr, log_p):
    if p is None and log_p is None and hasattr(curve, "estimate"):
        t = np.asarray(curve.t, dtype=float)
        p = np.asarray(curve.estimate, dtype=float)
        stderr = np.asarray(curve.stderr, dtype=float)
        if not np.any(stderr > 0):
            stderr = None
    else:
        t = np.asarray(curve, dtype=float)
    if log_p is not None:
        log_p = np.asarray(log_p, dtype=float)
    else:
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore"):
            log_p = np.log(p)
    if stderr is not None:
        stderr = np.asarray(stderr, dtype=float)
    if t.shape != log_p.shape or (stderr is not None and stderr.shape != t.shape):
        raise FitError("t, p and stderr must have matching shapes")
    return t, log_p, stderr


def fit_tail(curve, p=None, *, stderr=None, log_p=None, window=None) -> FitResult:
    """Fit ``-log p = c t**beta`` by least squares of ``log(-log p)`` on ``log t``.

    ``curve`` is a :class:`SurvivalCurve` (stderr-weighted when it carries errors) or a
    time grid with ``p`` (or ``log_p``, for values below the float range) and optional
    ``stderr``. Points with ``p > 0.9`` or relative error above 0.5 are dropped, as are
    ``p <= 1e-300`` unless given through ``log_p``. ``window=(lo, hi)`` restricts t further.
    Weights are the inverse delta-method variances ``(se / (p log p))**-2``.
    """
    t, lp, se = _columns(curve, p, stderr, log_p)
    keep = np.isfinite(lp) & (lp < math.log(P_MAX)) & (t > 0)
    if log_p is None:
        keep &= lp > math.log(P_MIN)
    if se is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = se / np.exp(lp)
        keep &= np.isfinite(rel) & (rel <= REL_SE_MAX)
    if window is not None:
        keep &= (t >= window[0]) & (t <= window[1])
    n = int(np.count_nonzero(keep))
    if n < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} usable points, have {n}")
    t, lp = t[keep], lp[keep]
    x = np.log(t)
    y = np.log(-lp)
    if np.ptp(y) == 0:
        raise FitError("degenerate curve: all probabilities equal")
    if np.ptp(x) == 0:
        raise FitError("degenerate grid: all times equal")
    if se is not None:
        rel = se[keep] / np.exp(lp)
        sd = np.maximum(rel / np.abs(lp), 1e-300)
        w = 1.0 / sd**2
    else:
        w = np.ones_like(x)
    X = np.column_stack([np.ones_like(x), x])
    sw = np.sqrt(w)
    coef, _, _, _ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    resid = y - X @ coef
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    ss_res = float(np.sum(w * resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    cov = np.linalg.pinv((X * w[:, None]).T @ X)
    if se is None:
        # no external errors: scale by the residual variance
        cov = cov * (ss_res / max(n - 2, 1))
    return FitResult(
        beta_hat=float(coef[1]),
        c_hat=float(math.exp(coef[0])),
        r_squared=float(r2),
        window=(float(t[0]), float(t[-1])),
        n_points=n,
        beta_se=float(math.sqrt(max(cov[1, 1], 0.0))),
        log_c_se=float(math.sqrt(max(cov[0, 0], 0.0))),
    )
