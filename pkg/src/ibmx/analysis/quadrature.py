"""Log-space Gauss-Legendre quadrature for the exit-time integrals.

Double integrals over ``u, v > 0`` are taken in the coordinates ``L = u + v``,
``x = u / L`` (Jacobian ``L``): the integrands of interest depend on ``L`` through a
sharp peak and on ``x`` smoothly, up to boundary layers at ``x -> 0, 1``. The ``L`` range is
located from a coarse profile of the integrand itself, not from a fixed cut-off, so that
answers far below the float range (``exp(-800)`` and less) are still resolved; the
integrand must be supplied as ``(log|f|, sign f)``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["QuadratureError", "log_integral_1d", "log_integral_lx", "log_sum"]

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
TRUNCATION_LOG = -60.0  # drop the range where the integrand is below exp(-60) of its peak


class QuadratureError(RuntimeError):
    """Panel refinement did not reach the requested tolerance."""


def _gl(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _log_roundoff(log_value):
    # a log of size |l| carries an absolute rounding error of a few ulp(l), so relative
    # agreement of the values cannot be asked beyond that
    return 512.0 * np.finfo(float).eps * abs(log_value) if math.isfinite(log_value) else 0.0


def panel_nodes(breaks, order=32):
    """Nodes and weights of composite Gauss-Legendre on consecutive ``breaks``."""
    x, w = _gl(order)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def log_sum(logabs, sign, weights, axis=None):
    """``log|sum w f|`` and its sign from ``log|f|``, ``sign f`` and positive weights."""
    logabs = np.asarray(logabs, dtype=float)
    m = np.max(np.where(np.isfinite(logabs), logabs, -np.inf), axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(under="ignore"):
        s = np.sum(weights * sign * np.exp(logabs - m_safe), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out = m_safe + np.log(np.abs(s))
    out = np.where(np.isfinite(m), out, -np.inf)
    sgn = np.sign(s)
    if axis is None:
        return float(out.ravel()[0]), float(sgn.ravel()[0])
    return np.squeeze(out, axis=axis), np.squeeze(sgn, axis=axis)


def _x_breaks(n_half):
    # graded toward both ends: 0, 2^-(n-1)/2, ..., 1/4, 1/2, ..., 1
    half = 0.5 * 2.0 ** -np.arange(n_half - 1, -1, -1, dtype=float)
    return np.concatenate([[0.0], half, 1.0 - half[-2::-1], [1.0]])


def _geometric_breaks(lo, hi, n):
    return np.geomspace(lo, hi, n + 1)


def _inner_x(fn, L, n_half, order):
    xn, xw = panel_nodes(_x_breaks(n_half), order)
    la, sg = fn(L[:, None], xn[None, :])
    la = la + np.log(L)[:, None]
    return log_sum(la, sg, xw[None, :], axis=1)


def _locate(profile, lo, hi, n=161, max_extend=8, min_inside=40):
    """Range of ``s`` where ``profile(s)`` is within ``TRUNCATION_LOG`` of its maximum.

    The search grid is widened until the range is bracketed, then zoomed until the range
    spans at least ``min_inside`` grid points, so sharp peaks are not under-resolved.
    The lower end is not pushed below ``1e-10 * lo``: an integrand still live there is
    bounded near zero and the neglected piece is below that relative size.
    """
    lo_floor = lo * 1e-10
    zoomed = False
    for _ in range(max_extend + 12):
        grid = np.geomspace(lo, hi, n)
        prof = profile(grid)
        fin = np.isfinite(prof)
        if not np.any(fin):
            if zoomed:
                break
            lo, hi = lo / 1e3, hi * 1e3
            continue
        peak = np.max(prof[fin])
        keep = np.flatnonzero(fin & (prof > peak + TRUNCATION_LOG))
        i0, i1 = keep[0], keep[-1]
        if i0 == 0 and not zoomed and lo > lo_floor:
            lo /= 1e3
            continue
        if i1 == n - 1 and not zoomed:
            hi *= 1e3
            continue
        a, b = grid[max(i0 - 1, 0)], grid[min(i1 + 1, n - 1)]
        if i1 - i0 + 1 >= min_inside:
            return a, b, grid[int(np.argmax(np.where(fin, prof, -np.inf)))]
        lo, hi, zoomed = a, b, True
    raise QuadratureError("could not bracket the integrand's mass")


def _split_breaks(lo, hi, n_panels, split):
    if split is not None and lo < split < hi:
        n1 = max(1, n_panels // 2)
        left = _geometric_breaks(lo, split, n1)
        right = _geometric_breaks(split, hi, max(1, n_panels - n1))
        return np.concatenate([left, right[1:]])
    return _geometric_breaks(lo, hi, n_panels)


def log_integral_lx(fn, scale=1.0, split=None, n_l=16, n_half=8, order=32, rtol=1e-8, refine=True):
    """``log|int_0^oo int_0^oo f(u, v) du dv|`` and sign, with ``fn(L, x) -> (log|f|, sign)``
    evaluated at ``u = x L``, ``v = (1 - x) L``.

    ``split``: an ``L`` value at which the panel layout is split in half (half of the
    panels on each side). With ``refine`` the panel counts are doubled once and the two
    results must agree to ``rtol``; returns ``(log_value, sign, rel_change)``.
    """
    lo, hi, _ = _locate(lambda L: _inner_x(fn, L, 4, 16)[0], scale * 1e-4, scale * 1e4)

    def run(nl, nh):
        Ln, Lw = panel_nodes(_split_breaks(lo, hi, nl, split), order)
        la, sg = _inner_x(fn, Ln, nh, order)
        return log_sum(la, sg, Lw)

    val, sgn = run(n_l, n_half)
    if not refine:
        return val, sgn, float("nan")
    val2, sgn2 = run(2 * n_l, n_half + 4)
    rel = abs(math.expm1(val - val2)) if (sgn == sgn2 and math.isfinite(val2)) else math.inf
    if not rel <= max(rtol, _log_roundoff(val2)):
        raise QuadratureError(f"double integral not converged: relative change {rel:.3g} > {rtol:g}")
    return val2, sgn2, rel


def log_integral_1d(logfn, scale=1.0, n_panels=24, order=32, rtol=1e-10, refine=True):
    """``log int_0^oo exp(logfn(s)) ds`` for a positive integrand; returns (value, rel_change)."""
    lo, hi, _ = _locate(logfn, scale * 1e-6, scale * 1e6)

    def run(n):
        s, w = panel_nodes(_geometric_breaks(lo, hi, n), order)
        return log_sum(logfn(s), 1.0, w)[0]

    val = run(n_panels)
    if not refine:
        return val, float("nan")
    val2 = run(2 * n_panels)
    rel = abs(math.expm1(val - val2))
    if not rel <= max(rtol, _log_roundoff(val2)):
        raise QuadratureError(f"integral not converged: relative change {rel:.3g} > {rtol:g}")
    return val2, rel
