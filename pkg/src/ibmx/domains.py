"""Exit domains: strict-interior membership and conservative distance-to-boundary bounds.

Every domain accepts a single point or an ``(m, dim)`` array of points; one-dimensional
domains also accept a flat array of abscissae. ``distance_lower_bound`` never exceeds the
true Euclidean distance to the boundary, which is what the bridge-crossing correction in
the simulator needs.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .limits import ParabolaSpec, TwistedSpec

__all__ = [
    "BallDomain",
    "CurveKind",
    "Domain",
    "GeneratingCurve",
    "IntervalDomain",
    "ParabolaDomain",
    "TwistedDomain",
    "contains",
    "distance_lower_bound",
    "parse_domain",
]

_TWO_PI = 2.0 * math.pi


class Domain:
    dim: int

    def _points(self, point):
        pts = np.asarray(point, dtype=float)
        single = pts.ndim <= 1 and not (self.dim == 1 and pts.ndim == 1 and pts.size > 1)
        if self.dim == 1:
            pts = pts.reshape(-1, 1)
        else:
            if pts.ndim == 1:
                pts = pts.reshape(1, -1)
            if pts.shape[-1] != self.dim:
                raise ValueError(f"point dimension {pts.shape[-1]} does not match domain dimension {self.dim}")
        return pts, single

    def contains(self, point):
        pts, single = self._points(point)
        res = self._contains(pts)
        return bool(res[0]) if single else res

    def distance_lower_bound(self, point):
        pts, single = self._points(point)
        inside = self._contains(pts)
        if not np.all(inside):
            raise ValueError("distance_lower_bound requires interior points")
        res = np.maximum(self._distance(pts), 0.0)
        return float(res[0]) if single else res

    # vectorized kernels on (m, dim) arrays; no validation
    def _contains(self, pts):
        raise NotImplementedError

    def _distance(self, pts):
        raise NotImplementedError


@dataclass(frozen=True)
class IntervalDomain(Domain):
    a: float
    b: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"interval needs finite a < b, got ({self.a}, {self.b})")

    def _contains(self, pts):
        x = pts[:, 0]
        return (x > self.a) & (x < self.b)

    def _distance(self, pts):
        x = pts[:, 0]
        return np.minimum(x - self.a, self.b - x)


@dataclass(frozen=True)
class BallDomain(Domain):
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        object.__setattr__(self, "center", c)
        if not (len(c) >= 1 and all(math.isfinite(v) for v in c)):
            raise ValueError("ball center must be a finite point")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self):
        return len(self.center)

    def _r(self, pts):
        return np.linalg.norm(pts - np.asarray(self.center), axis=1)

    def _contains(self, pts):
        return self._r(pts) < self.radius

    def _distance(self, pts):
        return self.radius - self._r(pts)


def _segment_distance(px, py, ax, ay, bx, by):
    """Distance from points ``(px, py)`` to segments ``[a, b]`` (broadcasting)."""
    dx = bx - ax
    dy = by - ay
    den = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        s = ((px - ax) * dx + (py - ay) * dy) / den
    s = np.where(den > 0, np.clip(s, 0.0, 1.0), 0.0)
    return np.hypot(px - ax - s * dx, py - ay - s * dy)


@dataclass(frozen=True)
class ParabolaDomain(Domain):
    """``{x > 0, |Y| < amp * x**alpha}`` in ``R^dim``; the first coordinate is the axis."""

    spec: ParabolaSpec
    knots: int = 8  # chord segments on each side of the query abscissa

    @property
    def dim(self):
        return self.spec.dim

    def _profile(self, x):
        return self.spec.amp * np.power(np.maximum(x, 0.0), self.spec.alpha)

    def _meridian(self, pts):
        return pts[:, 0], np.linalg.norm(pts[:, 1:], axis=1)

    def _contains(self, pts):
        x, r = self._meridian(pts)
        return (x > 0) & (r < self._profile(x))

    def _distance(self, pts):
        # The meridian profile g is concave, so the chord polyline through knots of g lies
        # under g. Its hypograph over [xa, xb], revolved, is a subset of the domain that
        # still contains the point when a knot sits at x itself. The distance to that
        # subset's boundary bounds the true distance from below. The window half-width
        # is the vertical gap, which already bounds the true distance from above, so the
        # vertical caps at xa, xb never bind before the chords do.
        x, r = self._meridian(pts)
        gap = self._profile(x) - r
        k = self.knots
        s = np.linspace(0.0, 1.0, k + 1)
        xa = np.maximum(x - gap, 0.0)
        xb = x + gap
        left = xa[:, None] + (x - xa)[:, None] * s[None, :]
        right = x[:, None] + (xb - x)[:, None] * s[None, :]
        kx = np.concatenate([left, right[:, 1:]], axis=1)
        ky = self._profile(kx)
        d = _segment_distance(x[:, None], r[:, None], kx[:, :-1], ky[:, :-1], kx[:, 1:], ky[:, 1:]).min(axis=1)
        cap_left = np.where(xa > 0, x - xa, np.inf)
        return np.minimum(np.minimum(d, cap_left), xb - x)


class CurveKind(str, enum.Enum):
    ZERO = "ZERO"
    TABULATED = "TABULATED"


@dataclass(frozen=True)
class GeneratingCurve:
    """Polar generating curve ``theta = f(r)``; monotone cubic between knots when tabulated.

    Outside the tabulated range the end cubic pieces are extrapolated, so a table should
    cover every radius a run can reach (the domain's ``r_max`` and any expansion).
    """

    kind: CurveKind = CurveKind.ZERO
    r_grid: tuple = ()
    theta_values: tuple = ()

    def __post_init__(self):
        kind = CurveKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is CurveKind.TABULATED:
            r = np.asarray(self.r_grid, dtype=float)
            th = np.asarray(self.theta_values, dtype=float)
            if r.ndim != 1 or r.size < 2 or r.shape != th.shape:
                raise ValueError("tabulated curve needs matching 1-D grids with at least 2 knots")
            if not (np.all(r > 0) and np.all(np.diff(r) > 0)):
                raise ValueError("r_grid must be positive and strictly increasing")
            if not np.all(np.isfinite(th)):
                raise ValueError("theta_values must be finite")
            object.__setattr__(self, "r_grid", tuple(r))
            object.__setattr__(self, "theta_values", tuple(th))
            object.__setattr__(self, "_interp", PchipInterpolator(r, th, extrapolate=True))

    @classmethod
    def from_file(cls, path) -> "GeneratingCurve":
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns (r, theta), got {data.shape[1]}")
        return cls(CurveKind.TABULATED, tuple(data[:, 0]), tuple(data[:, 1]))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is CurveKind.ZERO:
            return np.zeros_like(r)
        return self._interp(r)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is CurveKind.ZERO:
            return np.zeros_like(r)
        return self._interp.derivative()(r)


class _OffsetTable:
    """Both offset curves sampled on a log-spaced generating-radius grid."""

    def __init__(self, curve, spec, r_lo, ratio, knots):
        # knots sit on the fixed lattice r_lo * ratio**i, so a longer table extends a
        # shorter one without moving any existing knot
        r = r_lo * np.power(ratio, np.arange(knots, dtype=float))
        self.r_lo, self.r_hi = r_lo, float(r[-1])
        self.curves = [_offset_points(curve, spec, r, sign) for sign in (1.0, -1.0)]
        rm = np.sqrt(r[:-1] * r[1:])
        self.sag = []
        self.rho = []
        self.phi = []
        for sign, (cx, cy) in zip((1.0, -1.0), self.curves):
            mx, my = _offset_points(curve, spec, rm, sign)
            # deviation of the true curve from each chord, sampled at the midpoint knot
            sag = _segment_distance(mx, my, cx[:-1], cy[:-1], cx[1:], cy[1:])
            self.sag.append(3.0 * sag)
            rho = np.hypot(cx, cy)
            if not np.all(np.diff(rho) > 0):
                raise ValueError("offset curve is not radially monotone; geometry not supported")
            self.rho.append(rho)
            self.phi.append(np.unwrap(np.arctan2(cy, cx)))


def _offset_points(curve, spec, r, sign):
    f = curve(r)
    fp = curve.derivative(r)
    c, s = np.cos(f), np.sin(f)
    tx = c - r * fp * s
    ty = s + r * fp * c
    norm = np.hypot(tx, ty)
    w = sign * spec.gamma * np.power(r, spec.p) / norm
    return r * c - w * ty, r * s + w * tx


class TwistedDomain(Domain):
    """Planar twisted domain: the band between the two normal offsets of ``theta = f(r)``
    by ``+-gamma * r**p``, restricted to polar radius ``> r1`` (the arc closing the cap).

    The offsets are held as polylines on a log grid of generating radii, extended on demand
    when a query falls beyond the tabulated polar radius.
    """

    dim = 2

    def __init__(self, spec: TwistedSpec, curve: GeneratingCurve | None = None, r1: float = 1.0,
                 r_max: float | None = None, knots: int = 4096, horizon: float = 1e4):
        if not (math.isfinite(r1) and r1 > 0):
            raise ValueError(f"r1 must be positive, got {r1}")
        self.spec = spec
        self.curve = curve if curve is not None else GeneratingCurve()
        self.r1 = float(r1)
        self.knots = int(knots)
        if r_max is None:
            r_max = 10.0 * math.sqrt(horizon) * 5.0
        r_max = max(float(r_max), 4.0 * self.r1)
        self._lock = threading.Lock()
        self._r_lo = self._start_radius()
        self._ratio = (r_max / self._r_lo) ** (1.0 / (self.knots - 1))
        self._table = self._build(self.knots)

    def _start_radius(self):
        # smallest knot: a generating radius whose offsets both lie inside the cap
        r = self.r1 / 2.0
        for _ in range(200):
            xs = [_offset_points(self.curve, self.spec, np.array([r]), s) for s in (1.0, -1.0)]
            if all(math.hypot(float(x[0]), float(y[0])) < self.r1 for x, y in xs):
                return r
            r *= 0.5
        raise ValueError("could not place the offset curves inside the cap region")

    def _build(self, knots):
        table = _OffsetTable(self.curve, self.spec, self._r_lo, self._ratio, knots)
        for rho, phi in zip(table.rho, table.phi):
            if rho[-1] <= self.r1:
                raise ValueError("offset curves do not leave the cap region")
        gap = np.interp(table.rho[0], table.rho[1], table.phi[1])
        band = table.phi[0] - gap
        sel = table.rho[0] > self.r1
        if not np.all((band[sel] > 0) & (band[sel] < math.pi)):
            raise ValueError("offset curves must satisfy 0 < f1 - f2 < pi beyond r1")
        return table

    @property
    def rho_covered(self) -> float:
        t = self._table
        return float(min(t.rho[0][-1], t.rho[1][-1]))

    def ensure_radius(self, rho_needed: float):
        """Grow the offset tables until they cover twice the polar radius ``rho_needed``.

        The factor two keeps every radial search window of a covered point inside the
        table, so query results do not depend on when an expansion happened.
        """
        if self.rho_covered > 2.0 * rho_needed:
            return
        with self._lock:
            while self.rho_covered <= 2.0 * rho_needed:
                extra = int(math.ceil(math.log(4.0) / math.log(self._ratio)))
                self._table = self._build(self._table.rho[0].size + extra)

    def _polar(self, pts):
        x, y = pts[:, 0], pts[:, 1]
        rho = np.hypot(x, y)
        if rho.size:
            self.ensure_radius(float(rho.max()))
        return x, y, rho, self._table

    def _contains(self, pts):
        x, y, rho, t = self._polar(pts)
        phi = np.arctan2(y, x)
        f1 = np.interp(rho, t.rho[0], t.phi[0])
        f2 = np.interp(rho, t.rho[1], t.phi[1])
        mid = 0.5 * (f1 + f2)
        phi = mid + np.mod(phi - mid + math.pi, _TWO_PI) - math.pi
        return (rho > self.r1) & (phi > f2) & (phi < f1)

    def _distance(self, pts, max_window: int = 1024):
        x, y, rho, t = self._polar(pts)
        out = rho - self.r1
        for k in range(2):
            cx, cy = t.curves[k]
            rk, sag = t.rho[k], t.sag[k]
            n = cx.size
            i = np.clip(np.searchsorted(rk, rho), 1, n - 1)
            # first pass: the segment at the query radius gives an upper bound on the
            # distance, hence a radial band that must hold the nearest boundary point
            near = _segment_distance(x, y, cx[i - 1], cy[i - 1], cx[i], cy[i]) + sag[i - 1]
            lo = np.clip(np.searchsorted(rk, rho - near) - 1, 0, n - 2)
            hi = np.clip(np.searchsorted(rk, rho + near), 1, n - 1)
            width = int(min(max(int((hi - lo).max()), 1), max_window))
            seg = np.minimum(lo[:, None] + np.arange(width)[None, :], n - 2)
            d = _segment_distance(x[:, None], y[:, None], cx[seg], cy[seg], cx[seg + 1], cy[seg + 1])
            d = (d - sag[seg]).min(axis=1)
            # boundary points outside the searched segments are radially at least this far
            top = np.minimum(lo + width, n - 1)
            far = np.minimum(np.where(lo > 0, rho - rk[lo], np.inf),
                             np.where(top < n - 1, rk[top] - rho, np.inf))
            out = np.minimum(out, np.minimum(d, far))
        return out


def contains(domain: Domain, point):
    return domain.contains(point)


def distance_lower_bound(domain: Domain, point):
    return domain.distance_lower_bound(point)


def parse_domain(text: str, curve_file: str | None = None) -> Domain:
    """Parse ``interval:a,b``, ``ball:r[,c1,...]``, ``parabola:alpha[,amp[,dim]]`` or
    ``twisted:p[,gamma[,r1]]``."""
    kind, _, rest = text.partition(":")
    vals = [float(v) for v in rest.split(",") if v.strip()] if rest else []
    kind = kind.strip().lower()
    if kind == "interval" and len(vals) == 2:
        return IntervalDomain(vals[0], vals[1])
    if kind == "ball" and len(vals) >= 1:
        center = tuple(vals[1:]) if len(vals) > 1 else (0.0, 0.0)
        return BallDomain(center, vals[0])
    if kind == "parabola" and 1 <= len(vals) <= 3:
        alpha = vals[0]
        amp = vals[1] if len(vals) > 1 else 1.0
        dim = int(vals[2]) if len(vals) > 2 else 2
        return ParabolaDomain(ParabolaSpec(alpha, amp, dim))
    if kind == "twisted" and 1 <= len(vals) <= 3:
        gamma = vals[1] if len(vals) > 1 else 1.0
        r1 = vals[2] if len(vals) > 2 else 1.0
        curve = GeneratingCurve.from_file(curve_file) if curve_file else GeneratingCurve()
        return TwistedDomain(TwistedSpec(vals[0], gamma), curve, r1)
    raise ValueError(f"cannot parse domain {text!r}")
