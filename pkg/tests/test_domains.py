from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import cKDTree

from ibmx.domains import (
    BallDomain,
    CurveKind,
    GeneratingCurve,
    IntervalDomain,
    ParabolaDomain,
    TwistedDomain,
    contains,
    distance_lower_bound,
    parse_domain,
)
from ibmx.domains import _offset_points
from ibmx.limits import ParabolaSpec, TwistedSpec


def _interior(domain, sampler, n, rng):
    pts = []
    while sum(len(p) for p in pts) < n:
        cand = sampler(rng, 4 * n)
        pts.append(cand[domain.contains(cand)])
    return np.concatenate(pts)[:n]


# ---------------------------------------------------------------- membership examples


def test_parabola_membership_examples():
    P = ParabolaDomain(ParabolaSpec(0.5, 1.0, 2))
    assert contains(P, (4.0, 1.9))
    assert not contains(P, (4.0, 2.1))
    assert not contains(P, (-1.0, 0.0))
    assert not contains(P, (0.0, 0.0))


def test_parabola_membership_definition_3d():
    P = ParabolaDomain(ParabolaSpec(0.3, 2.0, 3))
    rng = np.random.default_rng(0)
    pts = rng.uniform([-1, -8, -8], [100, 8, 8], size=(20_000, 3))
    exact = (pts[:, 0] > 0) & (np.hypot(pts[:, 1], pts[:, 2]) < 2.0 * np.maximum(pts[:, 0], 0) ** 0.3)
    assert np.array_equal(P.contains(pts), exact)


def test_ball_and_interval_membership():
    B = BallDomain((0.0, 0.0), 1.0)
    assert not contains(B, (1.0, 0.0))
    assert contains(B, (0.6, 0.79))
    assert distance_lower_bound(B, (0.0, 0.0)) == 1.0
    I = IntervalDomain(-1.0, 1.0)
    assert not contains(I, 1.0) and contains(I, 0.999)
    assert distance_lower_bound(I, 0.25) == 0.75


def test_twisted_membership_examples():
    T = TwistedDomain(TwistedSpec(0.5, 1.0), GeneratingCurve(), r1=1.0)
    assert contains(T, (9.0, 0.0))
    assert contains(T, (9.0, 2.99))
    assert not contains(T, (9.0, 3.01))
    assert not contains(T, (9.0, 3.05))
    assert not contains(T, (0.5, 0.0))  # inside the cap r <= r1
    assert not contains(T, (-9.0, 0.0))


def test_dimension_mismatch():
    P = ParabolaDomain(ParabolaSpec(0.5, 1.0, 3))
    with pytest.raises(ValueError):
        P.contains((1.0, 0.0))
    with pytest.raises(ValueError):
        BallDomain((0.0, 0.0), 1.0).contains((0.0, 0.0, 0.0))


def test_distance_requires_interior():
    P = ParabolaDomain(ParabolaSpec(0.5))
    with pytest.raises(ValueError):
        distance_lower_bound(P, (4.0, 2.1))


def test_validation():
    with pytest.raises(ValueError):
        IntervalDomain(1.0, 1.0)
    with pytest.raises(ValueError):
        BallDomain((0.0,), 0.0)
    with pytest.raises(ValueError):
        TwistedDomain(TwistedSpec(0.5), r1=-1.0)
    with pytest.raises(ValueError):
        GeneratingCurve(CurveKind.TABULATED, (1.0, 1.0), (0.0, 0.0))


# ---------------------------------------------------------------- distance bounds vs dense sampling


def _check_bound(domain, pts, tree):
    bound = domain.distance_lower_bound(pts)
    truth, _ = tree.query(pts)
    assert np.all(bound >= 0)
    assert np.all(bound <= truth + 1e-12)
    return bound, truth


def test_parabola_distance_example():
    P = ParabolaDomain(ParabolaSpec(0.5, 1.0, 2))
    d = distance_lower_bound(P, (4.0, 0.0))
    assert 1.0 <= d <= 2.0


@pytest.mark.parametrize("alpha,amp", [(0.5, 1.0), (0.25, 2.0), (0.8, 0.5)])
def test_parabola_distance_dense_oracle(alpha, amp):
    P = ParabolaDomain(ParabolaSpec(alpha, amp, 2))
    x = np.concatenate([[0.0], np.geomspace(1e-8, 400.0, 50_000)])
    bx = np.concatenate([x, x[1:]])
    by = np.concatenate([amp * x**alpha, -amp * x[1:] ** alpha])
    tree = cKDTree(np.column_stack([bx, by]))
    rng = np.random.default_rng(1)
    sampler = lambda g, n: np.column_stack([g.uniform(0, 60, n), g.uniform(-amp * 60**alpha, amp * 60**alpha, n)])  # noqa: E731
    pts = _interior(P, sampler, 10_000, rng)
    bound, truth = _check_bound(P, pts, tree)
    assert np.median(bound / truth) > 0.9  # conservative, not useless


def test_parabola_distance_3d_uses_meridian():
    P = ParabolaDomain(ParabolaSpec(0.5, 1.0, 3))
    P2 = ParabolaDomain(ParabolaSpec(0.5, 1.0, 2))
    rng = np.random.default_rng(2)
    pts = _interior(P, lambda g, n: g.uniform([0, -5, -5], [25, 5, 5], (n, 3)), 2000, rng)
    mer = np.column_stack([pts[:, 0], np.hypot(pts[:, 1], pts[:, 2])])
    assert np.allclose(P.distance_lower_bound(pts), P2.distance_lower_bound(mer), rtol=1e-12)


def test_ball_interval_distance_exact():
    rng = np.random.default_rng(3)
    B = BallDomain((0.5, -1.0, 2.0), 2.0)
    th = rng.normal(size=(100_000, 3))
    sphere = np.asarray(B.center) + 2.0 * th / np.linalg.norm(th, axis=1, keepdims=True)
    pts = _interior(B, lambda g, n: np.asarray(B.center) + g.uniform(-2, 2, (n, 3)), 10_000, rng)
    bound = B.distance_lower_bound(pts)
    truth, _ = cKDTree(sphere).query(pts)
    # the exact distance never exceeds the sampled one; sampled overestimates by the spacing
    assert np.all(bound <= truth + 1e-12)
    assert np.all(bound >= truth - 0.03)  # 1e5 samples on a radius-2 sphere: spacing ~0.02
    I = IntervalDomain(-1.0, 3.0)
    x = rng.uniform(-1, 3, 10_000)
    assert np.allclose(I.distance_lower_bound(x), np.minimum(x + 1, 3 - x), rtol=1e-15)


def _twisted_boundary(T, n=100_000):
    r = np.geomspace(T._r_lo, 400.0, n // 2)
    xs, ys = [], []
    for sign in (1.0, -1.0):
        cx, cy = _offset_points(T.curve, T.spec, r, sign)
        keep = np.hypot(cx, cy) >= T.r1
        xs.append(cx[keep])
        ys.append(cy[keep])
    t = T._table
    f1 = np.interp(T.r1, t.rho[0], t.phi[0])
    f2 = np.interp(T.r1, t.rho[1], t.phi[1])
    phi = np.linspace(f2, f1, 5000)
    xs.append(T.r1 * np.cos(phi))
    ys.append(T.r1 * np.sin(phi))
    return cKDTree(np.column_stack([np.concatenate(xs), np.concatenate(ys)]))


@pytest.mark.parametrize("curve", ["zero", "tabulated"])
def test_twisted_distance_dense_oracle(curve):
    if curve == "zero":
        gc = GeneratingCurve()
    else:
        r = np.geomspace(0.1, 1e3, 60)
        gc = GeneratingCurve(CurveKind.TABULATED, tuple(r), tuple(0.4 * np.sin(np.log(r))))
    T = TwistedDomain(TwistedSpec(0.5, 1.0), gc, r1=1.0, r_max=1e3)
    tree = _twisted_boundary(T)
    rng = np.random.default_rng(4)

    def sampler(g, n):
        rho = g.uniform(1.0, 120.0, n)
        phi = g.uniform(-math.pi, math.pi, n)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi)])

    pts = _interior(T, sampler, 10_000, rng)
    bound, truth = _check_bound(T, pts, tree)
    assert np.median(bound / truth) > 0.9


def test_twisted_matches_parabola_band():
    p, gamma = 0.5, 1.0
    T = TwistedDomain(TwistedSpec(p, gamma), r1=1.0)
    rng = np.random.default_rng(5)
    x = np.exp(rng.uniform(math.log(1e2), math.log(1e4), 50_000))
    y = rng.uniform(-1.5, 1.5, x.size) * gamma * x**p
    edge = gamma * x**p
    far = np.abs(np.abs(y) - edge) > 1e-3 * edge
    got = T.contains(np.column_stack([x, y]))
    assert np.array_equal(got[far], (np.abs(y) < edge)[far])


# ---------------------------------------------------------------- generating curves and twisted geometry


def test_tabulated_constant_curve_rotates():
    r = np.geomspace(0.05, 1e4, 30)
    rot = 0.5
    gc = GeneratingCurve(CurveKind.TABULATED, tuple(r), tuple(np.full(r.size, rot)))
    T0 = TwistedDomain(TwistedSpec(0.4, 1.5), r1=2.0)
    T1 = TwistedDomain(TwistedSpec(0.4, 1.5), gc, r1=2.0)
    rng = np.random.default_rng(6)
    pts = rng.uniform(-60, 60, (20_000, 2))
    c, s = math.cos(rot), math.sin(rot)
    back = pts @ np.array([[c, -s], [s, c]])  # rotate by -rot
    a, b = T1.contains(pts), T0.contains(back)
    assert np.mean(a != b) < 1e-3  # disagreements only at the polyline resolution
    assert a.sum() > 1000


def test_curve_file_round_trip(tmp_path):
    path = tmp_path / "curve.txt"
    r = np.geomspace(0.05, 1e6, 40)
    th = 0.1 * np.log(r)
    path.write_text("# r theta\n" + "\n".join(f"{float(a)!r} {float(b)!r}" for a, b in zip(r, th)) + "\n")
    gc = GeneratingCurve.from_file(path)
    assert gc.kind is CurveKind.TABULATED
    assert np.allclose(gc(r), th)
    mid = np.sqrt(r[:-1] * r[1:])
    # monotone cubic: stays within neighbouring knot values
    v = gc(mid)
    assert np.all((v >= np.minimum(th[:-1], th[1:]) - 1e-15) & (v <= np.maximum(th[:-1], th[1:]) + 1e-15))
    assert np.all(np.isfinite(gc.derivative(mid)))
    dom = parse_domain("twisted:0.5,1,1", curve_file=str(path))
    assert isinstance(dom, TwistedDomain)
    assert dom.contains((20.0 * math.cos(0.1 * math.log(20.0)), 20.0 * math.sin(0.1 * math.log(20.0))))


def test_twisted_expansion_does_not_change_answers():
    spec = TwistedSpec(0.5, 1.0)
    small = TwistedDomain(spec, r1=1.0, r_max=50.0)
    big = TwistedDomain(spec, r1=1.0, r_max=50.0)
    big.ensure_radius(5_000.0)
    assert big.rho_covered > small.rho_covered
    rng = np.random.default_rng(7)
    pts = _interior(big, lambda g, n: np.column_stack([g.uniform(1, 20, n), g.uniform(-5, 5, n)]), 2000, rng)
    small.ensure_radius(40.0)
    assert np.array_equal(small.contains(pts), big.contains(pts))
    assert np.array_equal(small.distance_lower_bound(pts), big.distance_lower_bound(pts))


def test_far_query_triggers_expansion():
    T = TwistedDomain(TwistedSpec(0.5, 1.0), r1=1.0, r_max=20.0)
    before = T.rho_covered
    assert T.contains((400.0, 0.0))
    assert T.rho_covered > before


# ---------------------------------------------------------------- parsing


def test_parse_domain():
    assert parse_domain("interval:-1,1") == IntervalDomain(-1.0, 1.0)
    b = parse_domain("ball:2,1,1,1")
    assert isinstance(b, BallDomain) and b.dim == 3 and b.radius == 2.0
    p = parse_domain("parabola:0.5,1,3")
    assert isinstance(p, ParabolaDomain) and p.dim == 3
    assert isinstance(parse_domain("twisted:0.5"), TwistedDomain)
    for bad in ("interval:1", "cone:1", "parabola:", "parabola:1.5"):
        with pytest.raises(ValueError):
            parse_domain(bad)


@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.1, max_value=5),
       st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=-0.999, max_value=0.999))
def test_parabola_interior_property(alpha, amp, x, frac):
    P = ParabolaDomain(ParabolaSpec(alpha, amp, 2))
    pt = (x, frac * amp * x**alpha)
    assert P.contains(pt)
    d = P.distance_lower_bound(pt)
    gap = amp * x**alpha - abs(pt[1])
    assert 0 <= d <= gap + 1e-12
