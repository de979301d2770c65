from __future__ import annotations

import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from ibmx import interval
from ibmx.interval import IllConditionedWarning, IntervalLaw

PI = math.pi


def mp_unit_survival(x, theta, terms=400):
    x, theta = mpmath.mpf(x), mpmath.mpf(theta)
    s = mpmath.mpf(0)
    for n in range(terms):
        k = 2 * n + 1
        s += mpmath.exp(-k * k * mpmath.pi**2 * theta / 2) * mpmath.sin(k * mpmath.pi * x) / k
    return 4 / mpmath.pi * s


def mp_survival_uv(u, v, t, terms=400):
    L = mpmath.mpf(u) + mpmath.mpf(v)
    return mp_unit_survival(mpmath.mpf(u) / L, mpmath.mpf(t) / L**2, terms)


def mp_mixed(u, v, t):
    with mpmath.workdps(60):
        return float(mpmath.diff(lambda a, b: mp_survival_uv(a, b, t), (u, v), (1, 1)))


# ---------------------------------------------------------------- survival


def test_survival_examples():
    assert interval.survival_unit(0.5, 0.0) == 1.0
    assert interval.survival_uv(1.0, 1.0, 0.0) == 1.0
    ref = float(mp_unit_survival(0.5, 2.0))
    assert abs(interval.survival_unit(0.5, 2.0) - ref) <= 1e-15
    assert ref == pytest.approx(4 / PI * math.exp(-PI**2), rel=1e-15)


@given(st.floats(min_value=1e-3, max_value=1 - 1e-3), st.floats(min_value=1e-3, max_value=5.0))
def test_survival_unit_matches_mpmath(x, theta):
    with mpmath.workdps(30):
        ref = float(mp_unit_survival(x, theta, terms=max(50, int(12 / math.sqrt(theta)))))
    assert abs(interval.survival_unit(x, theta) - ref) <= 1e-12


@given(st.floats(min_value=1e-3, max_value=1 - 1e-3), st.floats(min_value=0.0, max_value=3.0))
def test_survival_reflection_symmetry(x, t):
    assert interval.survival_unit(x, t) == pytest.approx(interval.survival_unit(1 - x, t), abs=1e-14)


@given(st.floats(min_value=0.01, max_value=10.0), st.floats(min_value=0.01, max_value=10.0),
       st.floats(min_value=0.0, max_value=50.0))
def test_survival_scaling(u, v, t):
    L = u + v
    assert interval.survival_uv(u, v, t) == pytest.approx(interval.survival_unit(u / L, t / L**2), abs=1e-14)
    assert interval.survival_uv(2 * u, 2 * v, t) == pytest.approx(interval.survival_uv(u, v, t / 4), abs=1e-14)


def test_survival_law_wrapper():
    law = IntervalLaw(1.0, 1.0)
    for t in (0.0, 0.5, 3.0):
        assert interval.survival(law, t) == interval.survival_uv(1.0, 1.0, t)
        assert interval.survival(law, t) == pytest.approx(interval.survival_unit(0.5, t / 4), abs=1e-15)


@given(st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.05, max_value=5.0))
def test_survival_monotone(u, v):
    ts = np.geomspace(1e-3, 50.0, 60)
    s = interval.survival_uv(u, v, ts)
    assert np.all((s >= 0) & (s <= 1))
    assert np.all(np.diff(s) <= 0)
    live = (s > 1e-280) & (s < 1 - 1e-12)
    assert np.all(np.diff(s[live]) < 0)
    # nondecreasing in each endpoint distance, up to a few ulp where the far end is irrelevant
    assert np.all(interval.survival_uv(u * 1.1, v, ts) >= s - 1e-14)
    assert np.all(interval.survival_uv(u, v * 1.1, ts) >= s - 1e-14)


def test_log_survival_far_tail():
    # log form stays finite where the value underflows
    t = 5000.0
    ls = interval.log_survival_uv(1.0, 1.0, t)
    lead = math.log(4 / PI) - PI**2 * t / 8
    assert ls == pytest.approx(lead, rel=1e-14)
    assert interval.survival_uv(1.0, 1.0, t) == 0.0 or interval.survival_uv(1.0, 1.0, t) < 1e-300


def test_degenerate_endpoints():
    assert interval.survival_uv(0.0, 1.0, 1.0) == 0.0
    assert interval.survival_uv(0.0, 1.0, 0.0) == 1.0
    assert interval.survival_uv(1.0, 0.0, 0.2) == 0.0


@pytest.mark.parametrize("args", [(1.2, 1.0), (0.0, 1.0), (0.5, -1.0)])
def test_survival_unit_domain_errors(args):
    with pytest.raises(ValueError):
        interval.survival_unit(*args)


def test_law_validation():
    with pytest.raises(ValueError):
        IntervalLaw(0.0, 1.0)
    with pytest.raises(ValueError):
        IntervalLaw(1.0, -2.0)


def test_series_agree_on_overlap_band():
    x = np.linspace(0.005, 0.995, 199)
    theta = np.geomspace(0.04, 0.16, 41)
    X, T = np.meshgrid(x, theta)
    assert np.max(np.abs(interval._eigen_survival(X, T) - interval._image_survival(X, T))) <= 1e-10
    fe, fi = interval._eigen_density(X, T), interval._image_density(X, T)
    assert np.max(np.abs(fe - fi)) <= 1e-10 * np.max(np.abs(fe))


# ---------------------------------------------------------------- asymptotic form


def test_asymptotic_ratio():
    for x in np.linspace(0.1, 0.9, 9):
        r = interval.survival_unit(x, 4.0) / interval.asymptotic_survival_unit(x, 4.0)
        assert abs(r - 1) <= 1e-6
    assert interval.asymptotic_survival_unit(0.5, 3.0) == pytest.approx(4 / PI * math.exp(-PI**2 * 1.5), rel=1e-15)
    assert interval.asymptotic_survival_unit(0.2, 1.0) == pytest.approx(interval.asymptotic_survival_unit(0.8, 1.0),
                                                                      rel=1e-14)


# ---------------------------------------------------------------- density


@pytest.mark.parametrize("u,v", [(1.0, 1.0), (0.3, 2.0), (3.0, 0.5)])
def test_density_normalized_and_mean(u, v):
    f = lambda s: math.exp(s) * float(interval.density_uv(u, v, math.exp(s)))  # noqa: E731
    g = lambda s: math.exp(2 * s) * float(interval.density_uv(u, v, math.exp(s)))  # noqa: E731
    lo, hi = math.log(1e-6 * (u + v) ** 2), math.log(200.0 * (u + v) ** 2)
    mass = integrate.quad(f, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    mean = integrate.quad(g, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    assert abs(mass - 1) <= 1e-8
    assert abs(mean - u * v) <= 1e-6


def test_density_nonnegative_and_matches_derivative():
    ts = np.geomspace(1e-4, 1e2, 400)
    d = interval.density_uv(1.0, 1.0, ts)
    assert np.all(d >= 0)
    for t in (0.05, 0.3, 1.0, 7.0):
        with mpmath.workdps(40):
            ref = -float(mpmath.diff(lambda s: mp_survival_uv(1.0, 0.7, s), t))
        assert float(interval.density_uv(1.0, 0.7, t)) == pytest.approx(ref, rel=1e-10)


def test_log_density_consistent():
    ts = np.geomspace(1e-2, 40.0, 50)
    d = interval.density_uv(0.6, 1.3, ts)
    ld = interval.log_density_uv(0.6, 1.3, ts)
    assert np.allclose(np.exp(ld), d, rtol=1e-12, atol=0)
    assert interval.density(IntervalLaw(0.6, 1.3), 2.0) == pytest.approx(float(interval.density_uv(0.6, 1.3, 2.0)))


# ---------------------------------------------------------------- mixed partial


def test_mixed_partial_positive_example():
    assert interval.mixed_partial(IntervalLaw(1.0, 1.0), 10.0) > 0


def test_mixed_partial_cosine_group_vanishes_on_diagonal():
    # at u = v only the sine group survives
    for t in (0.5, 2.0, 10.0):
        L = 2.0
        total = 0.0
        for j in range(200):
            k = 2 * j + 1
            e = math.exp(-k * k * PI**2 * t / (2 * L * L))
            total += e * math.sin(k * PI / 2) / L**4 * (PI**3 * k**3 * t * t / L**2 - 3 * PI * k * t + k * PI)
        assert float(interval.mixed_partial_uv(1.0, 1.0, t)) == pytest.approx(4 * total, rel=1e-12)


def test_mixed_partial_fd_example():
    h = 1e-4
    s = interval.survival_uv
    fd = (s(1 + h, 2 + h, 20.0) - s(1 + h, 2 - h, 20.0) - s(1 - h, 2 + h, 20.0) + s(1 - h, 2 - h, 20.0)) / (4 * h * h)
    exact = float(interval.mixed_partial_uv(1.0, 2.0, 20.0))
    assert abs(fd - exact) <= 1e-4 * abs(exact)


@pytest.mark.parametrize("u,v,t", [(1.0, 1.0, 0.05), (0.4, 1.5, 0.04), (1.0, 2.0, 20.0), (2.0, 0.5, 1.0),
                                   (0.3, 0.3, 0.01), (1.0, 1.0, 0.3), (0.2, 3.0, 0.5)])
def test_mixed_partial_matches_mpmath_derivative(u, v, t):
    ref = mp_mixed(u, v, t)
    got = float(interval.mixed_partial_uv(u, v, t))
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-14)


def test_mixed_partial_finite_differences_randomized():
    rng = np.random.default_rng(11)
    count = 0
    h = 1e-4
    s = interval.survival_uv
    while count < 20:
        u, v = np.exp(rng.uniform(np.log(0.3), np.log(3.0), 2))
        theta = np.exp(rng.uniform(np.log(0.1), np.log(2.0)))
        t = theta * (u + v) ** 2
        exact = float(interval.mixed_partial_uv(u, v, t))
        fd = (s(u + h, v + h, t) - s(u + h, v - h, t) - s(u - h, v + h, t) + s(u - h, v - h, t)) / (4 * h * h)
        if abs(exact) < 1e-3:
            continue  # difference quotient roundoff dominates; points near a sign change are skipped
        assert abs(fd - exact) <= 1e-4 * abs(exact)
        count += 1


def test_mixed_partial_methods_agree_on_band():
    u = np.array([0.5, 1.0, 2.0])
    v = np.array([1.5, 1.0, 0.7])
    for theta in (0.04, 0.08, 0.12):
        t = theta * (u + v) ** 2
        a = interval.mixed_partial_uv(u, v, t, method="series")
        b = interval.mixed_partial_uv(u, v, t, method="images")
        assert np.allclose(a, b, rtol=1e-9, atol=1e-12)


@given(st.floats(min_value=-4, max_value=4), st.floats(min_value=-4, max_value=4), st.floats(min_value=10, max_value=1e3))
def test_mixed_partial_positive_region(lu, lv, theta):
    u, v = math.exp(lu), math.exp(lv)
    t = theta * (u + v) ** 2
    assert interval.mixed_partial_uv(u, v, t, scaled=True) > 0


def test_mixed_partial_scaled():
    u, v, t = 1.0, 2.0, 30.0
    a = float(interval.mixed_partial_uv(u, v, t))
    b = float(interval.mixed_partial_uv(u, v, t, scaled=True))
    assert b * math.exp(-PI**2 * t / (2 * 9)) == pytest.approx(a, rel=1e-12)


def test_mixed_partial_ill_conditioned_flag():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        val = interval.mixed_partial_uv(1.0, 1.0, 0.02, method="series")
    assert any(issubclass(x.category, IllConditionedWarning) for x in w)
    assert math.isfinite(float(val))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        interval.mixed_partial_uv(1.0, 1.0, 0.02)  # auto switches to images, no warning


def test_mixed_partial_errors():
    with pytest.raises(ValueError):
        interval.mixed_partial_uv(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        interval.mixed_partial_uv(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        interval.mixed_partial_uv(1.0, 1.0, 1.0, method="nope")


# ---------------------------------------------------------------- sampling


def test_sample_exit_round_trip_examples():
    law = IntervalLaw(1.0, 1.0)
    assert float(interval.sample_exit(law, float(interval.survival(law, 5.0)))) == pytest.approx(5.0, rel=1e-8)
    ts = [float(interval.sample_exit(law, 1 - e)) for e in (1e-3, 1e-6, 1e-10, 1e-15)]
    assert all(b < a for a, b in zip(ts, ts[1:])) and ts[-1] < 0.02


@given(st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.05, max_value=5.0),
       st.floats(min_value=1e-12, max_value=1 - 1e-9))
def test_sample_exit_round_trip(u, v, w):
    t = float(interval.sample_exit_uv(u, v, w))
    assert t > 0
    assert float(interval.survival_uv(u, v, t)) == pytest.approx(w, rel=1e-8)


def test_sample_exit_deterministic_and_vectorized():
    w = np.linspace(0.01, 0.99, 50)
    a = interval.sample_exit_uv(1.0, 2.0, w)
    b = np.array([float(interval.sample_exit_uv(1.0, 2.0, x)) for x in w])
    assert np.allclose(a, b, rtol=1e-12)
    assert np.all(np.diff(a) < 0)


def test_sample_exit_mean_moderate():
    w = (np.arange(100_000) + 0.5) / 100_000  # stratified: the mean is a quadrature of the quantile
    mean = float(np.mean(interval.sample_exit_uv(1.0, 1.0, w)))
    assert mean == pytest.approx(1.0, abs=2e-3)


def test_sample_exit_rejects_bad_uniform():
    for w in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            interval.sample_exit_uv(1.0, 1.0, w)


@pytest.mark.parametrize("u,v,t", [(1.0, 1.0, 0.02), (1.0, 1.0, 0.005), (0.5, 2.0, 0.004), (1.0, 1.0, 0.3),
                                   (1.0, 3.0, 2.0), (0.2, 0.2, 0.01)])
def test_log_cdf_matches_mpmath_complement(u, v, t):
    with mpmath.workdps(90):
        ref = float(mpmath.log(1 - mp_survival_uv(u, v, t, terms=1500)))
    got = float(interval.log_cdf_uv(u, v, t))
    assert got == pytest.approx(ref, rel=1e-11, abs=1e-14)


def test_log_cdf_edges_and_consistency():
    assert interval.log_cdf_uv(1.0, 1.0, 0.0) == -math.inf
    assert interval.log_cdf_uv(0.0, 1.0, 0.5) == 0.0
    t = np.geomspace(0.05, 20.0, 40)
    s = interval.survival_uv(1.0, 1.0, t)
    np.testing.assert_allclose(np.exp(interval.log_cdf_uv(1.0, 1.0, t)), 1.0 - s, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("u,v,t", [(1.0, 1.0, 1e-4), (0.3, 0.7, 2e-4), (1.0, 1.0, 1e-6)])
def test_log_cdf_deep_tail(u, v, t):
    # two one-sided hitting terms dominate; the next image is smaller by exp(-2/t) or more
    with mpmath.workdps(40):
        ref = float(mpmath.log(mpmath.erfc(u / mpmath.sqrt(2 * t)) + mpmath.erfc(v / mpmath.sqrt(2 * t))))
    got = float(interval.log_cdf_uv(u, v, t))
    assert math.isfinite(got) and got < -0.99 * min(u, v) ** 2 / (2 * t)
    assert got == pytest.approx(ref, rel=1e-12)
