from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import chi2

from effectregions import (
    RandomSource,
    chi2_quantile_df2,
    cholesky,
    ellipse_boundary,
    log_odds_ellipse,
    map_region,
    point_measures,
    quantile_intervals,
    sample_mvn,
    simulate_measures,
    unmap_region,
)
from effectregions.errors import DegenerateRegionError, DomainError
from effectregions.measures import MEASURES
from effectregions.regions import Ellipse, MeasureDraws, RegionPolyline, fit_ellipse, quantile


@pytest.fixture(scope="module")
def draws(hpylori_fit, hpylori_weights, hpylori_formula):
    return simulate_measures(hpylori_fit, hpylori_weights, hpylori_formula, 10_000, 20140101)


@pytest.fixture(scope="module")
def point(hpylori_fit, hpylori_weights, hpylori_formula):
    return point_measures(hpylori_fit.pi_hat, hpylori_weights, hpylori_formula)


def test_chi2_quantile():
    assert chi2_quantile_df2(0.95) == pytest.approx(-2 * math.log(0.05), rel=1e-15)
    assert chi2_quantile_df2(0.95) == pytest.approx(5.9915, abs=5e-5)
    assert chi2_quantile_df2(0.5) == pytest.approx(1.3863, abs=5e-5)
    assert chi2_quantile_df2(0.0) == 0.0
    for p in (0.01, 0.3, 0.5, 0.9, 0.99, 0.999):
        assert chi2_quantile_df2(p) == pytest.approx(chi2.ppf(p, 2), rel=1e-10)
    with pytest.raises(DomainError):
        chi2_quantile_df2(1.0)


def test_zero_covariance_draws_equal_point(hpylori_fit, hpylori_weights, hpylori_formula, point):
    fit0 = replace(hpylori_fit, covariance=np.zeros((8, 8)))
    d = simulate_measures(fit0, hpylori_weights, hpylori_formula, 200, 1)
    for m in MEASURES:
        assert np.all(d[m] == pytest.approx(getattr(point, m), abs=1e-15))


def test_simulation_deterministic(hpylori_fit, hpylori_weights, hpylori_formula):
    a = simulate_measures(hpylori_fit, hpylori_weights, hpylori_formula, 500, 9)
    b = simulate_measures(hpylori_fit, hpylori_weights, hpylori_formula, 500, 9)
    for k in a.columns:
        assert a[k].tobytes() == b[k].tobytes()


def test_draws_are_internally_consistent(draws):
    assert draws.n_draws == 10_000
    np.testing.assert_allclose(draws["o0"], draws["r0"] / (1 - draws["r0"]), rtol=1e-13)
    np.testing.assert_allclose(draws["af"], 1 - 1 / draws["rr"], atol=1e-15)
    s = np.sign(draws["rd"])
    assert np.all(np.sign(np.log(draws["or_"])) == s)
    assert np.all(np.sign(np.log(draws["rr"])) == s)
    assert np.all(np.sign(draws["af"]) == s)


def test_ellipse_from_identical_draws_is_degenerate():
    pts = np.tile([0.1, 0.2], (50, 1))
    with pytest.raises(DegenerateRegionError):
        fit_ellipse(pts, 0.95)


def test_ellipse_recovers_known_normal():
    mu = np.array([0.3, -0.7])
    S = np.array([[0.5, -0.2], [-0.2, 0.3]])
    z = sample_mvn(mu, cholesky(S), RandomSource(77), 100_000).draws
    e = fit_ellipse(z, 0.95)
    assert np.abs(e.center - mu).max() < 0.01
    assert np.abs(e.covariance - S).max() < 0.02
    assert e.radius_sq == pytest.approx(-2 * math.log(0.05), abs=1e-12)


def test_unit_circle_boundary():
    e = Ellipse(center=np.zeros(2), covariance=np.eye(2), level=0.5, radius_sq=1.0)
    poly = ellipse_boundary(e, 4)
    np.testing.assert_allclose(poly.points, [[1, 0], [0, 1], [-1, 0], [0, -1], [1, 0]], atol=1e-15)
    assert np.array_equal(poly.points[0], poly.points[-1])


def test_scaled_circle_boundary():
    e = Ellipse(center=np.zeros(2), covariance=4 * np.eye(2), level=0.5, radius_sq=1.0)
    poly = ellipse_boundary(e, 64)
    np.testing.assert_allclose(np.hypot(*poly.points.T), 2.0, rtol=1e-15)


def test_boundary_points_on_ellipse(draws):
    for level in (0.5, 0.95):
        e = log_odds_ellipse(draws, level)
        poly = ellipse_boundary(e)
        assert len(poly.points) == 257
        dev = np.abs(e.mahalanobis_sq(poly.points) - e.radius_sq)
        assert dev.max() < 1e-10


def test_ellipse_coverage(draws):
    pts = draws.log_pairs()
    for level in (0.5, 0.95):
        frac = log_odds_ellipse(draws, level).contains(pts).mean()
        assert abs(frac - level) < 0.03


def test_map_null_point():
    poly = RegionPolyline("log-or", np.array([[0.0, 0.0]]), 0.95)
    np.testing.assert_allclose(map_region(poly, "or").points, [[1.0, 1.0]])
    np.testing.assert_allclose(map_region(poly, "rd").points, [[0.5, 0.0]])
    np.testing.assert_allclose(map_region(poly, "rr").points, [[0.5, 1.0]])
    np.testing.assert_allclose(map_region(poly, "af").points, [[0.5, 0.0]])


def test_map_reference_center():
    poly = RegionPolyline("log-or", np.array([[0.12, 0.68]]), 0.95)
    o0, or_ = math.exp(0.12), math.exp(0.68)
    assert (o0, or_) == pytest.approx((1.1275, 1.9739), abs=5e-5)
    r0 = o0 / (1 + o0)
    r1 = o0 * or_ / (1 + o0 * or_)
    assert (r0, r1) == pytest.approx((0.5300, 0.6900), abs=5e-5)
    np.testing.assert_allclose(map_region(poly, "or").points, [[o0, or_]], rtol=1e-15)
    np.testing.assert_allclose(map_region(poly, "rd").points, [[r0, r1 - r0]], rtol=1e-14)
    assert map_region(poly, "rd").points[0, 1] == pytest.approx(0.16, abs=5e-5)


def test_map_roundtrips(draws):
    base = ellipse_boundary(log_odds_ellipse(draws, 0.95))
    for plane in ("or", "rd", "rr", "af"):
        mapped = map_region(base, plane)
        assert np.array_equal(mapped.points[0], mapped.points[-1])
        assert np.all(np.isfinite(mapped.points))
        back = unmap_region(mapped)
        assert np.abs(back.points - base.points).max() < 1e-10


def test_rd_region_admissible(draws):
    for level in (0.5, 0.95):
        pts = map_region(ellipse_boundary(log_odds_ellipse(draws, level)), "rd").points
        r0, rd = pts[:, 0], pts[:, 1]
        assert np.all((r0 > 0) & (r0 < 1))
        assert np.all((rd > -r0) & (rd < 1 - r0))


def test_map_extreme_log_points_stay_finite():
    pts = np.array([[40.0, -40.0], [-40.0, 40.0], [40.0, 40.0], [-40.0, -40.0], [40.0, -40.0]])
    for plane in ("rd", "rr", "af"):
        out = map_region(RegionPolyline("log-or", pts, 0.95), plane).points
        assert np.all(np.isfinite(out))


def test_quantile_convention():
    x = np.arange(1, 1001, dtype=float)
    assert quantile(x, 0.025) == pytest.approx(25.975, abs=1e-12)
    # order-statistic arithmetic: h = (n-1)p + 1, interpolate x[floor h] .. x[floor h + 1]
    rng = np.random.default_rng(4)
    v = rng.normal(size=337)
    s = np.sort(v)
    for p in (0.025, 0.25, 0.5, 0.75, 0.975):
        h = (len(s) - 1) * p + 1
        lo = math.floor(h)
        expect = s[lo - 1] + (h - lo) * (s[min(lo, len(s) - 1)] - s[lo - 1])
        assert quantile(v, p) == pytest.approx(expect, abs=1e-14)


def test_degenerate_intervals(point):
    cols = {m: np.full(200, 0.3) for m in ("r0", "r1", "o0", "or_", "rd", "rr", "af")}
    rep = quantile_intervals(MeasureDraws(cols, 0, 200), (0.5, 0.95), point)
    for m in MEASURES:
        assert set(rep.bounds_tuple(m)) == {0.3}


def test_interval_nesting(draws, point):
    rep = quantile_intervals(draws, (0.5, 0.95), point)
    for m in MEASURES:
        t = rep.bounds_tuple(m)
        assert list(t) == sorted(t)


def test_interval_needs_draws(point):
    cols = {m: np.zeros(50) for m in ("r0", "r1", "o0", "or_", "rd", "rr", "af")}
    with pytest.raises(ValueError):
        quantile_intervals(MeasureDraws(cols, 0, 50), (0.95,), point)
