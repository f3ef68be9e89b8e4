"""Simulated measure distributions, log-odds ellipses and quantile intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import ModelFormula
from .errors import DegenerateRegionError, DomainError
from .measures import MEASURES, MeasureSet, log_odds_to_risks, measure_arrays, risks_to_log_odds
from .mle import FitResult
from .sampler import RandomSource, cholesky, sample_mvn

PLANES = {
    "log-or": ("log_o0", "log_or"),
    "or": ("o0", "or_"),
    "rd": ("r0", "rd"),
    "rr": ("r0", "rr"),
    "af": ("r0", "af"),
}

DEFAULT_POINTS = 256


@dataclass(frozen=True)
class MeasureDraws:
    columns: dict[str, np.ndarray]  # r0, r1, o0, or_, rd, rr, af; one entry per draw
    seed: int
    n_draws: int

    def __getitem__(self, key: str) -> np.ndarray:
        return self.columns[key]

    def log_pairs(self) -> np.ndarray:
        return np.column_stack([np.log(self.columns["o0"]), np.log(self.columns["or_"])])

    def row(self, i: int) -> MeasureSet:
        return MeasureSet(**{k: float(v[i]) for k, v in self.columns.items()})


def _factor(cov: np.ndarray) -> np.ndarray:
    # A zero covariance is legitimate (degenerate sampling); chol would reject it.
    if not np.any(cov):
        return np.zeros_like(cov)
    return cholesky(cov)


def simulate_measures(fit: FitResult, weights: dict, f: ModelFormula, n_draws: int, seed: int) -> MeasureDraws:
    """Draw parameter vectors from N(pi_hat, Sigma_hat) and evaluate every measure on each."""
    if not fit.converged:
        raise ValueError("fit did not converge")
    L = _factor(np.asarray(fit.covariance))
    draws = sample_mvn(fit.pi_hat, L, RandomSource(seed), n_draws)
    cols = measure_arrays(draws.draws, weights, f)
    return MeasureDraws(columns=cols, seed=seed, n_draws=n_draws)


def chi2_quantile_df2(p: float) -> float:
    """Quantile of the chi-square distribution with two degrees of freedom."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"probability must lie in [0, 1), got {p}")
    return -2.0 * math.log1p(-p)


@dataclass(frozen=True)
class Ellipse:
    center: np.ndarray
    covariance: np.ndarray
    level: float
    radius_sq: float

    def mahalanobis_sq(self, pts) -> np.ndarray:
        d = np.atleast_2d(pts) - self.center
        return np.einsum("ij,jk,ik->i", d, np.linalg.inv(self.covariance), d)

    def contains(self, pts) -> np.ndarray:
        return self.mahalanobis_sq(pts) <= self.radius_sq


def fit_ellipse(points, level: float) -> Ellipse:
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 10:
        raise ValueError("need at least 10 points to fit an ellipse")
    center = pts.mean(axis=0)
    cov = np.cov(pts, rowvar=False, ddof=1)
    if np.linalg.det(cov) <= 1e-14:
        raise DegenerateRegionError(f"sample covariance is degenerate (det={np.linalg.det(cov):.3g})")
    return Ellipse(center=center, covariance=cov, level=level, radius_sq=chi2_quantile_df2(level))


def log_odds_ellipse(draws: MeasureDraws, level: float) -> Ellipse:
    """Normal-theory ellipse for (log O0, log OR) fitted to the simulated draws.

    Centered at the sample mean (not the ML point) with the n-1 sample
    covariance; the boundary is the Mahalanobis contour at the chi-square(2)
    quantile for ``level``.
    """
    return fit_ellipse(draws.log_pairs(), level)


@dataclass(frozen=True)
class RegionPolyline:
    plane: str
    points: np.ndarray  # (m, 2), first row repeated at the end
    level: float

    @property
    def axes(self) -> tuple[str, str]:
        return PLANES[self.plane]


def ellipse_boundary(e: Ellipse, n_points: int = DEFAULT_POINTS) -> RegionPolyline:
    if n_points < 4:
        raise ValueError("n_points must be at least 4")
    t = 2.0 * np.pi * np.arange(n_points) / n_points
    L = cholesky(e.covariance)
    circle = np.column_stack([np.cos(t), np.sin(t)])
    pts = e.center + math.sqrt(e.radius_sq) * circle @ L.T
    pts = np.vstack([pts, pts[:1]])
    return RegionPolyline(plane="log-or", points=pts, level=e.level)


def _from_risks(plane: str, r0, r1) -> np.ndarray:
    if plane == "or":
        o0 = r0 / (1.0 - r0)
        return np.column_stack([o0, (r1 / (1.0 - r1)) / o0])
    if plane == "rd":
        return np.column_stack([r0, r1 - r0])
    if plane == "rr":
        return np.column_stack([r0, r1 / r0])
    if plane == "af":
        return np.column_stack([r0, 1.0 - r0 / r1])
    raise ValueError(f"unknown plane {plane!r}")


def map_region(poly: RegionPolyline, target: str) -> RegionPolyline:
    """Carry a (log O0, log OR) boundary pointwise into another measure plane."""
    if poly.plane != "log-or":
        raise ValueError("map_region expects a (log O0, log OR) polyline")
    if target not in PLANES:
        raise ValueError(f"unknown plane {target!r}")
    if target == "log-or":
        return poly
    if target == "or":
        # direct exponentiation; avoids a detour through the risks
        return RegionPolyline(plane="or", points=np.exp(poly.points), level=poly.level)
    r0, r1 = log_odds_to_risks(poly.points[:, 0], poly.points[:, 1])
    return RegionPolyline(plane=target, points=_from_risks(target, r0, r1), level=poly.level)


def unmap_region(poly: RegionPolyline) -> RegionPolyline:
    """Inverse of map_region: back to (log O0, log OR)."""
    a, b = poly.points[:, 0], poly.points[:, 1]
    if poly.plane == "log-or":
        return poly
    if poly.plane == "or":
        pts = np.log(poly.points)
    else:
        if poly.plane == "rd":
            r1 = a + b
        elif poly.plane == "rr":
            r1 = a * b
        else:
            r1 = a / (1.0 - b)
        pts = np.column_stack(risks_to_log_odds(a, r1))
    return RegionPolyline(plane="log-or", points=pts, level=poly.level)


def quantile(values, p) -> np.ndarray:
    """Empirical quantile, linear between order statistics at h = (n-1)p + 1."""
    return np.quantile(np.asarray(values, dtype=float), p, method="linear")


@dataclass(frozen=True)
class IntervalReport:
    point: MeasureSet
    levels: tuple[float, ...]
    bounds: dict[str, dict[float, tuple[float, float]]]  # measure -> level -> (lower, upper)

    def bounds_tuple(self, measure: str) -> tuple[float, float, float, float]:
        """(95% lower, 50% lower, 50% upper, 95% upper)."""
        lo95, hi95 = self.bounds[measure][0.95]
        lo50, hi50 = self.bounds[measure][0.5]
        return (lo95, lo50, hi50, hi95)

    def to_dict(self) -> dict:
        out = {}
        for m in MEASURES:
            out[m] = {
                "estimate": float(getattr(self.point, m)),
                "intervals": [
                    {"level": lv, "lower": float(self.bounds[m][lv][0]), "upper": float(self.bounds[m][lv][1])}
                    for lv in self.levels
                ],
            }
        return out


def quantile_intervals(draws: MeasureDraws, levels, point: MeasureSet) -> IntervalReport:
    if draws.n_draws < 100:
        raise ValueError("quantile intervals need at least 100 draws")
    levels = tuple(sorted(float(lv) for lv in levels))
    for lv in levels:
        if not 0.0 < lv < 1.0:
            raise DomainError(f"confidence level must lie in (0, 1), got {lv}")
    bounds: dict[str, dict[float, tuple[float, float]]] = {}
    for m in MEASURES:
        col = draws[m]
        bounds[m] = {}
        for lv in levels:
            lo, hi = quantile(col, [(1.0 - lv) / 2.0, 1.0 - (1.0 - lv) / 2.0])
            bounds[m][lv] = (float(lo), float(hi))
    return IntervalReport(point=point, levels=levels, bounds=bounds)
