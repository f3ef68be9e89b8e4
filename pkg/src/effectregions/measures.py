"""Baseline and effect measures from standardized risks.

Everything here broadcasts over numpy arrays, so the same functions serve the
point estimate and a whole matrix of simulated parameter vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import ModelFormula
from .errors import DomainError
from .mle import expit

EPS = 1e-12

MEASURES = ("r0", "o0", "or_", "rd", "rr", "af")


def _clamp(r):
    return np.clip(r, EPS, 1.0 - EPS)


@dataclass(frozen=True)
class RiskPair:
    r0: float
    r1: float


@dataclass(frozen=True)
class MeasureSet:
    r0: float
    r1: float
    o0: float
    or_: float
    rd: float
    rr: float
    af: float

    def as_dict(self) -> dict[str, float]:
        return {k: float(getattr(self, k)) for k in ("r0", "r1", *MEASURES[1:])}


def conditional_risk(pi, row):
    """Modelled P(y=1 | z, x) for a design row (or rows)."""
    r = expit(np.asarray(row, dtype=float) @ np.asarray(pi, dtype=float).T)
    return float(r) if r.ndim == 0 else r


def standardized_risk(pi, z: int, weights: dict, f: ModelFormula):
    """Average the conditional risk under arm ``z`` over the stratum weights.

    ``pi`` may be a single parameter vector or an (n, k) matrix of draws.
    """
    strata = list(weights)
    w = np.array([weights[x] for x in strata])
    rows = f.rows(z, strata)
    pi = np.asarray(pi, dtype=float)
    return expit(pi @ rows.T) @ w


def _measures(r0, r1):
    r0 = _clamp(r0)
    r1 = _clamp(r1)
    o0 = r0 / (1.0 - r0)
    o1 = r1 / (1.0 - r1)
    rr = r1 / r0
    return dict(r0=r0, r1=r1, o0=o0, or_=o1 / o0, rd=r1 - r0, rr=rr, af=1.0 - 1.0 / rr)


def measures_from_risks(rp: RiskPair) -> MeasureSet:
    m = _measures(np.float64(rp.r0), np.float64(rp.r1))
    return MeasureSet(**{k: float(v) for k, v in m.items()})


def risks_from_odds(o0, or_) -> RiskPair:
    o0 = float(o0)
    or_ = float(or_)
    if not (np.isfinite(o0) and np.isfinite(or_) and o0 > 0 and or_ > 0):
        raise DomainError(f"odds and odds ratio must be positive and finite, got ({o0}, {or_})")
    o1 = o0 * or_
    return RiskPair(r0=o0 / (1.0 + o0), r1=o1 / (1.0 + o1))


def point_measures(pi, weights: dict, f: ModelFormula) -> MeasureSet:
    r0 = standardized_risk(pi, 0, weights, f)
    r1 = standardized_risk(pi, 1, weights, f)
    return measures_from_risks(RiskPair(float(r0), float(r1)))


def measure_arrays(pis, weights: dict, f: ModelFormula) -> dict[str, np.ndarray]:
    """All measures for every row of an (n, k) parameter matrix."""
    pis = np.atleast_2d(pis)
    return _measures(standardized_risk(pis, 0, weights, f), standardized_risk(pis, 1, weights, f))


# Pointwise conversions between planes, used to map region boundaries.


def log_odds_to_risks(log_o0, log_or):
    """(log O0, log OR) -> (R0, R1), vectorized. expit keeps saturated ends finite."""
    log_o0 = np.asarray(log_o0, dtype=float)
    log_or = np.asarray(log_or, dtype=float)
    return expit(log_o0), expit(log_o0 + log_or)


def risks_to_log_odds(r0, r1):
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    lo0 = np.log(r0) - np.log1p(-r0)
    lo1 = np.log(r1) - np.log1p(-r1)
    return lo0, lo1 - lo0
