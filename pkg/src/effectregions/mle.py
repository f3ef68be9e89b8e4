"""Grouped-binomial logistic regression by Newton/IRLS.

The log-likelihood maximised is ``sum(e * eta - n * log1p(exp(eta)))`` with
``eta = X @ pi``. Each iteration solves the Newton system through a Cholesky
factor of the information ``X' W X`` (``w = n p (1 - p)``), halving the step
while the log-likelihood would decrease. Steps longer than MAX_STEP in any
coordinate are shortened first; far from the optimum a raw Newton step on
saturated cells can be orders of magnitude too long.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .design import DesignMatrix
from .errors import NonConvergenceError, NotPositiveDefiniteError, SeparationError, SingularDesignError
from .sampler import cholesky

SCORE_TOL = 1e-8
STEP_TOL = 1e-10
MAX_ITER = 50
MAX_HALVINGS = 10
SEPARATION_BOUND = 15.0
MAX_STEP = 5.0  # largest coordinate change per iteration before halving

DISPERSIONS = ("none", "deviance", "pearson")


def expit(eta):
    # split by sign so neither branch overflows
    eta = np.asarray(eta, dtype=float)
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def log_likelihood(X: DesignMatrix, pi) -> float:
    eta = X.X @ np.asarray(pi, dtype=float)
    # log(1 + e^eta) computed stably
    return float(np.sum(X.events * eta - X.trials * np.logaddexp(0.0, eta)))


def score(X: DesignMatrix, pi) -> np.ndarray:
    p = expit(X.X @ np.asarray(pi, dtype=float))
    return X.X.T @ (X.events - X.trials * p)


def observed_information(X: DesignMatrix, pi) -> np.ndarray:
    p = expit(X.X @ np.asarray(pi, dtype=float))
    w = X.trials * p * (1.0 - p)
    return X.X.T @ (w[:, None] * X.X)


def _cho_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(np.tril(L), b)
    return np.linalg.solve(np.tril(L).T, y)


def _deviance(X: DesignMatrix, p: np.ndarray) -> float:
    e, n = X.events, X.trials
    fitted = n * p
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(e > 0, e * np.log(e / fitted), 0.0)
        b = np.where(n - e > 0, (n - e) * np.log((n - e) / (n - fitted)), 0.0)
    return float(2.0 * np.sum(a + b))


@dataclass(frozen=True)
class FitResult:
    names: list[str]
    pi_hat: np.ndarray
    covariance: np.ndarray
    information: np.ndarray
    log_likelihood: float
    deviance: float
    pearson_chi2: float
    df_resid: int
    dispersion: float
    dispersion_method: str
    iterations: int
    converged: bool
    loglik_trace: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "parameters": list(self.names),
            "estimates": [float(v) for v in self.pi_hat],
            "covariance": [[float(v) for v in r] for r in self.covariance],
            "log_likelihood": self.log_likelihood,
            "deviance": self.deviance,
            "pearson_chi2": self.pearson_chi2,
            "df_resid": self.df_resid,
            "dispersion": self.dispersion,
            "dispersion_method": self.dispersion_method,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def fit_logistic(X: DesignMatrix, dispersion: str = "none", start=None) -> FitResult:
    """Maximum-likelihood fit of the grouped logistic model.

    ``dispersion`` scales the inverse information: ``"none"`` gives the plain
    ML covariance, ``"deviance"`` and ``"pearson"`` multiply it by the residual
    deviance or Pearson chi-square over its degrees of freedom (quasi-binomial).
    Raises SingularDesignError on rank deficiency, SeparationError when a
    coefficient diverges, NonConvergenceError at the iteration cap.
    """
    if dispersion not in DISPERSIONS:
        raise ValueError(f"dispersion must be one of {DISPERSIONS}")
    A = X.X
    k = A.shape[1]
    if np.linalg.matrix_rank(A) < k:
        raise SingularDesignError(f"design matrix has rank {np.linalg.matrix_rank(A)} < {k} columns")
    if X.events.sum() == 0 or X.events.sum() == X.trials.sum():
        raise SeparationError("complete separation: outcome is constant, no finite maximum likelihood estimate")

    pi = np.zeros(k) if start is None else np.array(start, dtype=float)
    ll = log_likelihood(X, pi)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        g = score(X, pi)
        try:
            L = cholesky(observed_information(X, pi))
        except NotPositiveDefiniteError:
            if np.abs(pi).max() > SEPARATION_BOUND:
                raise SeparationError("information became singular as coefficients diverged") from None
            raise SingularDesignError("information matrix is not positive definite") from None
        step = _cho_solve(L, g)
        big = np.abs(step).max()
        if big > MAX_STEP:
            step *= MAX_STEP / big
        # near the optimum ll differences sink below rounding noise
        slack = 1e-12 * max(1.0, abs(ll))
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            cand = pi + t * step
            ll_new = log_likelihood(X, cand)
            if ll_new >= ll - slack:
                break
            t *= 0.5
        else:
            # no ascent available at this precision; accept the smallest step
            cand, ll_new = pi, ll
        delta = np.abs(cand - pi).max()
        pi, ll = cand, ll_new
        trace.append(ll)
        if np.abs(score(X, pi)).max() < SCORE_TOL and delta < STEP_TOL:
            converged = True
            break
        if delta == 0.0:
            break

    # a vanishing score far out along a ray is separation, not a maximum
    if np.abs(pi).max() > SEPARATION_BOUND:
        raise SeparationError(
            f"coefficient magnitude {np.abs(pi).max():.1f} exceeds {SEPARATION_BOUND}; data appear separated"
        )
    if not converged:
        raise NonConvergenceError(f"no convergence after {it} iterations", last_iterate=pi)

    info = observed_information(X, pi)
    try:
        Li = cholesky(info)
    except NotPositiveDefiniteError:
        raise SeparationError("information is singular at the estimate") from None
    inv = _cho_solve(Li, np.eye(k))
    inv = 0.5 * (inv + inv.T)

    p = expit(A @ pi)
    dev = _deviance(X, p)
    fitted_var = X.trials * p * (1.0 - p)
    pearson = float(np.sum((X.events - X.trials * p) ** 2 / fitted_var))
    df = A.shape[0] - k
    if dispersion == "none":
        phi = 1.0
    else:
        if df <= 0:
            raise ValueError("dispersion estimate needs more cells than parameters")
        phi = (dev if dispersion == "deviance" else pearson) / df

    return FitResult(
        names=X.names,
        pi_hat=pi,
        covariance=phi * inv,
        information=info,
        log_likelihood=ll,
        deviance=dev,
        pearson_chi2=pearson,
        df_resid=df,
        dispersion=phi,
        dispersion_method=dispersion,
        iterations=it,
        converged=True,
        loglik_trace=trace,
    )
