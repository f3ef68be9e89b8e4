"""Seedable normal variates and multivariate normal draws.

Uniforms come from PCG64 (O'Neill's XSL-RR 128/64 permuted congruential
generator, as shipped in numpy). Each 64-bit output ``u`` is mapped to a double
in [0, 1) as ``(u >> 11) * 2**-53``. Standard normals use Marsaglia's polar
method, consuming uniforms in pairs and emitting both variates of an accepted
pair in order. The stream is therefore a pure function of the seed, independent
of how many variates each call requests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError

_TWO_M53 = 2.0**-53


class RandomSource:
    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self._bitgen = np.random.PCG64(self.seed)
        self._spare = np.empty(0)

    def uniforms(self, n: int) -> np.ndarray:
        raw = self._bitgen.random_raw(n)
        return (raw >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def normals(self, n: int) -> np.ndarray:
        out = [self._spare[:n]]
        have = out[0].size
        self._spare = self._spare[have:]
        while have < n:
            # acceptance rate is pi/4; overshoot a little to avoid extra rounds
            pairs = int((n - have) / 2 / 0.785) + 16
            u = self.uniforms(2 * pairs).reshape(pairs, 2) * 2.0 - 1.0
            s = u[:, 0] ** 2 + u[:, 1] ** 2
            ok = (s > 0.0) & (s < 1.0)
            u, s = u[ok], s[ok]
            z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
            take = min(z.size, n - have)
            out.append(z[:take])
            have += take
            if take < z.size:
                self._spare = z[take:]
        return np.concatenate(out)


def cholesky(S) -> np.ndarray:
    """Lower-triangular L with L @ L.T == S."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-10):
        raise ValueError("matrix is not symmetric")
    n = S.shape[0]
    L = np.zeros_like(S)
    for j in range(n):
        d = S[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise NotPositiveDefiniteError(j + 1)
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (S[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True)
class ParameterDraws:
    draws: np.ndarray  # (n_draws, dim)
    seed: int


def sample_mvn(mean, L, rng: RandomSource, n_draws: int) -> ParameterDraws:
    mean = np.asarray(mean, dtype=float)
    L = np.asarray(L, dtype=float)
    if n_draws < 1:
        raise ValueError("n_draws must be at least 1")
    if L.shape != (mean.size, mean.size):
        raise ValueError("mean and factor dimensions disagree")
    z = rng.normals(n_draws * mean.size).reshape(n_draws, mean.size)
    return ParameterDraws(draws=mean + z @ L.T, seed=rng.seed)
