"""Nonparametric case-resampling bootstrap, kept as an independent check.

Resampling N individuals with replacement from the expanded data is the same
as drawing multinomial counts over the individual types (stratum, z, y), so
that is how resamples are generated. Each resample recomputes the stratum
weights, refits, and records the measures at the refitted estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CellCount, GroupedDataset, covariate_distribution
from .design import ModelFormula, build_design
from .errors import FitError, OracleUnusableError
from .measures import MEASURES, MeasureSet, point_measures
from .mle import fit_logistic


@dataclass(frozen=True)
class BootstrapDraws:
    rows: list[MeasureSet]
    n_boot: int
    seed: int
    failures: int

    def column(self, measure: str) -> np.ndarray:
        return np.array([getattr(r, measure) for r in self.rows])


def expand(ds: GroupedDataset) -> list[tuple[tuple[int, ...], int, int]]:
    """One (stratum, z, y) tuple per individual."""
    people = []
    for c in ds.cells:
        people += [(c.stratum, c.z, 1)] * c.events
        people += [(c.stratum, c.z, 0)] * (c.trials - c.events)
    return people


def regroup(people, covariates) -> GroupedDataset:
    acc: dict[tuple, list[int]] = {}
    for x, z, y in people:
        a = acc.setdefault((tuple(x), z), [0, 0])
        a[0] += y
        a[1] += 1
    cells = tuple(
        CellCount(stratum=x, z=z, events=e, trials=n)
        for (x, z), (e, n) in sorted(acc.items(), key=lambda kv: (kv[0][0], -kv[0][1]))
    )
    return GroupedDataset(cells=cells, covariates=tuple(covariates))


def _types(ds: GroupedDataset):
    types, counts = [], []
    for c in ds.cells:
        for y, k in ((1, c.events), (0, c.trials - c.events)):
            if k:
                types.append((c.stratum, c.z, y))
                counts.append(k)
    return types, np.array(counts, dtype=float)


def bootstrap_measures(ds: GroupedDataset, f: ModelFormula, n_boot: int, seed: int) -> BootstrapDraws:
    # fails loudly if the original data cannot be fitted
    fit_logistic(build_design(ds, f))
    types, counts = _types(ds)
    n = int(counts.sum())
    probs = counts / counts.sum()
    rng = np.random.default_rng(seed)
    rows: list[MeasureSet] = []
    failures = 0
    for _ in range(n_boot):
        k = rng.multinomial(n, probs)
        acc: dict[tuple, list[int]] = {}
        for (x, z, y), m in zip(types, k):
            if m:
                a = acc.setdefault((x, z), [0, 0])
                a[0] += y * m
                a[1] += m
        cells = tuple(CellCount(x, z, e, t) for (x, z), (e, t) in sorted(acc.items()))
        rs = GroupedDataset(cells=cells, covariates=ds.covariates)
        try:
            fit = fit_logistic(build_design(rs, f))
        except (FitError, np.linalg.LinAlgError):
            failures += 1
            continue
        rows.append(point_measures(fit.pi_hat, covariate_distribution(rs), f))
    if failures > n_boot / 2:
        raise OracleUnusableError(f"{failures} of {n_boot} resamples could not be fitted")
    return BootstrapDraws(rows=rows, n_boot=n_boot, seed=seed, failures=failures)


def bootstrap_intervals(boot: BootstrapDraws, levels) -> dict:
    """Percentile intervals, same quantile convention as the simulation method."""
    out = {}
    for m in MEASURES:
        col = boot.column(m)
        out[m] = [
            {
                "level": lv,
                "lower": float(np.quantile(col, (1 - lv) / 2, method="linear")),
                "upper": float(np.quantile(col, 1 - (1 - lv) / 2, method="linear")),
            }
            for lv in sorted(levels)
        ]
    return out
