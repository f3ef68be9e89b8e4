"""Model formula mini-language and design-matrix construction.

A formula is a ``+``-separated list of terms over the dataset header::

    z + x1 + x2 + x3 + x4 + z:x2 + z:x3

The intercept is implicit. Only treatment-by-covariate interactions exist.
Parameter order is (intercept, z, covariate main effects in header order,
interactions in declaration order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import GroupedDataset, StratumKey
from .errors import FormulaError

INTERCEPT = "intercept"
TREATMENT = "treatment"
COVARIATE = "covariate"
INTERACTION = "interaction"


@dataclass(frozen=True)
class Term:
    kind: str
    index: int | None = None  # covariate position for covariate/interaction terms


@dataclass(frozen=True)
class ModelFormula:
    terms: tuple[Term, ...]
    covariates: tuple[str, ...]

    def term_names(self) -> list[str]:
        names = []
        for t in self.terms:
            if t.kind == INTERCEPT:
                names.append("(Intercept)")
            elif t.kind == TREATMENT:
                names.append("z")
            elif t.kind == COVARIATE:
                names.append(self.covariates[t.index])
            else:
                names.append(f"z:{self.covariates[t.index]}")
        return names

    def __len__(self) -> int:
        return len(self.terms)

    def row(self, z: int, x: StratumKey) -> np.ndarray:
        """Design row for a single (z, stratum) cell."""
        out = np.empty(len(self.terms))
        for j, t in enumerate(self.terms):
            if t.kind == INTERCEPT:
                out[j] = 1.0
            elif t.kind == TREATMENT:
                out[j] = z
            elif t.kind == COVARIATE:
                out[j] = x[t.index]
            else:
                out[j] = z * x[t.index]
        return out

    def rows(self, z: int, strata) -> np.ndarray:
        return np.array([self.row(z, x) for x in strata], dtype=float).reshape(-1, len(self.terms))


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    events: np.ndarray
    trials: np.ndarray
    formula: ModelFormula | None

    @property
    def names(self) -> list[str]:
        if self.formula is None:
            return [f"b{j}" for j in range(self.X.shape[1])]
        return self.formula.term_names()


def parse_formula(text: str, covariates) -> ModelFormula:
    covariates = tuple(covariates)
    lookup = {name: i for i, name in enumerate(covariates)}
    pieces = [p.strip() for p in text.split("+")]
    if any(not p for p in pieces):
        raise FormulaError(f"empty term in formula {text!r}")

    seen: set[str] = set()
    has_z = False
    mains: set[int] = set()
    inter: list[int] = []
    for p in pieces:
        if ":" in p:
            parts = [s.strip() for s in p.split(":")]
            if len(parts) != 2 or "z" not in parts or parts.count("z") != 1:
                raise FormulaError(f"only z:<covariate> interactions are supported, got {p!r}")
            name = parts[1] if parts[0] == "z" else parts[0]
            if name not in lookup:
                raise FormulaError(f"unknown covariate {name!r} in {p!r}")
            key = f"z:{name}"
        elif p == "z":
            key = "z"
        elif p in lookup:
            key = p
        else:
            raise FormulaError(f"unknown covariate {p!r}")
        if key in seen:
            raise FormulaError(f"duplicate term {key!r}")
        seen.add(key)
        if key == "z":
            has_z = True
        elif key.startswith("z:"):
            inter.append(lookup[key[2:]])
        else:
            mains.add(lookup[key])

    if not has_z:
        raise FormulaError("formula must contain the treatment term z")
    for i in inter:
        if i not in mains:
            raise FormulaError(f"interaction z:{covariates[i]} needs main effect {covariates[i]}")

    terms = [Term(INTERCEPT), Term(TREATMENT)]
    terms += [Term(COVARIATE, i) for i in sorted(mains)]
    terms += [Term(INTERACTION, i) for i in inter]
    return ModelFormula(terms=tuple(terms), covariates=covariates)


def format_formula(f: ModelFormula) -> str:
    return " + ".join(f.term_names()[1:])


def main_effects_formula(covariates) -> str:
    return " + ".join(["z", *covariates])


def build_design(ds: GroupedDataset, f: ModelFormula) -> DesignMatrix:
    if tuple(ds.covariates) != tuple(f.covariates):
        raise FormulaError("formula was parsed against a different covariate header")
    X = np.array([f.row(c.z, c.stratum) for c in ds.cells], dtype=float).reshape(-1, len(f))
    events = np.array([c.events for c in ds.cells], dtype=float)
    trials = np.array([c.trials for c in ds.cells], dtype=float)
    return DesignMatrix(X=X, events=events, trials=trials, formula=f)
