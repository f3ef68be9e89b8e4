"""Grouped binary-outcome data: CSV ingestion and covariate-stratum weights.

The input is one row per (covariate stratum, treatment arm) with the number of
events and trials in that cell, e.g.::

    x1,x2,x3,x4,z,events,trials
    0,0,0,0,1,0,3
    0,0,0,0,0,3,4

Duplicate (stratum, z) rows are summed. Strata seen in only one arm are kept.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyDatasetError, ParseError

StratumKey = tuple[int, ...]

_TAIL = ("z", "events", "trials")


@dataclass(frozen=True)
class CellCount:
    stratum: StratumKey
    z: int
    events: int
    trials: int


@dataclass(frozen=True)
class GroupedDataset:
    cells: tuple[CellCount, ...]
    covariates: tuple[str, ...]

    @property
    def n_total(self) -> int:
        return sum(c.trials for c in self.cells)

    @property
    def strata(self) -> list[StratumKey]:
        """Observed strata in lexicographic order."""
        return sorted({c.stratum for c in self.cells})

    def __len__(self) -> int:
        return len(self.cells)


def _parse_int(field: str, what: str, lineno: int) -> int:
    try:
        return int(field.strip())
    except ValueError:
        raise ParseError(f"{what} is not an integer: {field!r}", lineno) from None


def parse_dataset(text: str) -> GroupedDataset:
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    header = None
    totals: dict[tuple[StratumKey, int], list[int]] = {}
    for row in reader:
        lineno = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if header is None:
            header = [h.strip() for h in row]
            if len(header) < 3 or tuple(header[-3:]) != _TAIL:
                raise ParseError("header must end with z,events,trials", lineno)
            names = header[:-3]
            if len(set(names)) != len(names) or any(not n for n in names):
                raise ParseError("covariate names must be unique and non-empty", lineno)
            if any(n in _TAIL for n in names):
                raise ParseError("covariate name collides with a reserved column", lineno)
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        k = len(header) - 3
        x = tuple(_parse_int(f, header[j], lineno) for j, f in enumerate(row[:k]))
        for name, v in zip(header, x):
            if v not in (0, 1):
                raise ParseError(f"covariate {name} must be 0 or 1, got {v}", lineno)
        z = _parse_int(row[k], "z", lineno)
        if z not in (0, 1):
            raise ParseError(f"z must be 0 or 1, got {z}", lineno)
        events = _parse_int(row[k + 1], "events", lineno)
        trials = _parse_int(row[k + 2], "trials", lineno)
        if trials < 1:
            raise ParseError(f"trials must be positive, got {trials}", lineno)
        if not 0 <= events <= trials:
            raise ParseError(f"events must lie in [0, trials], got {events}/{trials}", lineno)
        acc = totals.setdefault((x, z), [0, 0])
        acc[0] += events
        acc[1] += trials

    if header is None:
        raise EmptyDatasetError("no header row")
    if not totals:
        raise EmptyDatasetError("no data rows")
    cells = tuple(
        CellCount(stratum=x, z=z, events=e, trials=n)
        for (x, z), (e, n) in sorted(totals.items(), key=lambda kv: (kv[0][0], -kv[0][1]))
    )
    return GroupedDataset(cells=cells, covariates=tuple(header[:-3]))


def read_dataset(path: str | Path) -> GroupedDataset:
    return parse_dataset(Path(path).read_text(encoding="utf-8"))


def load_hpylori() -> GroupedDataset:
    """The bundled H. pylori eradication data (109 children, 4 binary covariates)."""
    text = resources.files(__package__).joinpath("data/hpylori.csv").read_text(encoding="utf-8")
    return parse_dataset(text)


def format_dataset(ds: GroupedDataset) -> str:
    """Serialize to CSV, rows sorted by stratum then z descending."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([*ds.covariates, *_TAIL])
    for c in sorted(ds.cells, key=lambda c: (c.stratum, -c.z)):
        w.writerow([*c.stratum, c.z, c.events, c.trials])
    return out.getvalue()


def covariate_distribution(ds: GroupedDataset) -> dict[StratumKey, float]:
    """Share of all trials (both arms pooled) falling in each observed stratum."""
    if not ds.cells:
        raise EmptyDatasetError("dataset has no cells")
    counts: dict[StratumKey, int] = {}
    for c in ds.cells:
        counts[c.stratum] = counts.get(c.stratum, 0) + c.trials
    n = ds.n_total
    return {x: counts[x] / n for x in sorted(counts)}
