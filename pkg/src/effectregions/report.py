"""JSON and CSV renderings of fit, interval and region results."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .measures import MEASURES
from .mle import FitResult
from .regions import PLANES, Ellipse, IntervalReport, RegionPolyline

TOOL = "effectregions"


def provenance(formula: str, seed: int | None = None, draws: int | None = None, **extra) -> dict:
    meta = {"tool": TOOL, "version": __version__, "formula": formula}
    if seed is not None:
        meta["seed"] = seed
    if draws is not None:
        meta["draws"] = draws
    meta.update(extra)
    return meta


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def fit_json(fit: FitResult, meta: dict) -> dict:
    return {**meta, "fit": fit.to_dict()}


def fit_csv(fit: FitResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["parameter", "estimate", *(f"cov[{n}]" for n in fit.names)])
    for i, name in enumerate(fit.names):
        w.writerow([name, repr(float(fit.pi_hat[i])), *(repr(float(v)) for v in fit.covariance[i])])
    return out.getvalue()


def intervals_json(rep: IntervalReport, meta: dict) -> dict:
    return {**meta, "levels": list(rep.levels), "measures": rep.to_dict()}


def intervals_csv(rep: IntervalReport) -> str:
    """Grid shaped like the usual table: estimate, then lower bounds widest-first, then upper bounds."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    lows = [f"lower_{lv * 100:g}" for lv in sorted(rep.levels, reverse=True)]
    highs = [f"upper_{lv * 100:g}" for lv in sorted(rep.levels)]
    w.writerow(["measure", "estimate", *lows, *highs])
    for m in MEASURES:
        lo = [rep.bounds[m][lv][0] for lv in sorted(rep.levels, reverse=True)]
        hi = [rep.bounds[m][lv][1] for lv in sorted(rep.levels)]
        w.writerow([m, repr(float(getattr(rep.point, m))), *(repr(float(v)) for v in lo + hi)])
    return out.getvalue()


def region_json(
    plane: str,
    polys: list[RegionPolyline],
    point: tuple[float, float],
    ellipses: list[Ellipse],
    ml_log_point: tuple[float, float],
    meta: dict,
) -> dict:
    return {
        **meta,
        "plane": plane,
        "axes": list(PLANES[plane]),
        "point_estimate": [float(point[0]), float(point[1])],
        "log_odds_ellipse": {
            "center": [float(v) for v in ellipses[0].center],
            "covariance": [[float(v) for v in r] for r in ellipses[0].covariance],
            "ml_point": [float(v) for v in ml_log_point],
            "radius_sq": {f"{e.level:g}": e.radius_sq for e in ellipses},
        },
        "regions": [
            {"level": p.level, "points": [[float(a), float(b)] for a, b in p.points]} for p in polys
        ],
    }


def region_csv(polys: list[RegionPolyline]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    a, b = PLANES[polys[0].plane]
    w.writerow(["level", "index", a, b])
    for p in polys:
        for i, (x, y) in enumerate(p.points):
            w.writerow([f"{p.level:g}", i, repr(float(x)), repr(float(y))])
    return out.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
