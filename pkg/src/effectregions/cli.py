"""Confidence regions for baseline and treatment effect from grouped binary data.

    effectregions fit --formula "z + x1 + x2 + x3 + x4 + z:x2 + z:x3"
    effectregions region --draws 10000 --seed 1 --measure rd --out results/
    effectregions intervals --draws 10000 --seed 1

Without ``--data`` the bundled H. pylori table is used, with its reference
model formula as the default.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import HPYLORI_FORMULA, __version__
from . import report
from .dataset import GroupedDataset, covariate_distribution, load_hpylori, read_dataset
from .design import build_design, format_formula, main_effects_formula, parse_formula
from .errors import (
    DatasetError,
    DegenerateRegionError,
    DomainError,
    FitError,
    FormulaError,
    NotPositiveDefiniteError,
    OracleUnusableError,
)
from .measures import point_measures
from .mle import DISPERSIONS, fit_logistic
from .oracle import bootstrap_intervals, bootstrap_measures
from .regions import PLANES, ellipse_boundary, log_odds_ellipse, map_region, quantile_intervals, simulate_measures
from .svgplot import scatter_with_regions

EXIT_PARSE = 2
EXIT_FIT = 3
EXIT_REGION = 4

DEFAULT_DRAWS = 1000
DEFAULT_SEED = 20140101
DEFAULT_LEVELS = (0.5, 0.95)
PLANE_ORDER = ("or", "rd", "rr", "af", "log-or")

FIGURE_TITLES = {
    "or": "(O0, OR): simulated ML estimates and confidence regions",
    "rd": "(R0, RD): simulated ML estimates and confidence regions",
    "rr": "(R0, RR): simulated ML estimates and confidence regions",
    "af": "(R0, AF): simulated ML estimates and confidence regions",
    "log-or": "(log O0, log OR): simulated ML estimates and confidence ellipses",
}


@dataclass
class RunConfig:
    data: str | None = None
    formula: str | None = None
    draws: int = DEFAULT_DRAWS
    seed: int = DEFAULT_SEED
    levels: tuple[float, ...] = DEFAULT_LEVELS
    measures: tuple[str, ...] = PLANE_ORDER
    out: Path = Path(".")
    formats: tuple[str, ...] = ("json", "csv")
    dispersion: str = "deviance"
    points: int = 256


def _load(cfg: RunConfig) -> tuple[GroupedDataset, str]:
    if cfg.data is None:
        ds = load_hpylori()
        formula = cfg.formula or HPYLORI_FORMULA
    else:
        try:
            ds = read_dataset(cfg.data)
        except OSError as exc:
            raise DatasetError(f"cannot read data file {cfg.data}: {exc.strerror or exc}") from None
        formula = cfg.formula or main_effects_formula(ds.covariates)
    return ds, formula


def _check_levels(levels) -> None:
    for lv in levels:
        if not 0.0 < lv < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {lv}")


def _meta(cfg: RunConfig, formula: str, **kw) -> dict:
    return report.provenance(
        formula,
        data=cfg.data if cfg.data is not None else "bundled:hpylori",
        dispersion=cfg.dispersion,
        **kw,
    )


def _fit(cfg: RunConfig):
    ds, text = _load(cfg)
    f = parse_formula(text, ds.covariates)
    fit = fit_logistic(build_design(ds, f), dispersion=cfg.dispersion)
    return ds, f, fit


def run_fit(cfg: RunConfig) -> dict[str, str]:
    """Fit report files keyed by file name."""
    ds, f, fit = _fit(cfg)
    meta = _meta(cfg, format_formula(f), n_cells=len(ds), n_total=ds.n_total)
    files = {}
    if "json" in cfg.formats:
        files["fit.json"] = report.dumps(report.fit_json(fit, meta))
    if "csv" in cfg.formats:
        files["fit.csv"] = report.fit_csv(fit)
    return files


def _simulate(cfg: RunConfig):
    if cfg.draws < 100:
        raise DomainError("--draws must be at least 100")
    _check_levels(cfg.levels)
    ds, f, fit = _fit(cfg)
    weights = covariate_distribution(ds)
    point = point_measures(fit.pi_hat, weights, f)
    draws = simulate_measures(fit, weights, f, cfg.draws, cfg.seed)
    rep = quantile_intervals(draws, cfg.levels, point)
    meta = _meta(cfg, format_formula(f), seed=cfg.seed, draws=cfg.draws)
    return f, fit, point, draws, rep, meta


def _interval_files(rep, meta, cfg: RunConfig) -> dict[str, str]:
    files = {}
    if "json" in cfg.formats:
        files["intervals.json"] = report.dumps(report.intervals_json(rep, meta))
    if "csv" in cfg.formats:
        files["intervals.csv"] = report.intervals_csv(rep)
    return files


def run_intervals(cfg: RunConfig) -> dict[str, str]:
    *_, rep, meta = _simulate(cfg)
    return _interval_files(rep, meta, cfg)


def run_region(cfg: RunConfig) -> dict[str, str]:
    f, fit, point, draws, rep, meta = _simulate(cfg)
    files = _interval_files(rep, meta, cfg)
    ellipses = [log_odds_ellipse(draws, lv) for lv in sorted(cfg.levels)]
    base = [ellipse_boundary(e, cfg.points) for e in ellipses]
    ml_log = (float(np.log(point.o0)), float(np.log(point.or_)))
    cols = dict(draws.columns)
    cols["log_o0"] = np.log(cols["o0"])
    cols["log_or"] = np.log(cols["or_"])
    pt = point.as_dict()
    pt["log_o0"], pt["log_or"] = ml_log

    for plane in PLANE_ORDER:
        if plane not in cfg.measures:
            continue
        polys = [map_region(p, plane) for p in base]
        a, b = PLANES[plane]
        ppoint = (pt[a], pt[b])
        stem = f"region_{plane}"
        if "json" in cfg.formats:
            files[f"{stem}.json"] = report.dumps(report.region_json(plane, polys, ppoint, ellipses, ml_log, meta))
        if "csv" in cfg.formats:
            files[f"{stem}.csv"] = report.region_csv(polys)
        if "svg" in cfg.formats:
            files[f"{stem}.svg"] = scatter_with_regions(
                cols[a], cols[b], [(p.level, p.points) for p in polys], ppoint, (a, b), FIGURE_TITLES[plane]
            )
    return files


def run_bootstrap(cfg: RunConfig) -> dict[str, str]:
    _check_levels(cfg.levels)
    ds, text = _load(cfg)
    f = parse_formula(text, ds.covariates)
    boot = bootstrap_measures(ds, f, cfg.draws, cfg.seed)
    meta = _meta(cfg, format_formula(f), seed=cfg.seed, draws=cfg.draws, failures=boot.failures)
    return {"bootstrap.json": report.dumps({**meta, "measures": bootstrap_intervals(boot, cfg.levels)})}


def _print_fit(files: dict[str, str]) -> None:
    fit = json.loads(files["fit.json"])["fit"] if "fit.json" in files else None
    if fit is None:
        return
    print(f"{'parameter':<14}{'estimate':>10}{'std.err':>10}")
    for i, name in enumerate(fit["parameters"]):
        print(f"{name:<14}{fit['estimates'][i]:>10.4f}{fit['covariance'][i][i] ** 0.5:>10.4f}")
    print(f"log-likelihood {fit['log_likelihood']:.4f}, dispersion {fit['dispersion']:.4f} ({fit['dispersion_method']})")


def _print_intervals(files: dict[str, str]) -> None:
    if "intervals.csv" in files:
        for line in files["intervals.csv"].splitlines():
            cells = line.split(",")
            head, rest = cells[0], cells[1:]
            try:
                print(f"{head:<8}" + "".join(f"{float(c):>10.3f}" for c in rest))
            except ValueError:
                print(f"{head:<8}" + "".join(f"{c:>10}" for c in rest))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="grouped CSV (x1..xk,z,events,trials); default: bundled table")
    common.add_argument("--formula", help='model terms, e.g. "z + x1 + x2 + z:x2"')
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument(
        "--format", action="append", choices=("json", "csv", "svg"), dest="formats", help="repeatable"
    )
    common.add_argument(
        "--dispersion",
        choices=DISPERSIONS,
        default="deviance",
        help="scale the ML covariance by deviance/df or Pearson/df (default: deviance)",
    )

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--draws", type=int, default=DEFAULT_DRAWS)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--level", type=float, action="append", dest="levels", help="repeatable; default 0.5 and 0.95")

    parser = argparse.ArgumentParser(prog="effectregions", description=__doc__.split("\n")[0] or None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{fit,region,intervals}")
    sub.add_parser("fit", parents=[common], help="ML estimates and covariance")
    r = sub.add_parser("region", parents=[common, sim], help="confidence regions, intervals and figures")
    r.add_argument(
        "--measure", action="append", choices=PLANE_ORDER, dest="measures", help="plane(s) to emit; repeatable"
    )
    r.add_argument("--points", type=int, default=256, help="boundary points per region")
    sub.add_parser("intervals", parents=[common, sim], help="quantile confidence intervals")
    sub.add_parser("bootstrap-oracle", parents=[common, sim])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    default_formats = {"fit": ("json", "csv"), "intervals": ("json", "csv"), "region": ("json", "csv", "svg")}
    formats = tuple(args.formats) if args.formats else default_formats.get(args.command, ("json",))
    return RunConfig(
        data=args.data,
        formula=args.formula,
        draws=getattr(args, "draws", DEFAULT_DRAWS),
        seed=getattr(args, "seed", DEFAULT_SEED),
        levels=tuple(getattr(args, "levels", None) or DEFAULT_LEVELS),
        measures=tuple(getattr(args, "measures", None) or PLANE_ORDER),
        out=args.out,
        formats=formats,
        dispersion=args.dispersion,
        points=getattr(args, "points", 256),
    )


COMMANDS = {"fit": run_fit, "region": run_region, "intervals": run_intervals, "bootstrap-oracle": run_bootstrap}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        files = COMMANDS[args.command](cfg)
    except (DatasetError, FormulaError, DomainError) as exc:
        print(f"effectregions: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FitError, NotPositiveDefiniteError, OracleUnusableError) as exc:
        print(f"effectregions: fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except DegenerateRegionError as exc:
        print(f"effectregions: degenerate region: {exc}", file=sys.stderr)
        return EXIT_REGION

    for name, text in files.items():
        report.write_atomic(cfg.out / name, text)
    if args.command == "fit":
        _print_fit(files)
    elif args.command in ("region", "intervals"):
        _print_intervals(files)
    print(f"wrote {len(files)} file(s) to {cfg.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
