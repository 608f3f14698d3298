"""Command-line front end.

Every command writes a CSV report (stdout by default) and, with ``--svg``, a
figure.  Exit status: 0 success, 1 a checked bound failed, 2 bad input or a
degenerate function/curve.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .census import (
    Check,
    bose_tally,
    clean_flex_census,
    operator_sign_change_check,
    random_antiperiodic,
    random_fourier,
)
from .chebyshev import SpaceDescriptor
from .curves import SupportCurve, conic_contact, sextactic_scan, vertex_scan
from .errors import CleanFlexError, ParseError
from .funcmodel import CATALOG_NAMES, DEFAULT_GRID, FourierFunction, GridProfile, catalog
from .osculation import flex_scan

COMMANDS = ("flexes", "census", "bose", "curve", "sextactic", "corpus")
FLEX_HEADER = ["kind", "location_start", "location_end", "multiplicity_total", "osculating_coeffs"]
SUMMARY_HEADER = ["check", "required", "observed", "pass"]
GRID_KEYS = {"samples": "base_samples", "zero_tol": "zero_tol", "contact_tol": "contact_tol",
             "support_tol": "support_tol", "gap": "gap"}


@dataclass
class RunConfig:
    command: str
    fourier: str | None = None
    catalog: str | None = None
    params: dict = field(default_factory=dict)
    antiperiodic: bool = False
    n: int = 1
    seed: int = 0
    count: int = 10
    out: str | None = None
    svg: str | None = None
    grid: dict = field(default_factory=dict)

    def grid_profile(self) -> GridProfile:
        kw = {}
        for key, value in self.grid.items():
            if key not in GRID_KEYS:
                raise ParseError(f"unknown grid setting {key!r}")
            kw[GRID_KEYS[key]] = value
        try:
            return replace(DEFAULT_GRID, **kw)
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------- parsing


def parse_fourier(text: str, antiperiodic: bool = False) -> FourierFunction:
    """``"a0,a1,b1,a2,b2,..."`` (or ``"a1,b1,..."`` for half-integer harmonics)."""
    try:
        coeffs = [float(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise ParseError(f"bad Fourier coefficient list {text!r}") from exc
    if not coeffs or not all(math.isfinite(c) for c in coeffs):
        raise ParseError(f"bad Fourier coefficient list {text!r}")
    if antiperiodic:
        if len(coeffs) % 2:
            coeffs.append(0.0)
        return FourierFunction(coeffs, "antiperiodic")
    if len(coeffs) % 2 == 0:
        coeffs.append(0.0)
    return FourierFunction(coeffs)


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"parameter {item!r} is not key=value")
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise ParseError(f"parameter {key} needs a number, got {value!r}") from exc
    return out


def build_function(cfg: RunConfig):
    if (cfg.fourier is None) == (cfg.catalog is None):
        raise ParseError("give exactly one of --fourier or --catalog")
    if cfg.fourier is not None:
        return parse_fourier(cfg.fourier, cfg.antiperiodic)
    if cfg.catalog not in CATALOG_NAMES:
        raise ParseError(f"unknown catalog entry {cfg.catalog!r}; choose from {', '.join(CATALOG_NAMES)}")
    return catalog(cfg.catalog, cfg.n, **cfg.params)


# ---------------------------------------------------------------- output


def fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".12g")


def fmt_angle(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, ".12g")


def fmt_coeffs(values) -> str:
    return ";".join(format(0.0 if v == 0 else float(v), ".12g") for v in values)


@dataclass
class Report:
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)

    def add_row(self, kind, arc, total, coeffs):
        self.rows.append([kind, fmt_angle(arc.start), fmt_angle(arc.end),
                          "" if total is None else fmt(total), coeffs])

    def add_check(self, name: str, check: Check):
        self.summary.append([name, fmt(check.required), fmt(check.observed), fmt(check.passed)])

    def add_value(self, name: str, value):
        self.summary.append([name, "", fmt(value), ""])

    @property
    def passed(self) -> bool:
        return all(row[3] != "false" for row in self.summary)


def emit_csv(report: Report, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FLEX_HEADER)
    w.writerows(report.rows)
    w.writerow(SUMMARY_HEADER)
    w.writerows(report.summary)
    text = buf.getvalue()
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    return text


def emit_svg(kind: str, obj, records, path, title: str = ""):
    from . import plotting

    if kind == "function":
        return plotting.plot_function(obj, records, path, title)
    if kind == "vertices":
        return plotting.plot_vertices(obj, records, path, title)
    return plotting.plot_conics(obj, records, path, title)


# ---------------------------------------------------------------- commands


def _flex_rows(report: Report, records):
    for rec in records:
        total = rec.contact.total if rec.contact.entries else None
        report.add_row(rec.kind, rec.location, total, fmt_coeffs(rec.osculating.coeffs))


def run_flexes(cfg: RunConfig, grid: GridProfile) -> Report:
    u = build_function(cfg)
    report = Report()
    if u.parity == "antiperiodic":
        space = SpaceDescriptor(2 * cfg.n)
        arcs = flex_scan(u, space, grid)
        for arc in arcs:
            report.add_row("flex", arc, None, "")
        count, _ = operator_sign_change_check(u, space, grid)
        report.add_check("thmA.8", Check(space.order + 1, len(arcs)))
        report.add_check("thmA.4", Check(space.order + 1, count))
        if cfg.svg:
            emit_svg("function", u, [], cfg.svg, u.describe())
        return report
    census = clean_flex_census(u, cfg.n, grid)
    _flex_rows(report, census.records)
    space = SpaceDescriptor.trig(cfg.n)
    report.add_check("thmA.8", Check(space.order + 1, len(census.records)))
    if cfg.svg:
        emit_svg("function", u, census.records, cfg.svg, u.describe())
    return report


def _census_block(report: Report, census, prefix: str = ""):
    for name, check in census.theorem_checks.items():
        report.add_check(prefix + name, check)


def run_census(cfg: RunConfig, grid: GridProfile) -> Report:
    u = build_function(cfg)
    if u.parity != "periodic":
        raise ParseError("census needs a periodic function")
    census = clean_flex_census(u, cfg.n, grid)
    report = Report()
    _flex_rows(report, census.records)
    _census_block(report, census)
    if cfg.svg:
        emit_svg("function", u, census.records, cfg.svg, u.describe())
    return report


def run_bose(cfg: RunConfig, grid: GridProfile) -> Report:
    u = build_function(cfg)
    if u.parity != "periodic":
        raise ParseError("the Bose tally needs a periodic function")
    tally = bose_tally(u, grid)
    census = clean_flex_census(u, 1, grid)
    report = Report()
    _flex_rows(report, [r for r in census.records if r.kind == "clean-min"])
    report.add_value("bose.s", tally.s_count)
    report.add_value("bose.t", tally.t_count)
    report.add_check("bose.difference", Check(2, tally.difference))
    if cfg.svg:
        emit_svg("function", u, census.records, cfg.svg, u.describe())
    return report


def run_curve(cfg: RunConfig, grid: GridProfile) -> Report:
    curve = SupportCurve(build_function(cfg), grid=grid)
    try:
        records = vertex_scan(curve)
    except CleanFlexError:
        if cfg.svg:
            emit_svg("vertices", curve, [], cfg.svg, curve.h.describe())
        raise
    report = Report()
    for rec in records:
        total = rec.flex.contact.total if rec.flex.contact.entries else None
        report.add_row(rec.kind, rec.location, total,
                       fmt_coeffs([rec.center[0], rec.center[1], rec.radius]))
    inscribed = sum(1 for r in records if r.kind == "clean-max")
    circumscribed = sum(1 for r in records if r.kind == "clean-min")
    report.add_check("vertices", Check(4, len(records)))
    report.add_check("inscribed_clean", Check(2, inscribed))
    report.add_check("circumscribed_clean", Check(2, circumscribed))
    if cfg.svg:
        emit_svg("vertices", curve, records, cfg.svg, curve.h.describe())
    return report


def run_sextactic(cfg: RunConfig, grid: GridProfile) -> Report:
    curve = SupportCurve(build_function(cfg), grid=grid)
    records = sextactic_scan(curve, grid)
    report = Report()
    for rec in records:
        total = None
        if rec.kind != "plain":
            total = conic_contact(curve, rec.conic, grid, points=(rec.location.start,)).total
        report.add_row(rec.kind, rec.location, total, fmt_coeffs(rec.conic.coeffs))
    report.add_check("thm5.3.max", Check(3, sum(1 for r in records if r.kind == "clean-max")))
    report.add_check("thm5.3.min", Check(3, sum(1 for r in records if r.kind == "clean-min")))
    report.add_check("sextactic_total", Check(6, len(records)))
    if cfg.svg:
        emit_svg("conics", curve, records, cfg.svg, curve.h.describe())
    return report


def run_corpus(cfg: RunConfig, grid: GridProfile) -> Report:
    """Random functions from ``--seed``; one summary block per function index."""
    rng = np.random.default_rng(cfg.seed)
    report = Report()
    for i in range(cfg.count):
        if cfg.antiperiodic:
            space = SpaceDescriptor(2 * cfg.n)
            u = random_antiperiodic(rng, space.order, grid=grid)
            arcs = flex_scan(u, space, grid)
            count, _ = operator_sign_change_check(u, space, grid)
            report.add_check(f"{i}:thmA.8", Check(space.order + 1, len(arcs)))
            report.add_check(f"{i}:thmA.4", Check(space.order + 1, count))
        else:
            u = random_fourier(rng, cfg.n, grid=grid)
            _census_block(report, clean_flex_census(u, cfg.n, grid), f"{i}:")
    return report


RUNNERS = {
    "flexes": run_flexes,
    "census": run_census,
    "bose": run_bose,
    "curve": run_curve,
    "sextactic": run_sextactic,
    "corpus": run_corpus,
}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg``; returns the exit status."""
    stdout = stdout or sys.stdout
    if cfg.command not in RUNNERS:
        raise ParseError(f"unknown command {cfg.command!r}")
    report = RUNNERS[cfg.command](cfg, cfg.grid_profile())
    text = emit_csv(report, cfg.out)
    if cfg.out is None:
        stdout.write(text)
    return 0 if report.passed else 1


# ---------------------------------------------------------------- argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cleanflex",
        description="Clean flexes of periodic functions, vertices and sextactic points of convex curves.")
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_argument_group("function or support function")
    src.add_argument("--fourier", help="coefficients a0,a1,b1,a2,b2,... (a1,b1,... with --antiperiodic)")
    src.add_argument("--catalog", help=f"named function: {', '.join(CATALOG_NAMES)}")
    src.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="catalog parameter, repeatable (e.g. eps=0.05)")
    src.add_argument("--antiperiodic", action="store_true", default=None,
                     help="half-integer harmonics; flexes use the even-order space of order 2n")
    parser.add_argument("--n", type=int, help="degree of the osculating polynomials (default 1)")
    parser.add_argument("--seed", type=int, help="corpus seed (default 0)")
    parser.add_argument("--count", type=int, help="corpus size (default 10)")
    parser.add_argument("--out", help="CSV path (default: stdout)")
    parser.add_argument("--svg", help="write a figure to this path")
    parser.add_argument("--config", help="JSON file with any of the above; flags win")
    grid = parser.add_argument_group("grid overrides")
    grid.add_argument("--samples", type=int, help="base grid size (default 4096)")
    grid.add_argument("--zero-tol", type=float)
    grid.add_argument("--contact-tol", type=float)
    grid.add_argument("--support-tol", type=float)
    grid.add_argument("--gap", type=float, help="merge gap in radians")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ParseError(f"unknown config keys: {', '.join(sorted(unknown))}")
    data["command"] = args.command
    for key in ("fourier", "catalog", "antiperiodic", "n", "seed", "count", "out", "svg"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.param:
        data["params"] = {**data.get("params", {}), **parse_params(args.param)}
    grid = dict(data.get("grid", {}))
    for key in GRID_KEYS:
        value = getattr(args, key)
        if value is not None:
            grid[key] = value
    data["grid"] = grid
    if args.fourier is not None:
        data.pop("catalog", None)
    elif args.catalog is not None:
        data.pop("fourier", None)
    try:
        cfg = RunConfig(**data)
        cfg.n = int(cfg.n)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad configuration: {exc}") from exc
    if cfg.n < 1:
        raise ParseError("--n must be at least 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(config_from_args(args))
    except (CleanFlexError, KeyError, ValueError) as exc:
        print(f"cleanflex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
