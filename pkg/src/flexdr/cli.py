"""Command-line workflow: ``flexdr <command> [--config PATH] [--seed N] [--out DIR]``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Every command computes all of its outputs before writing any of them, and
each file is written atomically.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import Mapping, Sequence

from . import offline_db
from ._io import atomic_write_text
from .config import RunConfig, load_config
from .demand_response import (
    ALL_CASES,
    TARGET_IDS,
    DispatchResult,
    FlexibleCase,
    LoadKind,
    ResponseTarget,
    make_target,
    schedule_dispatch,
)
from .demo import demo_targets, simulate_baselines
from .errors import ConfigError, FlexDRError, NotFoundError, SpecError
from .evaluation import metric_row
from .profile import LoadProfile, format_timestamp, profile_to_csv, read_profile_csv
from .scenario_gen import augment_days
from .svg import bar_chart, line_chart

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
BASELINE_FILES = {"H": "heating.csv", "R": "rotating.csv", "S": "storage.csv"}


class UsageError(FlexDRError):
    """Bad arguments or missing inputs; maps to exit code 2."""


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _write_all(out_dir: Path, files: Mapping[str, str]) -> list[Path]:
    paths = []
    for name, text in files.items():
        path = out_dir / name
        atomic_write_text(path, text)
        paths.append(path)
    return paths


def _read_input(path: str, what: str) -> LoadProfile:
    if not os.path.exists(path):
        raise UsageError(f"{what}: file not found: {path}")
    return read_profile_csv(path)


def _baselines(cfg: RunConfig) -> dict[str, LoadProfile]:
    """CSV baselines named in the config, falling back to the simulated demo park."""
    simulated = None
    out = {}
    for kind, path in cfg.input_paths().items():
        if path is not None:
            out[kind] = _read_input(path, f"{LoadKind(kind).name.lower()} baseline")
        else:
            simulated = simulated or simulate_baselines(cfg)
            out[kind] = simulated[kind]
    return out


def _targets(cfg: RunConfig, baselines: Mapping[str, LoadProfile]) -> list[ResponseTarget]:
    ref = baselines["H"]
    return demo_targets(cfg, len(ref), ref.step)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _dispatch_csv(result: DispatchResult, start) -> str:
    members = [k for k in ("H", "R", "S") if k in result.responses]
    header = ["timestamp", "demand_kw"] + [f"{m}_kw" for m in members] + ["S_charge_kw", "delivered_kw", "soc"]
    lines = [",".join(header)]
    delivered = result.delivered()
    step_min = result.step_hours * 60.0
    ref = LoadProfile.from_array(start, step_min, result.demand)
    for t, ts in enumerate(ref.timestamps()):
        row = [format_timestamp(ts), repr(result.demand[t])]
        row += [repr(result.responses[m][t]) for m in members]
        row += [repr(result.storage_charge[t]), repr(float(delivered[t])), repr(result.soc[t + 1])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _table_csv(rows: Sequence[Sequence]) -> str:
    return "\n".join(",".join(v if isinstance(v, str) else repr(float(v)) for v in r) for r in rows) + "\n"


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    baselines = simulate_baselines(cfg)
    paths = _write_all(out_dir, {BASELINE_FILES[k]: profile_to_csv(p) for k, p in baselines.items()})
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_augment(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    aug = cfg.augment
    if args.days is not None:
        aug = dataclasses.replace(aug, days_to_generate=args.days)
    if args.points is not None:
        aug = dataclasses.replace(aug, target_points_per_day=args.points)
    if args.input:
        base = _read_input(args.input, "augment input")
        stem = Path(args.input).stem
    else:
        base = _baselines(cfg)[args.load]
        stem = Path(BASELINE_FILES[args.load]).stem
    days = augment_days(base, aug)
    files = {f"{stem}_aug_{i + 1:03d}.csv": profile_to_csv(d) for i, d in enumerate(days)}
    for p in _write_all(out_dir, files):
        print(f"wrote {p}")
    print(f"{len(days)} day(s) generated at {aug.target_points_per_day} points per day")
    return EXIT_OK


def cmd_dispatch(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    try:
        case = FlexibleCase.parse(args.case)
    except SpecError as exc:
        raise UsageError(str(exc)) from None
    baselines = _baselines(cfg)
    ref = baselines["H"]
    demand = args.demand if args.demand is not None else cfg.targets[args.target].demand_kw
    target = make_target(args.target, len(ref), demand, ref.step)
    result = schedule_dispatch(case, target, baselines, cfg.dispatch_params())
    name = f"dispatch_{target.id}_{case.id}.csv"
    _write_all(out_dir, {name: _dispatch_csv(result, ref.start_time)})
    print(f"target {target.id}  case {case.id}")
    print(f"F_pre = {_fmt(result.f_pre)} kWh")
    print(f"F_act = {_fmt(result.f_act)} kWh")
    print(f"F     = {_fmt(result.f)} kWh")
    for w in result.warnings:
        print(f"warning: {w}")
    print(f"wrote {out_dir / name}")
    return EXIT_OK


def cmd_build_db(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    baselines = _baselines(cfg)
    db = offline_db.build_database(baselines, cfg.dispatch_params(), _targets(cfg, baselines), seed=cfg.seed)
    path = out_dir / "offline_db.json"
    offline_db.save(db, path)
    print(f"{len(db)} entries written to {path}")
    for row in offline_db.response_table(db, "unresponsiveness"):
        print("  ".join(f"{v:>12}" if isinstance(v, str) else f"{v:>12.1f}" for v in row))
    return EXIT_OK


def cmd_query_db(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    if not os.path.exists(args.path):
        raise UsageError(f"database not found: {args.path}")
    db = offline_db.load(args.path)
    e = offline_db.query(db, args.target, args.case)
    print(f"target {e.target}  case {e.case}")
    print(f"requested         = {_fmt(e.requested)} kWh")
    print(f"response value    = {_fmt(e.response_value)} kWh")
    print(f"unresponsiveness  = {_fmt(e.unresponsiveness)} kWh")
    print(f"constraints ok    = {e.constraints_ok}")
    for w in e.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def cmd_report(cfg: RunConfig, args: argparse.Namespace, out_dir: Path) -> int:
    rows = [["label", "rmsd", "mad", "r_square"]]
    curves: list[tuple[str, Sequence[float]]] = []
    for label, ref_path, model_path in args.pair or []:
        ref = _read_input(ref_path, f"pair {label} reference")
        model = _read_input(model_path, f"pair {label} model")
        if len(ref) != len(model):
            raise UsageError(f"pair {label}: {len(ref)} vs {len(model)} samples")
        m = metric_row(ref.values, model.values)
        rows.append([label, m["rmsd"], m["mad"], m["r_square"]])
        curves += [(f"{label} ref", ref.values), (f"{label} model", model.values)]
    for path in args.curve or []:
        curves.append((Path(path).stem, _read_input(path, "curve").values))
    files = {"metrics.csv": _table_csv(rows), "curves.svg": line_chart(curves, "Load curves")}
    if args.db:
        if not os.path.exists(args.db):
            raise UsageError(f"database not found: {args.db}")
        db = offline_db.load(args.db)
        table = offline_db.response_table(db, "unresponsiveness")
        files["db_table.csv"] = _table_csv(table)
        files["unresponsiveness.svg"] = bar_chart(
            [c.id for c in ALL_CASES], [(r[0], r[1:]) for r in table[1:]],
            "Unresponsiveness by flexible case", "kWh")
    for p in _write_all(out_dir, files):
        print(f"wrote {p}")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="key = value run config")
    parser.add_argument("--seed", type=int, metavar="N", default=default, help="override the config seed")
    parser.add_argument("--out", metavar="DIR", default=default, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexdr", description="Industrial flexible-load demand response toolkit")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _global_options(p, suppress=True)  # also accepted after the command
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate, "write simulated heating, rotating and storage baselines")

    p = add("augment", cmd_augment, "densify a daily profile and synthesize noisy days")
    p.add_argument("--input", metavar="CSV", help="profile to augment (default: a baseline)")
    p.add_argument("--load", choices=("H", "R", "S"), default="H", help="baseline used without --input")
    p.add_argument("--days", type=int, help="days to generate (default: augment.days_to_generate)")
    p.add_argument("--points", type=int, help="points per day (default: augment.target_points_per_day)")

    p = add("dispatch", cmd_dispatch, "dispatch one response target with one flexible case")
    p.add_argument("--target", required=True, choices=TARGET_IDS)
    p.add_argument("--case", required=True, help="flexible case such as H-R-S, H-S or R")
    p.add_argument("--demand", type=float, help="requested kW per window step (default: from config)")

    add("build-db", cmd_build_db, "build the offline database for all targets and cases")

    p = add("query-db", cmd_query_db, "print one database entry")
    p.add_argument("path", help="offline_db.json")
    p.add_argument("--target", required=True)
    p.add_argument("--case", required=True)

    p = add("report", cmd_report, "metric table and SVG charts")
    p.add_argument("--pair", nargs=3, action="append", metavar=("LABEL", "REF", "MODEL"),
                   help="compare a model CSV against a reference CSV (repeatable)")
    p.add_argument("--curve", action="append", metavar="CSV", help="extra curve to plot (repeatable)")
    p.add_argument("--db", metavar="PATH", help="offline database to tabulate and chart")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed,
                                      augment=dataclasses.replace(cfg.augment, noise_seed=args.seed))
        out_dir = Path(args.out if args.out is not None else cfg.out)
        return args.func(cfg, args, out_dir)
    except (UsageError, ConfigError, NotFoundError) as exc:
        print(f"flexdr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FlexDRError, OSError) as exc:
        print(f"flexdr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
