"""Command line: ``resosplit {simulate,verify,sweep,bounds} CONFIG``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..resonance import bound_constants
from .checks import verify_suite
from .config import DEFAULT_TOLERANCES, ConfigError, ExperimentConfig, load_config
from .io import emit_csv, emit_json, emit_table
from .runner import CONVENTIONS, assembled_constants, classify_step, run_experiment, run_sweep


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    if name not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name}: {value!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path, help="TOML experiment file")
    common.add_argument("--out-dir", type=Path, default=None, help="directory for CSV/JSON outputs")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="NAME=VALUE",
                        help="override a named tolerance (repeatable)")

    p = argparse.ArgumentParser(prog="resosplit", description="Resonant split-step experiments and checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one trajectory, write CSV and JSON")
    v = sub.add_parser("verify", parents=[common], help="run the verification suite; exit 1 on any failure")
    v.add_argument("--skip-acceptance", action="store_true", help="only the invariant and per-run checks")
    s = sub.add_parser("sweep", parents=[common], help="run the [sweep] grid of experiments")
    s.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sub.add_parser("bounds", parents=[common], help="print bound constants and assembled theorem constants")
    return p


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.tolerance:
        changes["tolerances"] = {**config.tolerances, **dict(args.tolerance)}
    return config.replace(**changes) if changes else config


def _out_path(args, config: ExperimentConfig, key: str, default: str) -> Path | None:
    name = config.outputs.get(key, default)
    if args.out_dir is None:
        return None if key not in config.outputs else Path(name)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    return args.out_dir / name


def cmd_simulate(args) -> int:
    config = _load(args)
    traj, summary = run_experiment(config)
    csv_path = _out_path(args, config, "csv", "trajectory.csv")
    json_path = _out_path(args, config, "json", "summary.json")
    if csv_path is not None:
        emit_csv(traj.records, csv_path)
    if json_path is not None:
        emit_json(summary, json_path)
    last = traj.records[-1]
    print(f"{summary['classification']} step, tau*K^2 = {summary['cfl_number']:.17g} "
          f"({summary['cfl_number_over_pi']:.6g} pi)")
    print(f"n={last.n} t={last.t:.6g} l2={last.l2:.17g} h1={last.h1:.6g} energy={last.energy_HK:.6g}")
    print(f"l2 relative variation {summary['l2_relative_variation']:.3g}, "
          f"h1 max ratio {summary['h1_max_ratio']}, drift claimed: {summary['drift_claimed']}")
    for p in (csv_path, json_path):
        if p is not None:
            print(f"wrote {p}")
    return 0


def cmd_verify(args) -> int:
    config = _load(args)
    report = verify_suite(config, acceptance=not args.skip_acceptance)
    print(report.render())
    json_path = _out_path(args, config, "report", "report.json")
    if json_path is not None:
        emit_json(report.as_dict(), json_path)
        print(f"wrote {json_path}")
    return report.exit_status


def cmd_sweep(args) -> int:
    config = _load(args)
    rows = run_sweep(config, workers=args.workers)
    cols = ("K", "p", "q", "power", "cfl_number", "classification", "horizon_steps", "h1_max_ratio", "drift_slope")
    print("  ".join(f"{c:>14s}" for c in cols))
    for r in rows:
        print("  ".join(f"{_fmt(r[c]):>14s}" for c in cols))
    path = _out_path(args, config, "sweep", "sweep.csv")
    if path is not None:
        emit_table(rows, path)
        print(f"wrote {path}")
    return 0


def cmd_bounds(args) -> int:
    config = _load(args)
    step, U0, model = config.time_step(), config.initial_state(), config.model()
    constants = bound_constants(model, U0, step)
    out = {
        "classification": classify_step(step, config.grid()),
        "cfl_number": float(step) * config.K**2,
        "bound_constants": constants.as_dict(),
        "assembled_constants": assembled_constants(step, constants),
        "conventions": dict(CONVENTIONS),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    path = _out_path(args, config, "bounds", "bounds.json")
    if path is not None:
        emit_json(out, path)
    return 0


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "sweep": cmd_sweep, "bounds": cmd_bounds}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
