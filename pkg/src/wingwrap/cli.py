"""``wingwrap`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Dict, List, Optional

from . import __version__
from .config import CONFIG_SCHEMA, ConfigError, ExperimentConfig, config_hash, dump_config, load_config
from .dynamics import SimulationError
from .model import SpecError, build_model
from .reports import (base_manifest, search_csv, sweep_csv, trajectory_columns, trajectory_rows,
                      trials_csv, csv_text, write_outputs)
from .trial import (DEFAULT_FRACTIONS, BracketError, Outcome, SweepReport, mass_sweep,
                    min_perch_speed, run_trial, trial_seed)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BRACKET = 3
EXIT_SIMULATION = 4

# trajectory samples every millisecond of simulated time
TRAJ_PERIOD = 1e-3


def _record_every(cfg: ExperimentConfig) -> int:
    return max(1, int(round(TRAJ_PERIOD / cfg.solver.dt)))


def _trajectory(cfg: ExperimentConfig, fractions, trial_id: int, conditions_for) -> str:
    cols, rows = None, []
    for f in fractions:
        model = build_model(cfg.vehicle.with_tip_mass(f))
        r = run_trial(model, cfg.pole, cfg.material, conditions_for(trial_id), cfg.solver,
                      record_every=_record_every(cfg))
        cols = cols or trajectory_columns(model)
        rows += trajectory_rows(model, trial_id, f, r.trajectory)
    return csv_text(cols, rows)


def cmd_trial(cfg: ExperimentConfig, args) -> Dict[str, str]:
    if args.emit_trajectory not in (None, 0):
        raise ConfigError("trial runs a single toss; --emit-trajectory must be 0")
    model = build_model(cfg.vehicle)
    record = _record_every(cfg) if args.emit_trajectory == 0 else 0
    r = run_trial(model, cfg.pole, cfg.material, cfg.plan.trial, cfg.solver, record_every=record)
    f = cfg.vehicle.tip_mass_fraction
    files = {"trials.csv": trials_csv([(0, f, r)])}
    if record:
        files["trajectory.csv"] = csv_text(trajectory_columns(model),
                                           trajectory_rows(model, 0, f, r.trajectory))
    print(f"{r.outcome.value}: impact {r.impact_speed:.3f} m/s, wraps "
          f"({r.wrap_angle_left:.3f}, {r.wrap_angle_right:.3f}) rad, {r.end_reason} "
          f"at {r.settle_time:.3f} s")
    return files


def _sweep(cfg: ExperimentConfig, fractions, args) -> (SweepReport, Dict[str, str]):
    report = mass_sweep(cfg.vehicle, cfg.pole, cfg.material, fractions, cfg.plan.distribution,
                        cfg.plan.n_trials, cfg.master_seed, cfg.solver, cfg.plan.speed_bracket,
                        cfg.plan.speed_tol)
    entries = [(i, row.tip_mass_fraction, t) for row in report.rows
               for i, t in enumerate(row.results)]
    files = {"trials.csv": trials_csv(entries), "sweep.csv": sweep_csv(report.rows)}
    if args.emit_trajectory is not None:
        tid = args.emit_trajectory
        if not 0 <= tid < cfg.plan.n_trials:
            raise ConfigError(f"--emit-trajectory {tid} is not a trial id in [0, {cfg.plan.n_trials})")
        files["trajectory.csv"] = _trajectory(
            cfg, fractions, tid,
            lambda i: cfg.plan.distribution.sample(trial_seed(cfg.master_seed, i)))
    for row in report.rows:
        ms = "n/a" if row.min_speed_nominal is None else f"{row.min_speed_nominal:.3f} m/s"
        print(f"tip mass {row.tip_mass_fraction:.4f}: success {row.successes}/{row.n_trials} "
              f"({row.success_rate:.2f}), min speed {ms} [{row.flag}]")
    return report, files


def cmd_sweep(cfg: ExperimentConfig, args) -> Dict[str, str]:
    return _sweep(cfg, cfg.fractions, args)[1]


def _direction(a: Optional[float], b: Optional[float]) -> str:
    if a is None or b is None:
        return "undetermined"
    return "increasing" if b > a else "decreasing" if b < a else "flat"


def replication_summary(report: SweepReport) -> str:
    first, last = report.rows[0], report.rows[-1]
    rate_dir = _direction(first.success_rate, last.success_rate)
    speed_dir = _direction(first.min_speed_nominal, last.min_speed_nominal)
    collide, overlap = report.pooled_split()
    wins = collide + overlap

    def speed(x):
        return "n/a" if x is None else f"{x:.2f}"

    def pct(k):
        return f"{100.0 * k / wins:.0f}%" if wins else "n/a"

    lines = [
        f"success rate {first.success_rate:.0%} -> {last.success_rate:.0%} "
        f"(tip mass {first.tip_mass_fraction:g} -> {last.tip_mass_fraction:g}): {rate_dir}; "
        f"reference experiment <20% -> 80%: increasing; "
        f"{'agrees' if rate_dir == 'increasing' else 'disagrees'}",
        f"min perch speed {speed(first.min_speed_nominal)} -> {speed(last.min_speed_nominal)} m/s: "
        f"{speed_dir}; reference experiment 2.9 -> 2.4 m/s: decreasing; "
        f"{'agrees' if speed_dir in ('decreasing', 'flat') else 'disagrees'}",
        f"successes {wins}: tip collide {collide} ({pct(collide)}), overlap {overlap} "
        f"({pct(overlap)}); reference experiment 60% / 40%",
    ]
    return "\n".join(lines) + "\n"


def cmd_replicate(cfg: ExperimentConfig, args) -> Dict[str, str]:
    report, files = _sweep(cfg, DEFAULT_FRACTIONS, args)
    summary = replication_summary(report)
    files["summary.txt"] = summary
    sys.stdout.write(summary)
    return files


def cmd_min_speed(cfg: ExperimentConfig, args) -> Dict[str, str]:
    model = build_model(cfg.vehicle)
    nominal = replace(cfg.plan.trial, lateral_offset=0.0, approach_angle=0.0)
    lo, hi = cfg.plan.speed_bracket
    s = min_perch_speed(model, cfg.pole, cfg.material, nominal, lo, hi, cfg.plan.speed_tol,
                        cfg.solver)
    print(f"min perch speed {s.speed:.4f} m/s ({s.evaluations} trials"
          f"{', non-monotone' if s.non_monotone else ''})")
    return {"search.csv": search_csv(cfg.vehicle.tip_mass_fraction, (lo, hi),
                                     cfg.plan.speed_tol, s)}


COMMANDS = {
    "trial": cmd_trial,
    "sweep": cmd_sweep,
    "min-speed": cmd_min_speed,
    "replicate-paper": cmd_replicate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wingwrap", description=(
        "Simulate a segmented-wing vehicle wrapping around a pole and run perching studies."))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML or JSON experiment config")
        sp.add_argument("--out", help="output directory (defaults to the config's output_dir)")
        sp.add_argument("--seed", type=int, help="override master_seed")
        sp.add_argument("--trials", type=int, help="override trial_plan.n_trials")
        sp.add_argument("--emit-trajectory", type=int, metavar="TRIAL_ID",
                        help="also write trajectory.csv for this trial id")
    sub.add_parser("schema", help="print the config JSON schema")
    return p


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = cfg.with_seed(args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        cfg = cfg.with_trials(args.trials)
    if not (args.out or cfg.output_dir):
        raise ConfigError("no output directory: pass --out or set output_dir")
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
        return EXIT_OK
    try:
        cfg = _load(args)
        files = COMMANDS[args.command](cfg, args)
    except (ConfigError, SpecError) as e:
        print(f"wingwrap: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except BracketError as e:
        print(f"wingwrap: speed search failed: {e}", file=sys.stderr)
        return EXIT_BRACKET
    except SimulationError as e:
        print(f"wingwrap: simulation failed: {e}", file=sys.stderr)
        return EXIT_SIMULATION
    files["config.yaml"] = dump_config(cfg)
    manifest = base_manifest(args.command, config_hash(cfg), __version__, cfg.master_seed)
    write_outputs(args.out or cfg.output_dir, files, manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
