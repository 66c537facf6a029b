"""Command-line front end.

Subcommands: run, compare, sweep, validate-config.

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 sweep finished with at least one error row.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from relayroute.io.config import ConfigError, load_config, serialize_config
from relayroute.io.report import (
    comparison_table,
    frames_table,
    run_table,
    summary_text,
    sweep_table,
    write_table,
)
from relayroute.io.topology import load_topology
from relayroute.params import SimConfig, SweepSpec
from relayroute.pipeline import compare, run
from relayroute.state import ComparisonReport
from relayroute.sweep import run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file (defaults when omitted)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key, e.g. --set frame.slots_per_frame=48 (repeatable)",
    )
    parser.add_argument("--scenario", help="3hop, 4hop or 5hop")
    parser.add_argument("--ms", type=int, help="Number of mobile stations")
    parser.add_argument("--rs", type=int, help="Number of relay stations")
    parser.add_argument("--frames", type=int, help="Number of frames")
    parser.add_argument("--seed", type=int, help="Run seed")
    parser.add_argument("--verbose", action="store_true", help="Progress on stderr")


def _outputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="CSV path (.xlsx for Excel); stdout when omitted")
    parser.add_argument("--summary", action="store_true", help="Print a savings table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relayroute",
        description="Energy-aware uplink routing in relay networks: EBCD vs Dijkstra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Simulate one routing algorithm")
    _common(p_run)
    _outputs(p_run)
    p_run.add_argument("--algo", choices=("ebcd", "dijkstra", "both"), default="ebcd")
    p_run.add_argument("--topology", help="Replay a topology YAML file")
    p_run.add_argument(
        "--per-frame", action="store_true", help="Write the per-frame series instead of the run row"
    )

    p_cmp = sub.add_parser("compare", help="EBCD vs Dijkstra on the same topology and demands")
    _common(p_cmp)
    _outputs(p_cmp)
    p_cmp.add_argument("--topology", help="Replay a topology YAML file")

    p_sweep = sub.add_parser("sweep", help="Compare over a range of station counts")
    _common(p_sweep)
    _outputs(p_sweep)
    p_sweep.add_argument("--axis", choices=("ms_count", "rs_count"), default="ms_count")
    p_sweep.add_argument("--values", required=True, help="Comma separated axis values")
    p_sweep.add_argument("--fixed", type=int, help="The other station count")
    p_sweep.add_argument("--seeds", type=int, default=1, help="Seeds per axis value")
    p_sweep.add_argument("--jobs", type=int, default=1, help="Worker processes")

    p_val = sub.add_parser("validate-config", help="Check a config without simulating")
    _common(p_val)
    return parser


def _flag_overrides(args: argparse.Namespace) -> list[str]:
    overrides = list(args.overrides)
    if args.scenario is not None:
        overrides.append(f"sim.scenario={args.scenario}")
    if args.ms is not None:
        overrides.append(f"topology.n_ms={args.ms}")
    if args.rs is not None:
        overrides.append(f"topology.n_rs={args.rs}")
    if args.frames is not None:
        overrides.append(f"sim.n_frames={args.frames}")
    if args.seed is not None:
        overrides.append(f"sim.seed={args.seed}")
    return overrides


def _sweep_spec(args: argparse.Namespace, cfg: SimConfig) -> SweepSpec:
    try:
        values = tuple(int(v) for v in args.values.split(",") if v.strip())
    except ValueError as e:
        raise ConfigError(f"'{args.values}' is not a comma separated list of integers", "--values") from e
    fixed = args.fixed
    if fixed is None:
        fixed = cfg.n_rs if args.axis == "ms_count" else cfg.n_ms
    try:
        return SweepSpec(
            axis=args.axis,
            values=values,
            fixed=fixed,
            scenario=cfg.scenario,
            seeds_per_point=args.seeds,
        )
    except ValueError as e:
        raise ConfigError(str(e), "sweep") from e


def _scenario_row(cfg: SimConfig, ebcd: float, base: float, savings: float) -> dict[str, object]:
    return {
        "scenario": cfg.scenario.label,
        "ms": cfg.n_ms,
        "rs": cfg.n_rs,
        "ebcd_mean_mj": ebcd,
        "dijkstra_mean_mj": base,
        "savings_percent": savings,
    }


def _cmd_run(args: argparse.Namespace, cfg: SimConfig) -> int:
    topology = load_topology(args.topology) if args.topology else None
    if args.algo == "both":
        return _emit_comparison(args, cfg, compare(cfg, topology, args.verbose))
    report = run(cfg, args.algo, topology, args.verbose)
    write_table(frames_table(report) if args.per_frame else run_table(report), args.out)
    return EXIT_OK


def _emit_comparison(
    args: argparse.Namespace, cfg: SimConfig, result: ComparisonReport
) -> int:
    write_table(comparison_table(result), args.out)
    if args.summary:
        row = _scenario_row(
            cfg,
            result.ebcd.mean_energy_per_frame_mj,
            result.baseline.mean_energy_per_frame_mj,
            result.savings_percent,
        )
        print(summary_text([row]))
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace, cfg: SimConfig) -> int:
    topology = load_topology(args.topology) if args.topology else None
    return _emit_comparison(args, cfg, compare(cfg, topology, args.verbose))


def _cmd_sweep(args: argparse.Namespace, cfg: SimConfig) -> int:
    spec = _sweep_spec(args, cfg)
    result = run_sweep(spec, cfg, jobs=max(1, args.jobs), verbose=args.verbose)
    write_table(sweep_table(result), args.out)
    if args.summary:
        rows = [
            {
                "scenario": spec.scenario.label,
                spec.axis: r.axis_value,
                "ebcd_mean_mj": r.ebcd_mean_mj,
                "dijkstra_mean_mj": r.dijkstra_mean_mj,
                "savings_percent": r.savings_percent,
            }
            for r in result.rows
            if r.seed == "mean"
        ]
        print(summary_text(rows))
    for row in result.errors:
        print(f"[Sweep] {spec.axis}={row.axis_value} seed={row.seed} failed: {row.error}", file=sys.stderr)
    return EXIT_PARTIAL if result.partial else EXIT_OK


def _cmd_validate(args: argparse.Namespace, cfg: SimConfig) -> int:
    sys.stdout.write(serialize_config(cfg))
    print("[Config] OK", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "validate-config": _cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _flag_overrides(args))
        if args.command == "sweep":
            _sweep_spec(args, cfg)
    except ConfigError as e:
        print(f"[Config] {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"[Config] cannot read config: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        print(f"[Config] {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as e:
        print(f"[Simulator] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
