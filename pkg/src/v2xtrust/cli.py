"""Command line entry point: ``python -m v2xtrust {run,sweep,report}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config
from .outputs import default_output_dir, format_report, read_results, write_run, write_sweep
from .simulation import run_scenario
from .sweep import SWEEPABLE, sweep


def _base_config(path) -> ScenarioConfig:
    return load_config(path) if path else ScenarioConfig()


def _values(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def cmd_run(args) -> int:
    config = _base_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    if args.trajectory:
        config = config.replace(record_trajectory=True)
    report = run_scenario(config)
    out = write_run(report, config, args.out or default_output_dir())
    print(format_report(read_results(out)))
    print(f"wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    config = _base_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    table = sweep(args.param, _values(args.values), config, args.reps, workers=args.workers)
    out = write_sweep(table, args.out or default_output_dir() / f"sweep_{args.param}")
    print(format_report({"sweep": table.to_dict()}))
    print(f"wrote {out}")
    return 0


def cmd_report(args) -> int:
    print(format_report(read_results(args.input)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="v2xtrust", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its outputs")
    run.add_argument("--config", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--trajectory", action="store_true", help="also dump trajectory.csv")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="seed-replicated sweep of one parameter")
    sw.add_argument("--param", required=True, choices=SWEEPABLE)
    sw.add_argument("--values", required=True, help="comma or space separated")
    sw.add_argument("--reps", type=int, default=20)
    sw.add_argument("--config", type=Path)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out", type=Path)
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    rep = sub.add_parser("report", help="summarise a run or sweep directory")
    rep.add_argument("--in", dest="input", type=Path, required=True)
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
