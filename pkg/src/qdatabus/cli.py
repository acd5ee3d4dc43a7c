"""Command line front end: qdatabus <experiment> --config cfg.json --out dir."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentError,
    load_config,
    run_experiment,
    write_result,
)
from .gaussian import UnphysicalStateError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdatabus",
        description="Entanglement transfer experiments on an oscillator-ring data bus",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="table output format (summary is always JSON)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, experiment=args.experiment,
                          seed_override=args.seed)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg)
    except (ExperimentError, UnphysicalStateError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for path in write_result(result, args.out, args.format):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
