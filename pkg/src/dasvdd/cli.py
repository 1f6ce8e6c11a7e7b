"""Command-line entry point.

Three subcommands cover the experiment lifecycle:

    dasvdd train  --config cfg.json [--seed N] [--gamma auto|X]
                  [--normal-class K] [--out DIR] [--runs R]
    dasvdd sweep  --config cfg.json --param latent_dim --values 32,256,2048
    dasvdd report --dir DIR

``train`` runs the seeded multi-run experiment described by a JSON config,
``sweep`` repeats it across values of one hyperparameter, and ``report``
tabulates every summary under a directory and renders companion figures.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .data import DataFormatError
from .experiment import (
    ExperimentError,
    SWEEPABLE_PARAMS,
    load_experiment_config,
    report,
    run_experiment,
    sweep,
)

__all__ = ["main", "build_parser"]


def _gamma_value(text: str):
    if text == "auto":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be 'auto' or a number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dasvdd",
        description="Train and evaluate a hypersphere-regularized autoencoder "
        "anomaly detector.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="run a multi-run experiment from a config")
    train_p.add_argument("--config", required=True, help="JSON experiment config")
    train_p.add_argument("--seed", type=int, help="override the master seed")
    train_p.add_argument(
        "--gamma", type=_gamma_value, help="override gamma ('auto' or a positive number)"
    )
    train_p.add_argument("--normal-class", type=int, help="override the normal class")
    train_p.add_argument("--out", help="override the output directory")
    train_p.add_argument("--runs", type=int, help="override the number of runs")

    sweep_p = sub.add_parser("sweep", help="repeat an experiment over one hyperparameter")
    sweep_p.add_argument("--config", required=True, help="JSON experiment config")
    sweep_p.add_argument("--param", required=True, choices=SWEEPABLE_PARAMS)
    sweep_p.add_argument(
        "--values", required=True, help="comma-separated values, e.g. 32,256,2048"
    )
    sweep_p.add_argument("--out", help="override the output directory")

    report_p = sub.add_parser("report", help="tabulate summaries and render figures")
    report_p.add_argument("--dir", required=True, help="directory holding experiment outputs")
    return parser


def _apply_overrides(config, args) -> None:
    if args.seed is not None:
        config.train = dataclasses.replace(config.train, seed=args.seed)
    if args.gamma is not None:
        config.train = dataclasses.replace(config.train, gamma=args.gamma)
    if args.normal_class is not None:
        config.normal_class = args.normal_class
    if args.out is not None:
        config.out_dir = args.out
    if getattr(args, "runs", None) is not None:
        config.runs = args.runs


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            config = load_experiment_config(args.config)
            _apply_overrides(config, args)
            run_experiment(config)
        elif args.command == "sweep":
            config = load_experiment_config(args.config)
            if args.out is not None:
                config.out_dir = args.out
            raw = [v for v in args.values.split(",") if v.strip()]
            if args.param == "latent_dim":
                values = [int(v) for v in raw]
            else:
                values = [float(v) for v in raw]
            sweep(config, args.param, values)
        else:
            print(report(args.dir))
    except (ExperimentError, DataFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
