"""Command-line entry point: ``msrs-deploy {optimize,evaluate,compare}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..detection import DomainError
from ..metrics import DEFAULT_REFERENCE
from ..scenario import ConfigError, DeploymentVector, evaluate
from .config import ExperimentConfig, MODE_ALIASES, load_config
from .experiment import compare, run_experiment
from .io import dumps_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _base_config(path: str | None) -> ExperimentConfig:
    return load_config(path) if path else ExperimentConfig()


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if getattr(args, "seed", None) is not None:
        cfg.run.seed = args.seed
    if getattr(args, "algorithm", None) is not None:
        cfg.optimizer.algorithm = args.algorithm
    if getattr(args, "mode", None) is not None:
        cfg.scenario.mode = MODE_ALIASES[args.mode]
    if getattr(args, "out", None) is not None:
        cfg.run.output_dir = args.out
    if getattr(args, "snapshot_every", None) is not None:
        cfg.run.snapshot_every = args.snapshot_every
    if getattr(args, "repetitions", None) is not None:
        cfg.run.repetitions = args.repetitions
    cfg.validate()
    return cfg


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_base_config(args.config), args)
    result = run_experiment(cfg)
    print(f"wrote {len(result.runs)} run(s) to {result.output_dir}")
    return EXIT_OK


def _parse_dv(text: str) -> DeploymentVector:
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"--dv: {exc}") from None
    return DeploymentVector.from_flat(values)


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_base_config(args.config), args)
    scenario = cfg.build_scenario()
    text = Path(args.dv_file).read_text() if args.dv_file else args.dv
    if text is None:
        raise ConfigError("one of --dv or --dv-file is required")
    dv = _parse_dv(text)
    dv.validate(scenario)
    obj = evaluate(dv, scenario, scenario.rcs, cfg.build_detector())
    print(
        dumps_json(
            {
                "cr": obj.coverage_ratio,
                "lr": obj.lowest_rtsn,
                "lr_db": obj.lowest_rtsn_db,
                "cells": scenario.num_cells,
                "mode": scenario.mode.value,
            }
        ),
        end="",
    )
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    report = compare(args.result_a, args.result_b, (args.ref_cr, args.ref_lr_db))
    text = dumps_json(report)
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msrs-deploy", description="Multistatic radar deployment optimizer")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file or experiment manifest")
        p.add_argument("--mode", choices=sorted(MODE_ALIASES), help="working mode override")

    opt = sub.add_parser("optimize", help="run seeded optimization experiments")
    common(opt)
    opt.add_argument("--seed", type=int)
    opt.add_argument("--algorithm", choices=["cd", "nrcd", "random"])
    opt.add_argument("--out", help="output directory")
    opt.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    opt.add_argument("--repetitions", type=int)
    opt.set_defaults(func=cmd_optimize)

    ev = sub.add_parser("evaluate", help="objectives of one deployment vector")
    common(ev)
    ev.add_argument("--dv", help="x_1..x_J y_1..y_J rho_1..rho_J, comma or space separated")
    ev.add_argument("--dv-file", help="file holding the same flat vector")
    ev.set_defaults(func=cmd_evaluate)

    cmp_ = sub.add_parser("compare", help="compare two experiment output directories (B against A)")
    cmp_.add_argument("result_a")
    cmp_.add_argument("result_b")
    cmp_.add_argument("--ref-cr", type=float, default=DEFAULT_REFERENCE.coverage_ratio)
    cmp_.add_argument("--ref-lr-db", type=float, default=DEFAULT_REFERENCE.lowest_rtsn_db)
    cmp_.add_argument("--out", help="also write the report to this file")
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
