"""Command-line entry point: ``latchem2d <experiment> --config FILE --out DIR``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..errors import CapacityError, ConfigError, ConvergenceError, DomainError, RegimeError
from .config import ExperimentConfig
from .runners import DEFAULTS, RUNNERS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CAPACITY = 4

log = logging.getLogger("latchem2d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latchem2d", description=__doc__)
    parser.add_argument("experiment", choices=sorted(RUNNERS))
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration entry (repeatable)")
    parser.add_argument("--out", default=None, help="output directory (default ./results/<experiment>)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1, help="worker threads for FFTs")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> ExperimentConfig:
    from .config import parse_config_text
    values = {}
    if args.config:
        values.update(ExperimentConfig.from_file(args.config, args.experiment).values)
        if args.seed is not None:
            values.pop("seed", None)
    overrides = parse_config_text("\n".join(args.set))
    clash = set(overrides) & set(values)
    values.update(overrides)
    if clash:
        log.info("command-line overrides: %s", ", ".join(sorted(clash)))
    return ExperimentConfig.from_dict(args.experiment, values, DEFAULTS[args.experiment], args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    import scipy.fft
    try:
        with scipy.fft.set_workers(max(1, args.threads)), np.errstate(over="raise", invalid="raise"):
            result = RUNNERS[args.experiment](config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConvergenceError, RegimeError, DomainError, FloatingPointError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = args.out or f"results/{args.experiment}"
    for path in result.write(out):
        log.info("wrote %s", path)
    print(f"{args.experiment}: wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
