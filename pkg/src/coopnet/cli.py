"""``coopnet <experiment> --config <path> ...`` entry point.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 too many
failed Monte Carlo realizations.
"""

import argparse
import sys

from .config import Experiment, load_config, with_overrides
from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    ParameterError,
    SimulationError,
    SingularityError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SIMULATION = 4


def build_parser():
    ap = argparse.ArgumentParser(
        prog="coopnet",
        description="Run a cooperative-uplink experiment and write plot-ready CSV or JSON.",
    )
    ap.add_argument("experiment", choices=[e.value for e in Experiment])
    ap.add_argument("--config", required=True, help="key = value experiment file")
    ap.add_argument("--seed", type=int, default=None, help="override master_seed")
    ap.add_argument("--out", default=None, help="output file ('-' for stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default=None)
    ap.add_argument(
        "--paper-scale",
        action="store_true",
        help="30,000 mobiles and 10,000 realizations instead of the desk-scale defaults",
    )
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for realizations")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    # imported late so --help stays fast
    from .experiments import run_experiment, write_result

    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args.config, args.experiment)
        cfg = with_overrides(cfg, args.seed, args.out, args.format, args.paper_scale)
        result = run_experiment(cfg, jobs=args.jobs)
        text = write_result(result, cfg.output_path, cfg.output_format)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"coopnet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"coopnet: simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except (NumericalError, DomainError, SingularityError, ArithmeticError) as exc:
        print(f"coopnet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.output_path in ("", "-"):
        sys.stdout.write(text)
    else:
        print(f"wrote {len(result.rows)} rows to {cfg.output_path}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
