"""Command-line front end.

Subcommands:
    run          one scenario, averaged over trials; emits a one-row CSV.
    sweep        scenario per axis value (--axis n|p|b|tau, --values list).
    convergence  per-iteration objective trajectory of a single trial.

All output is UTF-8 CSV with a header row; units are embedded in the
column names. Exit codes: 0 success, 2 configuration error, 1 numerical
failure.
"""

import argparse
import csv
import logging
import sys
from dataclasses import replace

from .exceptions import ConfigurationError, NumericalError, RisfdError
from .runner import (
    CONVERGENCE_COLUMNS,
    RUN_COLUMNS,
    SWEEP_AXES,
    SWEEP_COLUMNS,
    convergence_trace,
    run_scenario,
    sweep,
)
from .scenario import ScenarioConfig, config_from_file

logger = logging.getLogger(__name__)


def parse_case(token):
    """Split a case token into (case, tau); discrete carries ':<tau>'."""
    if token.startswith("discrete"):
        _, _, suffix = token.partition(":")
        if not suffix:
            raise ConfigurationError(
                "discrete case must specify the level count, e.g. discrete:8"
            )
        try:
            tau = int(suffix)
        except ValueError as exc:
            raise ConfigurationError(f"invalid tau in case token {token!r}") from exc
        return "discrete", tau
    if token in ("ideal", "continuous", "random"):
        return token, None
    raise ConfigurationError(f"unknown case {token!r}")


def parse_values(text, axis):
    """Parse the --values list; integer axes get integers."""
    caster = int if axis in ("n", "tau") else float
    try:
        values = [caster(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"invalid --values entry for axis {axis}") from exc
    if not values:
        raise ConfigurationError("--values must be a nonempty comma-separated list")
    return values


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_csv(rows, columns, out_path):
    stream = open(out_path, "w", newline="", encoding="utf-8") if out_path else sys.stdout
    try:
        writer = csv.writer(stream)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[col]) for col in columns])
    finally:
        if out_path:
            stream.close()


def load_config(args):
    config = config_from_file(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.case is not None:
        case, tau = parse_case(args.case)
        overrides["case"] = case
        overrides["tau"] = tau
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = replace(config, **overrides)
    return config.validated()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="risfd",
        description=(
            "Full-duplex OFDM self-interference cancellation with an in-device "
            "reflecting surface"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run one scenario and report averaged metrics"),
        ("sweep", "sweep one parameter axis and emit a CSV table"),
        ("convergence", "emit the per-iteration objective trajectory"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to a key = value scenario file")
        cmd.add_argument(
            "--case",
            help="ideal | continuous | discrete:<tau> | random (overrides config)",
        )
        cmd.add_argument("--seed", type=int, help="base seed; trial t uses seed + t")
        cmd.add_argument("--trials", type=int, help="number of channel realizations")
        cmd.add_argument("--out", help="output CSV path (default: stdout)")
        if name == "sweep":
            cmd.add_argument("--axis", required=True, choices=SWEEP_AXES)
            cmd.add_argument(
                "--values", required=True, help="comma-separated axis values"
            )
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "run":
            report = run_scenario(config)
            row = {
                "case": report.case,
                "tau": report.tau,
                "trials": report.trials,
                "mean_sic_db": report.mean_sic_db,
                "std_sic_db": report.std_sic_db,
                "mean_cfd": report.mean_cfd,
                "std_cfd": report.std_cfd,
                "mean_chd": report.mean_chd,
                "std_chd": report.std_chd,
                "gain": report.gain,
                "mean_iters": report.mean_iters,
            }
            write_csv([row], RUN_COLUMNS, args.out)
        elif args.command == "sweep":
            values = parse_values(args.values, args.axis)
            rows = sweep(config, args.axis, values)
            write_csv(rows, SWEEP_COLUMNS, args.out)
        else:
            rows = convergence_trace(config)
            write_csv(rows, CONVERGENCE_COLUMNS, args.out)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except RisfdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
