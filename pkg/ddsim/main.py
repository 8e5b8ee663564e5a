"""
DDSim Main Application
Command-line entry points: run, validate and list-experiments.
"""
import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv
load_dotenv()

from ddsim import __version__
from ddsim.exceptions import ConfigError, DDSimError, NumericalGuardError, ToleranceExceededError
from ddsim.experiments.catalog import list_experiments
from ddsim.experiments.runner import create_runner, validate_config
from ddsim.utils.config_loader import load_config, resolve_output_dir


EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddsim",
        description="DDSim - dynamical decoupling simulator for unbounded environments"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run an experiment and write its CSV")
    run_parser.add_argument("config", help="TOML config file, or the name of a shipped preset")
    run_parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override a config value (repeatable)"
    )
    run_parser.add_argument(
        "--jobs", "-j",
        type=int,
        default=None,
        help="Worker threads for sweep points (default: logical processors)"
    )
    run_parser.add_argument(
        "--out", "-o",
        default=None,
        help="Output directory (overrides DDSIM_OUT and [output] dir)"
    )
    run_parser.add_argument(
        "--text", "-t",
        action="store_true",
        help="Print the run report as text"
    )

    # Validate command
    validate_parser = subparsers.add_parser("validate", help="Check a config without running it")
    validate_parser.add_argument("config", help="TOML config file, or the name of a shipped preset")
    validate_parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override a config value (repeatable)"
    )

    # List command
    subparsers.add_parser("list-experiments", help="List the named experiments")

    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Command-line interface for DDSim. Returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "run":
        return run_experiment(args)
    elif args.command == "validate":
        return run_validate(args)
    elif args.command == "list-experiments":
        return run_list(args)
    parser.print_help()
    return EXIT_ERROR


def run_experiment(args) -> int:
    """Run an experiment from CLI."""
    if args.jobs is not None and args.jobs < 1:
        print(f"Error: --jobs must be at least 1, got {args.jobs}")
        return EXIT_CONFIG

    try:
        config = load_config(args.config, args.overrides)
    except ConfigError as e:
        print(f"Config error: {e}")
        return EXIT_CONFIG

    out_dir = resolve_output_dir(config, args.out)
    print(f"Experiment: {config.name.value}")
    print(f"Output: {out_dir}")
    print("-" * 50)

    try:
        runner = create_runner(str(out_dir), args.jobs)
        report = runner.run(config)
    except ConfigError as e:
        print(f"Config error: {e}")
        return EXIT_CONFIG
    except (NumericalGuardError, ToleranceExceededError) as e:
        print(f"Run failed: {e}")
        return EXIT_NUMERICAL
    except (DDSimError, OSError) as e:
        print(f"Error: {e}")
        return EXIT_ERROR

    print(f"\nRun complete!")
    print(f"CSV: {report.csv_path} ({report.row_count} rows)")
    print(f"Report ID: {report.id}")
    if report.max_abs_dev is not None:
        print(f"Max abs deviation: {report.max_abs_dev:.3e}")
    print(f"Processing Time: {report.processing_time_seconds:.2f}s")

    if args.text:
        print("\n" + "=" * 50)
        print(runner.export_report_text(report))
    return EXIT_OK


def run_validate(args) -> int:
    """Dry-run the preconditions of a config."""
    try:
        config = load_config(args.config, args.overrides)
    except ConfigError as e:
        print(f"Config error: {e}")
        return EXIT_CONFIG

    report = validate_config(config, config_path=str(args.config))

    print(f"Experiment: {report.experiment}")
    print("-" * 50)
    for check in report.checks:
        mark = "ok" if check.passed else check.severity.value
        print(f"  [{mark}] {check.name}: {check.detail}")
    print(f"\n{len(report.violations)} violation(s), {len(report.warnings)} warning(s)")
    return EXIT_OK


def run_list(args) -> int:
    """List the named experiments."""
    experiments = list_experiments()
    print(f"Experiments ({len(experiments)})")
    print("-" * 70)
    for info in experiments:
        preset = info.preset or "-"
        print(f"  {info.name.value:24} | preset: {preset:24} | {info.description}")
        print(f"  {'':24} | columns: {', '.join(info.columns)}")
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
