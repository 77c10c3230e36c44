"""Main entrypoint for the ``two-ends`` command."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import yaml
from pydantic import ValidationError

from two_ends_kernels.cli.runner import run_experiment
from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import ExperimentKindEnum
from two_ends_kernels.exceptions import (
    DerivativeOrderError,
    ExperimentCheckError,
    InsufficientRangeError,
    InvalidModelParamsError,
    InvalidQuadratureSpecError,
    SpectralSizeError,
    UnsupportedMeshModeError,
)
from two_ends_kernels.schemas.experiment_schemas import ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2

CONFIG_ERRORS = (
    OSError,
    yaml.YAMLError,
    ValidationError,
    InvalidModelParamsError,
    InvalidQuadratureSpecError,
)

# Valid files the model or solver still cannot handle
RUN_CONFIG_ERRORS = (
    InvalidModelParamsError,
    UnsupportedMeshModeError,
    InsufficientRangeError,
    SpectralSizeError,
    DerivativeOrderError,
)


def load_config(path: Path) -> ExperimentConfig:
    """Read and validate an experiment file."""
    with path.open(encoding="utf-8") as handle:
        raw = yaml.safe_load(handle)
    return ExperimentConfig.model_validate(raw)


def describe_config_error(exc: Exception) -> str:
    """Return a readable message; validation errors list every field path."""
    if isinstance(exc, ValidationError):
        lines = [
            f"{'.'.join(str(part) for part in error['loc']) or '<root>'}: {error['msg']}"
            for error in exc.errors()
        ]
        return "invalid experiment config:\n  " + "\n  ".join(lines)
    return f"invalid experiment config: {exc}"


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="two-ends",
        description="Heat and Poisson kernel experiments on a manifold with two ends.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment file")
    run.add_argument("config", type=Path, help="Path to the experiment YAML file")
    run.add_argument(
        "--output-root",
        type=Path,
        default=None,
        help=f"Directory receiving the run folder (default: OUTPUT_ROOT or {config.output_root})",
    )

    validate = commands.add_parser("validate", help="Validate an experiment file")
    validate.add_argument("config", type=Path, help="Path to the experiment YAML file")

    commands.add_parser("list-kinds", help="List the experiment kinds")
    return parser


def _run(path: Path, output_root: Path | None) -> int:
    try:
        experiment = load_config(path)
    except CONFIG_ERRORS as exc:
        print(describe_config_error(exc), file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        outcome = run_experiment(experiment, path.stem, output_root)
        outcome.raise_for_checks()
    except ExperimentCheckError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CHECK_FAILED
    except RUN_CONFIG_ERRORS as exc:
        print(describe_config_error(exc), file=sys.stderr)
        return EXIT_BAD_CONFIG
    except ArithmeticError as exc:
        logger.exception("Numerical failure during the run")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        logger.exception("Run failed")
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    passed = len(outcome.checks)
    print(f"{outcome.kind.value}: {passed} checks passed, results in {outcome.output_dir}")
    return EXIT_OK


def _validate(path: Path) -> int:
    try:
        experiment = load_config(path)
    except CONFIG_ERRORS as exc:
        print(describe_config_error(exc), file=sys.stderr)
        return EXIT_BAD_CONFIG
    print(f"{path}: valid {experiment.experiment.kind} experiment")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Parse the command line and dispatch; return the exit status."""
    logging.basicConfig()
    logging.getLogger("root").setLevel(config.log_level)

    args = build_parser().parse_args(argv)
    match args.command:
        case "run":
            return _run(args.config, args.output_root)
        case "validate":
            return _validate(args.config)
        case "list-kinds":
            for kind in ExperimentKindEnum:
                print(kind.value)
            return EXIT_OK
    return EXIT_BAD_CONFIG
