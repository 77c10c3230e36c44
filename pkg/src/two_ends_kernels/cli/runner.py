"""Experiment runner: builds the model and operator of a config, dispatches and reports."""

import logging
from dataclasses import dataclass
from pathlib import Path

from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.cli.experiments import EXPERIMENTS
from two_ends_kernels.cli.writers import RunWriter
from two_ends_kernels.config import config as settings
from two_ends_kernels.enums.base_enums import ExperimentKindEnum
from two_ends_kernels.exceptions import ExperimentCheckError
from two_ends_kernels.schemas.experiment_schemas import CheckResult, ExperimentConfig

logger = logging.getLogger(__name__)

CHECKS_NAME = "checks.json"
SUMMARY_NAME = "summary.txt"


@dataclass(frozen=True)
class RunOutcome:
    """Checks and location of a finished run."""

    kind: ExperimentKindEnum
    output_dir: Path
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        """Return True when every check passed."""
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        """Return 0 when every check passed, 1 otherwise."""
        return 0 if self.passed else 1

    def raise_for_checks(self) -> None:
        """Raise on the first failing check."""
        for check in self.checks:
            if not check.passed:
                detail = f"value {check.value} against limit {check.limit}. {check.detail}"
                raise ExperimentCheckError(check_name=check.name, detail=detail.strip())


def output_dir_for(
    config: ExperimentConfig, config_stem: str, output_root: Path | None = None
) -> Path:
    """Return ``<output_root>/<output_dir or config stem>``."""
    root = output_root if output_root is not None else settings.output_root
    return root / (config.output_dir or config_stem)


def _summary_text(context: RunContext, kind: ExperimentKindEnum) -> str:
    lines = [f"experiment: {kind.value}", f"seed: {context.config.seed}", ""]
    lines += context.summary
    lines.append("")
    for check in context.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"[{status}] {check.name}: value={check.value} limit={check.limit}")
    failing = next((check for check in context.checks if not check.passed), None)
    lines.append("")
    lines.append(f"first failing check: {failing.name}" if failing else "all checks passed")
    return "\n".join(lines) + "\n"


def run_experiment(
    config: ExperimentConfig, config_stem: str, output_root: Path | None = None
) -> RunOutcome:
    """Run one experiment and write its artifacts, checks, summary and manifest."""
    kind = ExperimentKindEnum(config.experiment.kind)
    writer = RunWriter(output_dir_for(config, config_stem, output_root))
    context = RunContext(config=config, writer=writer)
    logger.info(f"Running {kind.value} experiment into {writer.output_dir}")

    EXPERIMENTS[kind](context)

    writer.write_json(CHECKS_NAME, context.checks)
    writer.write_text(SUMMARY_NAME, _summary_text(context, kind))
    writer.write_manifest(config.model_dump(mode="json"), config.seed)
    outcome = RunOutcome(kind=kind, output_dir=writer.output_dir, checks=context.checks)
    logger.info(
        f"{kind.value}: {sum(c.passed for c in context.checks)}/{len(context.checks)} checks passed"
    )
    return outcome
