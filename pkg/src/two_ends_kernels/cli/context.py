"""Per-run state shared by the experiment steps."""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from two_ends_kernels.cli.writers import RunWriter
from two_ends_kernels.enums.base_enums import OperatorKindEnum
from two_ends_kernels.geometry.model_geometry import ManifoldModel, build_two_ends_model
from two_ends_kernels.schemas.experiment_schemas import (
    CheckResult,
    ExperimentConfig,
    PotentialConfig,
)
from two_ends_kernels.spectral.operators import (
    OperatorHandle,
    SpectralData,
    add_potential,
    assemble_laplacian,
    potential_from_profile,
    spectral_decompose,
)

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """State shared by the steps of one experiment run.

    The model, the operator and its spectrum are built on first use; every random draw
    comes from ``rng``, seeded from the config.
    """

    config: ExperimentConfig
    writer: RunWriter
    rng: np.random.Generator = field(init=False)
    checks: list[CheckResult] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Seed the generator."""
        self.rng = np.random.default_rng(self.config.seed)

    @cached_property
    def model(self) -> ManifoldModel:
        """Return the discrete model."""
        return build_two_ends_model(self.config.model)

    @cached_property
    def laplacian(self) -> OperatorHandle:
        """Return the Laplacian of the model."""
        return assemble_laplacian(self.model)

    def with_potential(self, potential: PotentialConfig) -> OperatorHandle:
        """Return the Laplacian plus a named potential."""
        profile = potential_from_profile(
            self.model, potential.kind, potential.strength, potential.power
        )
        return add_potential(self.laplacian, profile)

    @cached_property
    def operator(self) -> OperatorHandle:
        """Return the operator selected by the config."""
        if self.config.operator.kind == OperatorKindEnum.SCHRODINGER:
            return self.with_potential(self.config.operator.potential)
        return self.laplacian

    @cached_property
    def spectrum(self) -> SpectralData:
        """Return the spectral decomposition of the selected operator."""
        return spectral_decompose(self.operator)

    @cached_property
    def laplacian_spectrum(self) -> SpectralData:
        """Return the spectral decomposition of the Laplacian."""
        if self.operator is self.laplacian:
            return self.spectrum
        return spectral_decompose(self.laplacian)

    def check(
        self,
        name: str,
        passed: bool,
        value: float | None = None,
        limit: float | None = None,
        detail: str = "",
    ) -> bool:
        """Record an invariant check and return its outcome."""
        result = CheckResult(
            name=name,
            passed=bool(passed),
            value=None if value is None else float(value),
            limit=None if limit is None else float(limit),
            detail=detail,
        )
        self.checks.append(result)
        if not result.passed:
            logger.warning(f"Check {name} failed: value={value}, limit={limit} {detail}")
        return result.passed

    def check_at_most(self, name: str, value: float, limit: float, detail: str = "") -> bool:
        """Record a check passing when ``value <= limit``."""
        return self.check(name, value <= limit, value, limit, detail)

    def note(self, line: str) -> None:
        """Add a line to the human-readable summary."""
        self.summary.append(line)
