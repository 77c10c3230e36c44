"""Data models for kernel bound regimes, fitted constants and reports."""

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from two_ends_kernels.enums.base_enums import KernelKindEnum, RegionEnum, TimeRegimeEnum
from two_ends_kernels.exceptions import InvalidRegimeTagError

HEAT_CASES: dict[tuple[RegionEnum, RegionEnum], int] = {
    (RegionEnum.CENTER, RegionEnum.CENTER): 2,
    (RegionEnum.BIG_END, RegionEnum.CENTER): 3,
    (RegionEnum.SMALL_END, RegionEnum.CENTER): 4,
    (RegionEnum.BIG_END, RegionEnum.SMALL_END): 5,
    (RegionEnum.BIG_END, RegionEnum.BIG_END): 6,
    (RegionEnum.SMALL_END, RegionEnum.SMALL_END): 7,
}
POISSON_CASES: dict[tuple[RegionEnum, RegionEnum], int] = {
    (RegionEnum.CENTER, RegionEnum.CENTER): 1,
    (RegionEnum.BIG_END, RegionEnum.CENTER): 2,
    (RegionEnum.SMALL_END, RegionEnum.CENTER): 3,
    (RegionEnum.BIG_END, RegionEnum.SMALL_END): 4,
    (RegionEnum.BIG_END, RegionEnum.BIG_END): 5,
    (RegionEnum.SMALL_END, RegionEnum.SMALL_END): 6,
}
SHORT_TIME_HEAT_CASE = 1


class RegimeTag(BaseModel):
    """Case of a heat or Poisson estimate for an oriented pair of regions."""

    model_config = ConfigDict(frozen=True)

    kind: KernelKindEnum
    case: int = Field(..., ge=1, le=7)
    region_x: RegionEnum
    region_y: RegionEnum
    time_regime: TimeRegimeEnum | None = None

    @model_validator(mode="after")
    def validate_case(self) -> Self:
        """Check the case against the region pair and the time split."""
        pair = (self.region_x, self.region_y)
        if self.kind == KernelKindEnum.POISSON:
            if self.time_regime is not None or POISSON_CASES.get(pair) != self.case:
                raise InvalidRegimeTagError(self.label)
        elif self.time_regime == TimeRegimeEnum.SHORT:
            if self.case != SHORT_TIME_HEAT_CASE:
                raise InvalidRegimeTagError(self.label)
        elif self.time_regime != TimeRegimeEnum.LONG or HEAT_CASES.get(pair) != self.case:
            raise InvalidRegimeTagError(self.label)
        return self

    @property
    def label(self) -> str:
        """Return a short readable name such as ``heat-5``."""
        return f"{self.kind.value}-{self.case}"


class BoundConstants(BaseModel):
    """Constants of a two-sided Gaussian-type estimate."""

    model_config = ConfigDict(frozen=True)

    c_upper: float = Field(1.0, gt=0)
    c_lower: float = Field(1.0, gt=0)
    c0_upper: float = Field(1.0, gt=0, description="Gaussian rate of the upper bound")
    c0_lower: float = Field(1.0, gt=0, description="Gaussian rate of the lower bound")
    alpha: float = Field(1.0, gt=0, description="Time dilation of a Gaussian-type bound")


class RegimeFit(BaseModel):
    """Fitted constants and worst ratios of one regime."""

    tag: RegimeTag
    constants: BoundConstants
    n_samples: int = Field(..., ge=1)
    max_kernel_over_bound: float = Field(..., description="At the fitted upper constants")
    max_bound_over_kernel: float | None = Field(
        None, description="At the fitted lower constants, two-sided fits only"
    )
    log_ratio_spread: float = Field(..., ge=0)
    violations: int = Field(..., ge=0)


class BoundFitReport(BaseModel):
    """Per-regime fit of a family of kernel bounds."""

    kind: KernelKindEnum
    order: int = Field(0, ge=0, description="Time-derivative order k of Poisson kernels")
    two_sided: bool
    regimes: list[RegimeFit]
    seam_mismatch: float | None = Field(
        None, description="Largest factor between the short and long time bounds at t = 1"
    )
    sample_grid: str = Field(..., description="Description of the sampled (t, x, y) grid")

    @property
    def total_violations(self) -> int:
        """Return the number of violations over all regimes."""
        return sum(fit.violations for fit in self.regimes)

    def fit_for(self, case: int) -> RegimeFit:
        """Return the fit of one case."""
        return next(fit for fit in self.regimes if fit.tag.case == case)


class DominationPair(BaseModel):
    """Smallest constant C achieving h_t <= C h_(alpha t) on the sampled grid."""

    alpha: float = Field(..., gt=0)
    constant: float = Field(..., ge=0)


class DominationReport(BaseModel):
    """Trotter comparison and Gaussian-type domination of a Schrodinger heat kernel."""

    trotter_violations: int = Field(..., ge=0)
    max_trotter_excess: float
    first_violation: tuple[float, int, int] | None = Field(
        None, description="(t, x, y) of the first Trotter violation"
    )
    pareto: list[DominationPair]
    times: list[float]


class ApproxIdentityReport(BaseModel):
    """Outcome of the generalised approximation to the identity check."""

    passed: bool
    order: int = Field(..., ge=0)
    alpha: float | None = Field(None, description="Dilation achieving the smallest constant")
    constant: float | None = Field(None, description="Smallest grid constant that works")
    required_constant: float = Field(..., description="Smallest constant over the alpha grid")
    worst_ratio: float = Field(..., description="Required constant over the largest grid value")
