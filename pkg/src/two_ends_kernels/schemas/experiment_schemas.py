"""Data models for experiment configuration files and run outcomes."""

from math import pi
from typing import Annotated, Literal
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from two_ends_kernels.enums.base_enums import (
    CalculusMethodEnum,
    KernelKindEnum,
    MultiplierKindEnum,
    OperatorKindEnum,
    PotentialKindEnum,
    RegionEnum,
)
from two_ends_kernels.schemas.model_schemas import ModelParams
from two_ends_kernels.schemas.quadrature_schemas import QuadratureSpec

PositiveGrid = Annotated[list[Annotated[float, Field(gt=0)]], Field(min_length=1)]
SectorPoints = list[tuple[Annotated[float, Field(gt=0)], float]]


def check_sector_points(points: SectorPoints) -> None:
    """Raise unless every (modulus, argument) pair has |argument| < pi/4."""
    outside = [point for point in points if abs(point[1]) >= pi / 4]
    if outside:
        msg = f"sector points must satisfy |argument| < pi/4, got {outside}"
        raise ValueError(msg)


class _Strict(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class PotentialConfig(_Strict):
    """Named non-negative potential profile."""

    kind: PotentialKindEnum = PotentialKindEnum.BUMP
    strength: float = Field(1.0, ge=0)
    power: float = Field(2.0, gt=0, description="Decay exponent of the radial_decay profile")


class OperatorConfig(_Strict):
    """Operator built on the model: the Laplacian, or the Laplacian plus a potential."""

    kind: OperatorKindEnum = OperatorKindEnum.LAPLACIAN
    potential: PotentialConfig | None = None

    @model_validator(mode="after")
    def validate_potential(self) -> Self:
        """Require a potential exactly for Schrodinger operators."""
        if (self.kind == OperatorKindEnum.SCHRODINGER) != (self.potential is not None):
            msg = "a potential is required for schrodinger operators and only for them"
            raise ValueError(msg)
        return self


class MultiplierConfig(_Strict):
    """Laplace-transform multiplier m(t) applied through the functional calculus."""

    kind: MultiplierKindEnum
    value: float = Field(1.0, description="Constant value")
    cutoff: float = Field(1.0, gt=0, description="Indicator cutoff T")
    s: float = Field(1.0, description="Exponent of the imaginary power L^(is)")
    times: list[float] = Field(default_factory=list, description="Table sample times")
    values: list[float] = Field(default_factory=list, description="Table sample values")

    @model_validator(mode="after")
    def validate_table(self) -> Self:
        """Require matching samples for table multipliers."""
        if self.kind == MultiplierKindEnum.TABLE and (
            len(self.times) < 2 or len(self.times) != len(self.values)  # noqa: PLR2004
        ):
            msg = "table multipliers need at least two (time, value) samples of equal length"
            raise ValueError(msg)
        return self


class VolumeParams(_Strict):
    """Volume growth regimes and the non-doubling sweep."""

    kind: Literal["volume"]
    slope_tolerance: float = Field(0.15, gt=0, description="Relative slope tolerance")
    dump_model: bool = Field(False, description="Also write the model file")


class HeatCheckParams(_Strict):
    """Semigroup, mass conservation and symmetry of the heat kernel."""

    kind: Literal["heat-check"]
    times: PositiveGrid = Field(default_factory=lambda: [0.1, 1.0, 10.0])
    semigroup_tolerance: float = Field(1e-8, gt=0)
    mass_tolerance: float = Field(1e-6, gt=0)
    symmetry_tolerance: float = Field(1e-12, gt=0)
    dump_spectrum: bool = False
    dump_kernel: bool = Field(False, description="Write the first heat kernel as triplets")


class PoissonCheckParams(_Strict):
    """Subordination quadrature against the spectral oracle."""

    kind: Literal["poisson-check"]
    times: PositiveGrid = Field(default_factory=lambda: [1.0])
    orders: list[Annotated[int, Field(ge=0)]] = Field(default_factory=lambda: [2], min_length=1)
    sector_points: SectorPoints = Field(
        default_factory=list, description="Complex times as (modulus, argument) pairs"
    )
    tolerance: float = Field(1e-6, gt=0, description="Largest deviation relative to the kernel")
    scalar_tolerance: float = Field(1e-8, gt=0)

    @model_validator(mode="after")
    def validate_sector(self) -> Self:
        """Complex times must lie in the sector |arg z| < pi/4."""
        check_sector_points(self.sector_points)
        return self


class BoundsFitParams(_Strict):
    """Fit and check of the heat or Poisson kernel estimates."""

    kind: Literal["bounds-fit"]
    kernel: KernelKindEnum = KernelKindEnum.HEAT
    times: PositiveGrid = Field(default_factory=lambda: [0.25, 1.0, 4.0, 16.0, 64.0])
    orders: list[Annotated[int, Field(ge=0)]] = Field(default_factory=lambda: [0, 1, 2])
    n_per_regime: int = Field(50, ge=1)
    min_samples_per_regime: int = Field(
        50, ge=1, description="Fits refuse regimes with fewer samples"
    )
    two_sided: bool = True
    recheck_inflation: float | None = Field(
        None, gt=1, description="Re-check the fit on fresh samples with this slack"
    )
    sector_points: SectorPoints = Field(
        default_factory=list,
        description="Complex times (modulus, argument) fitted against the bound at |z|",
    )
    decay_times: list[Annotated[float, Field(gt=0)]] = Field(
        default_factory=list, description="On-diagonal decay grid at a small-end site"
    )
    decay_site_abs: float = Field(3.0, ge=1, description="|x| of the on-diagonal decay site")
    decay_tolerance: float = Field(0.15, gt=0)

    @model_validator(mode="after")
    def validate_sector(self) -> Self:
        """Sector points apply to Poisson kernels and lie in |arg z| < pi/4."""
        if self.sector_points and self.kernel != KernelKindEnum.POISSON:
            msg = "sector points are only fitted for poisson kernels"
            raise ValueError(msg)
        check_sector_points(self.sector_points)
        return self


class DominationParams(_Strict):
    """Trotter comparison and Gaussian-type domination for Schrodinger operators."""

    kind: Literal["domination"]
    potentials: list[PotentialConfig] = Field(
        default_factory=lambda: [
            PotentialConfig(kind=PotentialKindEnum.CONSTANT, strength=0.5),
            PotentialConfig(kind=PotentialKindEnum.BUMP, strength=2.0),
            PotentialConfig(kind=PotentialKindEnum.RADIAL_DECAY, strength=1.0),
        ],
        min_length=1,
    )
    times: PositiveGrid = Field(default_factory=lambda: [0.1, 0.5, 1.0, 5.0, 20.0])
    alpha_grid: PositiveGrid = Field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    approx_identity_order: int | None = Field(
        1, ge=0, description="Order k of the approximation to the identity check"
    )


class MultiplierParams(_Strict):
    """Laplace-transform multipliers by quadrature against the oracle."""

    kind: Literal["multiplier"]
    multipliers: list[MultiplierConfig] = Field(
        default_factory=lambda: [
            MultiplierConfig(kind=MultiplierKindEnum.CONSTANT),
            MultiplierConfig(kind=MultiplierKindEnum.INDICATOR, cutoff=2.0),
            MultiplierConfig(kind=MultiplierKindEnum.IMAGINARY_POWER, s=0.5),
            MultiplierConfig(kind=MultiplierKindEnum.IMAGINARY_POWER, s=1.0),
            MultiplierConfig(kind=MultiplierKindEnum.IMAGINARY_POWER, s=2.0),
        ],
        min_length=1,
    )
    n_functions: int = Field(3, ge=1)
    tolerance: float = Field(1e-4, gt=0, description="Relative l2 error against the oracle")
    unitarity_tolerance: float = Field(1e-10, gt=0)


class GFunctionParams(_Strict):
    """Norm identity of the Littlewood-Paley g-function."""

    kind: Literal["g-function"]
    kappas: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [1, 2], min_length=1)
    n_functions: int = Field(20, ge=1)
    tolerance: float = Field(1e-5, gt=0)


class MaximalParams(_Strict):
    """Hardy-Littlewood and semigroup maximal functions."""

    kind: Literal["maximal"]
    n_functions: int = Field(5, ge=1)
    semigroup: KernelKindEnum = KernelKindEnum.HEAT
    grid: PositiveGrid = Field(default_factory=lambda: [0.1, 1.0, 10.0, 100.0])
    order: int = Field(0, ge=0)


class CZDemoParams(_Strict):
    """Calderon-Zygmund decompositions of random functions on one end."""

    kind: Literal["cz-demo"]
    region: RegionEnum = RegionEnum.BIG_END
    n_trials: int = Field(100, ge=1)
    max_threshold_factor: float = Field(
        20.0, gt=1, description="Thresholds range over [1, factor] times the root average"
    )

    @model_validator(mode="after")
    def validate_region(self) -> Self:
        """Dyadic charts exist on the ends only."""
        if self.region == RegionEnum.CENTER:
            msg = "cz-demo runs on the big_end or the small_end"
            raise ValueError(msg)
        return self


class WhitneyDemoParams(_Strict):
    """Whitney covers of maximal-function level sets."""

    kind: Literal["whitney-demo"]
    n_trials: int = Field(20, ge=1)
    quantile_range: tuple[float, float] = Field(
        (0.5, 0.95), description="Level lambda is drawn as a quantile of M f in this range"
    )

    @model_validator(mode="after")
    def validate_quantiles(self) -> Self:
        """Require 0 < low < high < 1."""
        low, high = self.quantile_range
        if not 0 < low < high < 1:
            msg = f"quantile range must satisfy 0 < low < high < 1, got {self.quantile_range}"
            raise ValueError(msg)
        return self


class WeakTypeParams(_Strict):
    """Weak-(1,1) quasinorms of L^(is) over normalized bumps sweeping both ends."""

    kind: Literal["weak11"]
    s: float = 1.0
    method: CalculusMethodEnum = CalculusMethodEnum.ORACLE
    n_locations: int = Field(4, ge=1, description="Centres per end")
    concentrations: list[Annotated[int, Field(ge=1)]] = Field(
        default_factory=lambda: [1, 2, 4, 8, 16],
        min_length=1,
        description="Bump radius is the largest radius divided by each value",
    )
    max_spread: float = Field(2.0, gt=1, description="Allowed factor around the median")


ExperimentParams = Annotated[
    VolumeParams
    | HeatCheckParams
    | PoissonCheckParams
    | BoundsFitParams
    | DominationParams
    | MultiplierParams
    | GFunctionParams
    | MaximalParams
    | CZDemoParams
    | WhitneyDemoParams
    | WeakTypeParams,
    Field(discriminator="kind"),
]


class ExperimentConfig(_Strict):
    """One experiment file."""

    model: ModelParams
    operator: OperatorConfig = Field(default_factory=OperatorConfig)
    experiment: ExperimentParams
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    seed: int = Field(0, ge=0)
    output_dir: str | None = Field(
        None, description="Output directory name under the output root, config stem if unset"
    )


class CheckResult(BaseModel):
    """Outcome of one invariant check of a run."""

    name: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    detail: str = ""
