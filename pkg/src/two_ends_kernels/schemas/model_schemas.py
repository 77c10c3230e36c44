"""Data models for the two-ends manifold model."""

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from two_ends_kernels.enums.base_enums import MeshModeEnum
from two_ends_kernels.exceptions import InvalidModelParamsError


class ModelParams(BaseModel):
    """Parameters of a discrete model of the manifold with two ends."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., title="Big-end dimension", ge=1)
    n: int = Field(..., title="Small-end dimension", ge=1)
    h: float = Field(..., title="Grid spacing", gt=0)
    r_max: float = Field(..., title="Truncation radius per end", gt=0)
    center_width: float = Field(1.0, title="Diameter of the central part K", gt=0)
    mode: MeshModeEnum = Field(MeshModeEnum.RADIAL_RAY, title="Discretization mode")

    @model_validator(mode="after")
    def validate_dimensions(self) -> Self:
        """Enforce m > n >= 3 and a truncation radius well beyond the centre."""
        if self.m <= self.n:
            raise InvalidModelParamsError(f"m must exceed n, got m={self.m}, n={self.n}")
        if self.n < 3:  # noqa: PLR2004
            raise InvalidModelParamsError(f"n must be at least 3, got n={self.n}")
        if self.r_max < 10 * self.center_width:
            raise InvalidModelParamsError(
                f"r_max={self.r_max} must be at least 10 * center_width={self.center_width}"
            )
        if self.h > self.center_width:
            raise InvalidModelParamsError(
                f"h={self.h} must not exceed center_width={self.center_width}"
            )
        return self


class RegimeVolumeFit(BaseModel):
    """Log-log volume growth fit for one regime."""

    regime: str = Field(..., description="Regime label")
    expected_slope: int = Field(..., description="Exponent predicted by the volume regimes")
    slope: float = Field(..., description="Fitted log-log slope")
    intercept: float = Field(..., description="Fitted log-log intercept")
    r_min: float = Field(..., gt=0)
    r_max: float = Field(..., gt=0)
    n_radii: int = Field(..., ge=1)
    residuals: list[float] = Field(..., description="Residuals of the log-log fit")

    @property
    def relative_error(self) -> float:
        """Return |slope - expected| / expected."""
        return abs(self.slope - self.expected_slope) / self.expected_slope


class VolumeReport(BaseModel):
    """Fitted volume growth exponents of a model."""

    params: ModelParams
    regimes: list[RegimeVolumeFit]
    max_doubling_ratio: float = Field(
        ..., description="Largest V(x,2r)/V(x,r) over the small-end sweep"
    )
    doubling_radii: list[float] = Field(..., description="Radii of the small-end doubling sweep")
    doubling_ratios: list[float] = Field(..., description="Doubling ratios along the sweep")
    witness_abs: list[float] = Field(
        ..., description="|x| of the small-end sites of the non-doubling witness"
    )
    witness_ratios: list[float] = Field(
        ..., description="V(x, 2r) / V(x, r) at r just above |x|, so 2r reaches the big end"
    )

    @property
    def witness_grows(self) -> bool:
        """Return True when the witness ratios increase strictly with |x|."""
        return all(b > a for a, b in zip(self.witness_ratios, self.witness_ratios[1:]))

    def regime(self, name: str) -> RegimeVolumeFit:
        """Return the fit of the named regime."""
        return next(fit for fit in self.regimes if fit.regime == name)
