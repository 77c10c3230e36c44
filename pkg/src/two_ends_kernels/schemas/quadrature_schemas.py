"""Data models for quadrature settings and diagnostics."""

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from two_ends_kernels.enums.base_enums import QuadratureTransformEnum
from two_ends_kernels.exceptions import InvalidQuadratureSpecError


class QuadratureSpec(BaseModel):
    """Settings of a truncated log-grid trapezoid rule."""

    model_config = ConfigDict(frozen=True)

    n_nodes: int = Field(256, title="Initial node count", ge=32)
    transform: QuadratureTransformEnum = Field(QuadratureTransformEnum.LOG_GRID)
    v_min: float | None = Field(None, title="Lower truncation, automatic if unset", gt=0)
    v_max: float | None = Field(None, title="Upper truncation, automatic if unset", gt=0)
    tolerance: float = Field(1e-8, title="Stopping change between doublings", gt=0)
    max_doublings: int = Field(6, ge=0, le=12)

    @model_validator(mode="after")
    def validate_window(self) -> Self:
        """Enforce v_min < v_max when both are given."""
        if self.v_min is not None and self.v_max is not None and self.v_min >= self.v_max:
            raise InvalidQuadratureSpecError(v_min=self.v_min, v_max=self.v_max)
        return self

    def with_nodes(self, n_nodes: int) -> Self:
        """Return a copy with another initial node count."""
        return self.model_copy(update={"n_nodes": max(n_nodes, 32)})

    def with_tolerance(self, tolerance: float) -> Self:
        """Return a copy with another stopping tolerance."""
        return self.model_copy(update={"tolerance": tolerance})


class QuadratureDiagnostics(BaseModel):
    """Bookkeeping of one converged quadrature."""

    what: str
    n_nodes: int = Field(..., description="Total nodes of the final rule")
    doublings: int = Field(..., description="Number of node doublings performed")
    lower: float = Field(..., description="Lower end of the window in the original variable")
    upper: float = Field(..., description="Upper end of the window in the original variable")
    last_change: float = Field(..., description="Change between the last two estimates")
    tail_left: float = Field(..., description="Integrand magnitude at the lower end")
    tail_right: float = Field(..., description="Integrand magnitude at the upper end")
