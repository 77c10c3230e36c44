"""Data models for the summaries of decompositions, covers and weak-type sweeps."""

from pydantic import BaseModel, Field

from two_ends_kernels.enums.base_enums import RegionEnum


class CubeSummary(BaseModel):
    """One selected dyadic cube of the radial chart of an end."""

    level: int = Field(..., description="Generation k, the side is 2^k")
    index: int = Field(..., ge=0, description="Position a, the cube is [2^k a, 2^k (a + 1))")
    left: float
    right: float
    measure: float = Field(..., gt=0)
    average: float = Field(..., description="Average of |f| over the cube")
    corner_at_origin: bool
    n_sites: int = Field(..., ge=1)


class CZSummary(BaseModel):
    """Calderon-Zygmund decomposition of a function on one end."""

    region: RegionEnum
    threshold: float = Field(..., gt=0)
    cubes: list[CubeSummary]
    total_cube_measure: float = Field(..., ge=0)
    l1_norm: float = Field(..., ge=0)
    good_sup: float = Field(..., ge=0)
    reconstruction_error: float = Field(..., ge=0)
    max_mean_error: float = Field(..., ge=0)
    away_from_origin: list[int] = Field(..., description="Cubes without a corner at the origin")
    at_origin: list[int] = Field(..., description="Cubes with a corner at the origin")
    max_sup_inf_ratio: float | None = Field(
        None, description="Largest sup|z| / inf|z| over cubes away from the origin"
    )


class BallSummary(BaseModel):
    """One Whitney ball B(x, r), open."""

    center: int = Field(..., ge=0)
    radius: float = Field(..., gt=0)
    n_sites: int = Field(..., ge=1)


class WhitneySummary(BaseModel):
    """Whitney cover of an open set of sites."""

    n_open_sites: int = Field(..., ge=1)
    balls: list[BallSummary]
    overlap_constant: int = Field(..., ge=1)
    covers_open_set: bool
    fifth_balls_disjoint: bool
    max_weight_error: float = Field(..., ge=0)
