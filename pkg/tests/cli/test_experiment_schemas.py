"""Tests for the experiment configuration models."""

import pytest
from pydantic import ValidationError

from two_ends_kernels.enums.base_enums import ExperimentKindEnum, OperatorKindEnum
from two_ends_kernels.exceptions import InvalidModelParamsError
from two_ends_kernels.schemas.experiment_schemas import (
    BoundsFitParams,
    CZDemoParams,
    ExperimentConfig,
    HeatCheckParams,
    MultiplierConfig,
    OperatorConfig,
    PoissonCheckParams,
    WhitneyDemoParams,
)

MODEL = {"m": 4, "n": 3, "h": 0.5, "r_max": 20.0}


def _config(experiment: dict, **extra: object) -> ExperimentConfig:
    """Validate an experiment file payload."""
    return ExperimentConfig.model_validate({"model": MODEL, "experiment": experiment, **extra})


def test_kind_selects_the_parameter_model() -> None:
    """The kind field discriminates the experiment parameters."""
    config = _config({"kind": "heat-check", "times": [0.5, 2.0]})
    assert isinstance(config.experiment, HeatCheckParams)
    assert config.experiment.times == [0.5, 2.0]
    assert config.operator.kind == OperatorKindEnum.LAPLACIAN
    assert config.seed == 0


def test_every_kind_has_defaults() -> None:
    """A bare kind is a valid experiment."""
    for kind in ExperimentKindEnum:
        assert _config({"kind": kind.value}).experiment.kind == kind.value


def test_unknown_kind_is_rejected() -> None:
    """Kinds outside the registry fail validation."""
    with pytest.raises(ValidationError):
        _config({"kind": "spectral-gap"})


def test_unknown_fields_are_rejected() -> None:
    """Typos in experiment files are errors."""
    with pytest.raises(ValidationError):
        _config({"kind": "volume", "slope_tolerence": 0.1})
    with pytest.raises(ValidationError):
        _config({"kind": "volume"}, seeds=3)


def test_invalid_model_surfaces_its_own_error() -> None:
    """Model constraints raise the model error."""
    with pytest.raises(InvalidModelParamsError):
        ExperimentConfig.model_validate(
            {"model": MODEL | {"m": 3}, "experiment": {"kind": "volume"}}
        )


def test_schrodinger_operator_needs_a_potential() -> None:
    """A potential is required exactly for Schrodinger operators."""
    with pytest.raises(ValidationError):
        OperatorConfig(kind=OperatorKindEnum.SCHRODINGER)
    with pytest.raises(ValidationError):
        OperatorConfig(potential={"kind": "bump", "strength": 1.0})
    operator = OperatorConfig(kind="schrodinger", potential={"kind": "constant", "strength": 0.5})
    assert operator.potential.strength == 0.5


def test_parameter_validators() -> None:
    """Cross-field constraints of individual experiments."""
    with pytest.raises(ValidationError):
        CZDemoParams(kind="cz-demo", region="center")
    with pytest.raises(ValidationError):
        WhitneyDemoParams(kind="whitney-demo", quantile_range=(0.9, 0.5))
    with pytest.raises(ValidationError):
        MultiplierConfig(kind="table", times=[1.0], values=[1.0])
    with pytest.raises(ValidationError):
        HeatCheckParams(kind="heat-check", times=[])
    with pytest.raises(ValidationError):
        HeatCheckParams(kind="heat-check", times=[-1.0])
    with pytest.raises(ValidationError):
        PoissonCheckParams(kind="poisson-check", sector_points=[(1.0, 1.0)])
    assert PoissonCheckParams(kind="poisson-check", sector_points=[(1.0, 0.5)]).sector_points


def test_configs_are_frozen() -> None:
    """Validated configs are immutable."""
    config = _config({"kind": "volume"})
    with pytest.raises(ValidationError):
        config.seed = 4


def test_bounds_fit_sector_points() -> None:
    """Sector points are Poisson-only and stay inside |arg z| < pi/4."""
    params = BoundsFitParams(kind="bounds-fit", kernel="poisson", sector_points=[(1.0, 0.7)])
    assert params.sector_points == [(1.0, 0.7)]
    assert params.min_samples_per_regime == 50
    with pytest.raises(ValidationError, match="pi/4"):
        BoundsFitParams(kind="bounds-fit", kernel="poisson", sector_points=[(1.0, 0.8)])
    with pytest.raises(ValidationError, match="poisson"):
        BoundsFitParams(kind="bounds-fit", kernel="heat", sector_points=[(1.0, 0.2)])
    with pytest.raises(ValidationError):
        BoundsFitParams(kind="bounds-fit", min_samples_per_regime=0)
