"""Experiment kinds understood by the runner, keyed by kind."""

from collections.abc import Callable

from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.cli.experiments.analysis_experiments import (
    run_cz_demo,
    run_maximal,
    run_weak11,
    run_whitney_demo,
)
from two_ends_kernels.cli.experiments.bound_experiments import run_bounds_fit, run_domination
from two_ends_kernels.cli.experiments.calculus_experiments import run_g_function, run_multiplier
from two_ends_kernels.cli.experiments.geometry_experiments import run_volume
from two_ends_kernels.cli.experiments.kernel_experiments import run_heat_check, run_poisson_check
from two_ends_kernels.enums.base_enums import ExperimentKindEnum

Experiment = Callable[[RunContext], None]

EXPERIMENTS: dict[ExperimentKindEnum, Experiment] = {
    ExperimentKindEnum.VOLUME: run_volume,
    ExperimentKindEnum.HEAT_CHECK: run_heat_check,
    ExperimentKindEnum.POISSON_CHECK: run_poisson_check,
    ExperimentKindEnum.BOUNDS_FIT: run_bounds_fit,
    ExperimentKindEnum.DOMINATION: run_domination,
    ExperimentKindEnum.MULTIPLIER: run_multiplier,
    ExperimentKindEnum.G_FUNCTION: run_g_function,
    ExperimentKindEnum.MAXIMAL: run_maximal,
    ExperimentKindEnum.CZ_DEMO: run_cz_demo,
    ExperimentKindEnum.WHITNEY_DEMO: run_whitney_demo,
    ExperimentKindEnum.WEAK11: run_weak11,
}
