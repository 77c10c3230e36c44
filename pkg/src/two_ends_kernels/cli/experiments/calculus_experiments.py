"""Laplace-transform multipliers, imaginary powers and the g-function."""

import logging

import numpy as np

from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.enums.base_enums import CalculusMethodEnum, MultiplierKindEnum
from two_ends_kernels.schemas.experiment_schemas import (
    GFunctionParams,
    MultiplierConfig,
    MultiplierParams,
)
from two_ends_kernels.schemas.quadrature_schemas import QuadratureSpec
from two_ends_kernels.spectral.functional_calculus import (
    CALCULUS_TOLERANCE,
    MultiplierSpec,
    TimeFunction,
    apply_laplace_multiplier,
    constant_multiplier,
    g_function,
    g_function_constant,
    imaginary_power,
    imaginary_power_multiplier,
    indicator_multiplier,
    multiplier_oracle,
    symbol_by_quadrature,
    table_multiplier,
)
from two_ends_kernels.spectral.operators import mu_norm

logger = logging.getLogger(__name__)


def calculus_quadrature(context: RunContext) -> QuadratureSpec:
    """Return the run quadrature, loosened to the calculus tolerance when stricter."""
    quad = context.config.quadrature
    return quad.with_tolerance(max(quad.tolerance, CALCULUS_TOLERANCE))


def build_multiplier(
    config: MultiplierConfig, quad: QuadratureSpec
) -> tuple[MultiplierSpec, TimeFunction]:
    """Return a multiplier and the symbol its oracle uses.

    Imaginary powers are built as m(t) = t^(-2is) / Gamma(1 - 2is) so that the symbol at
    sqrt(lambda) is lambda^(is). Tables have no closed-form symbol and use a quadrature.
    """
    match config.kind:
        case MultiplierKindEnum.CONSTANT:
            mult = constant_multiplier(config.value)
        case MultiplierKindEnum.INDICATOR:
            mult = indicator_multiplier(config.cutoff)
        case MultiplierKindEnum.IMAGINARY_POWER:
            mult = imaginary_power_multiplier(-2 * config.s)
        case MultiplierKindEnum.TABLE:
            mult = table_multiplier(config.times, config.values)
            return mult, lambda z: symbol_by_quadrature(mult, z, quad)
    return mult, mult.symbol


def _relative_error(measures: np.ndarray, values: np.ndarray, reference: np.ndarray) -> float:
    return mu_norm(measures, values - reference) / mu_norm(measures, reference)


def run_multiplier(context: RunContext) -> None:
    """Apply every multiplier by quadrature and compare with the oracle."""
    params: MultiplierParams = context.config.experiment
    spec = context.spectrum
    measures = spec.measures
    quad = calculus_quadrature(context)
    functions = [context.rng.standard_normal(spec.n_modes) for _ in range(params.n_functions)]

    rows = []
    for config in params.multipliers:
        mult, symbol = build_multiplier(config, quad)
        worst = 0.0
        for trial, f in enumerate(functions):
            values, diagnostics = apply_laplace_multiplier(spec, mult, f, quad)
            error = _relative_error(measures, values, multiplier_oracle(spec, symbol, f))
            worst = max(worst, error)
            rows.append((mult.name, trial, error, diagnostics.n_nodes, diagnostics.doublings))
        context.check_at_most(f"oracle_{mult.name}", worst, params.tolerance)
        context.note(f"{mult.name}: worst relative error {worst:.3e}")

        if config.kind != MultiplierKindEnum.IMAGINARY_POWER:
            continue
        s = config.s
        isometry, inverse_oracle, inverse_quadrature = 0.0, 0.0, 0.0
        for f in functions:
            centered = f - spec.zero_mode_projection(f)
            power = imaginary_power(spec, s, f)
            isometry = max(
                isometry, abs(mu_norm(measures, power) / mu_norm(measures, centered) - 1.0)
            )
            back = imaginary_power(spec, -s, power)
            inverse_oracle = max(inverse_oracle, _relative_error(measures, back, centered))
            back_quadrature = imaginary_power(
                spec, -s, imaginary_power(spec, s, f, CalculusMethodEnum.QUADRATURE, quad),
                CalculusMethodEnum.QUADRATURE, quad,
            )
            inverse_quadrature = max(
                inverse_quadrature, _relative_error(measures, back_quadrature, centered)
            )
        context.check_at_most(f"isometry_s={s}", isometry, params.unitarity_tolerance)
        context.check_at_most(f"inverse_oracle_s={s}", inverse_oracle, params.unitarity_tolerance)
        context.check_at_most(f"inverse_quadrature_s={s}", inverse_quadrature, params.tolerance)
    context.writer.write_csv(
        "multiplier_errors.csv",
        ["multiplier", "trial", "relative_error", "n_nodes", "doublings"],
        rows,
    )


def run_g_function(context: RunContext) -> None:
    """Check ||g(f)|| = sqrt(Gamma(2 kappa) / 4^kappa) ||(I - P0) f|| on random functions."""
    params: GFunctionParams = context.config.experiment
    spec = context.spectrum
    measures = spec.measures
    quad = calculus_quadrature(context)
    rows = []
    for kappa in params.kappas:
        constant = g_function_constant(kappa)
        worst = 0.0
        for trial in range(params.n_functions):
            f = context.rng.standard_normal(spec.n_modes)
            values, _ = g_function(spec, f, kappa, quad)
            norm = mu_norm(measures, values)
            expected = constant * mu_norm(measures, f - spec.zero_mode_projection(f))
            error = abs(norm / expected - 1.0)
            worst = max(worst, error)
            rows.append((kappa, trial, norm, expected, error))
        context.check_at_most(f"g_norm_kappa={kappa}", worst, params.tolerance)
        context.note(f"kappa={kappa}: constant {constant:.6f}, worst relative error {worst:.3e}")
    context.writer.write_csv(
        "g_function.csv", ["kappa", "trial", "norm", "expected", "relative_error"], rows
    )
