"""Tests for Laplace-transform multipliers, imaginary powers and the g-function."""

import numpy as np
import pytest

from two_ends_kernels.enums.base_enums import CalculusMethodEnum
from two_ends_kernels.spectral.functional_calculus import (
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
from two_ends_kernels.spectral.operators import SpectralData, mu_norm

F_TOY = np.array([1.5, -2.0, 0.5, 3.0])


def _relative_error(values: np.ndarray, reference: np.ndarray) -> float:
    """Relative max-norm error."""
    return float(np.max(np.abs(values - reference)) / np.max(np.abs(reference)))


def test_constant_symbol_vanishes_at_zero() -> None:
    """M(z) = value for z > 0 and M(0) = 0."""
    mult = constant_multiplier(2.0)
    assert mult.symbol(np.array([0.0, 0.5, 3.0])).tolist() == [0.0, 2.0, 2.0]
    assert mult.sup_bound == 2.0


def test_multiplier_constructors_validate_input() -> None:
    """Indicator cutoffs are positive and table samples are increasing and matched."""
    with pytest.raises(ValueError, match="cutoff"):
        indicator_multiplier(0.0)
    with pytest.raises(ValueError, match="two"):
        table_multiplier([1.0], [1.0])
    with pytest.raises(ValueError, match="increasing"):
        table_multiplier([2.0, 1.0], [0.0, 1.0])


def test_symbol_by_quadrature_recovers_closed_forms() -> None:
    """The defining integral reproduces the constant and indicator symbols."""
    z = np.array([0.0, 0.5, 2.0])
    constant = symbol_by_quadrature(constant_multiplier(1.0), z)
    assert np.allclose(constant, [0.0, 1.0, 1.0], atol=1e-5)
    indicator = indicator_multiplier(2.0)
    assert np.allclose(symbol_by_quadrature(indicator, z), indicator.symbol(z) * (z > 0), atol=1e-5)


@pytest.mark.parametrize(
    "mult", [constant_multiplier(1.0), indicator_multiplier(2.0)], ids=["constant", "indicator"]
)
def test_laplace_multiplier_matches_oracle(toy_spectrum: SpectralData, mult) -> None:
    """Quadrature over Poisson symbols agrees with the spectral oracle."""
    values, diagnostics = apply_laplace_multiplier(toy_spectrum, mult, F_TOY)
    expected = multiplier_oracle(toy_spectrum, mult.symbol, F_TOY)
    assert _relative_error(values, expected) <= 1e-5
    assert diagnostics.n_nodes > 0


def test_table_multiplier_through_the_symbol_quadrature(toy_spectrum: SpectralData) -> None:
    """A table multiplier applied directly matches its quadrature symbol."""
    mult = table_multiplier([0.5, 1.0, 4.0], [1.0, 0.0, 2.0])
    values, _ = apply_laplace_multiplier(toy_spectrum, mult, F_TOY)
    expected = multiplier_oracle(toy_spectrum, lambda z: symbol_by_quadrature(mult, z), F_TOY)
    assert _relative_error(values, expected) <= 1e-5


def test_imaginary_power_is_an_isometry_off_the_zero_mode(small_spectrum: SpectralData) -> None:
    """||L^(is) f|| = ||(I - P0) f|| and L^(-is) inverts L^(is)."""
    f = np.random.default_rng(3).standard_normal(small_spectrum.n_modes)
    centered = f - small_spectrum.zero_mode_projection(f)
    power = imaginary_power(small_spectrum, 1.0, f)
    measures = small_spectrum.measures
    assert mu_norm(measures, power) == pytest.approx(mu_norm(measures, centered), rel=1e-10)
    back = imaginary_power(small_spectrum, -1.0, power)
    assert np.allclose(back, centered, atol=1e-9)


def test_imaginary_power_quadrature_matches_oracle(toy_spectrum: SpectralData) -> None:
    """The quadrature route with sigma = -2s reproduces lambda^(is)."""
    oracle = imaginary_power(toy_spectrum, 0.5, F_TOY)
    quadrature = imaginary_power(toy_spectrum, 0.5, F_TOY, CalculusMethodEnum.QUADRATURE)
    assert _relative_error(quadrature, oracle) <= 1e-4


def test_imaginary_power_multiplier_bound() -> None:
    """sup |m| = 1 / |Gamma(1 + i sigma)| and the symbol has modulus one."""
    mult = imaginary_power_multiplier(1.0)
    assert mult.sup_bound > 1
    assert np.allclose(np.abs(mult.symbol(np.array([0.3, 2.0]))), 1.0)
    assert mult.oscillation == 1.0


@pytest.mark.parametrize(("kappa", "expected"), [(1, 0.5), (2, np.sqrt(6 / 16))])
def test_g_function_constant(kappa: int, expected: float) -> None:
    """C_kappa = sqrt(Gamma(2 kappa) / 4^kappa)."""
    assert g_function_constant(kappa) == pytest.approx(expected)


@pytest.mark.parametrize("kappa", [1, 2])
def test_g_function_norm_identity(toy_spectrum: SpectralData, kappa: int) -> None:
    """||g(f)|| = C_kappa ||(I - P0) f||, here mode by mode."""
    values, _ = g_function(toy_spectrum, F_TOY, kappa)
    expected = g_function_constant(kappa) * np.abs(F_TOY * (toy_spectrum.eigenvalues > 0))
    assert np.allclose(values, expected, atol=1e-5)


def test_g_function_rejects_kappa_zero(toy_spectrum: SpectralData) -> None:
    """kappa starts at 1."""
    with pytest.raises(ValueError, match="kappa"):
        g_function(toy_spectrum, F_TOY, 0)
