"""Tests for the log-grid trapezoid engine."""

import numpy as np
import pytest

from two_ends_kernels.exceptions import InvalidQuadratureSpecError, QuadratureNonConvergenceError
from two_ends_kernels.schemas.quadrature_schemas import QuadratureSpec
from two_ends_kernels.spectral.quadrature import log_grid_quadrature, trapezoid_rule


def _exponential_density(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted sum of exp(-v) dv written in u = log v."""
    v = np.exp(u)
    return np.atleast_1d(w @ (v * np.exp(-v)))


def test_trapezoid_weights_sum_to_the_length() -> None:
    """Weights of a composite rule integrate constants exactly."""
    nodes, weights = trapezoid_rule(-2.0, 3.0, 64, breakpoints=(0.5,))
    assert weights.sum() == pytest.approx(5.0)
    # Pieces share the breakpoint node
    assert int(np.sum(nodes == 0.5)) == 2


def test_refinement_halves_the_step() -> None:
    """Each refinement level doubles the interval count of every piece."""
    coarse, _ = trapezoid_rule(0.0, 1.0, 32)
    fine, _ = trapezoid_rule(0.0, 1.0, 32, refinement=1)
    assert fine.shape[0] - 1 == 2 * (coarse.shape[0] - 1)


def test_log_grid_quadrature_integrates_the_exponential() -> None:
    """int_0^inf exp(-v) dv = 1 up to the truncated tails."""
    quad = QuadratureSpec(tolerance=1e-10)
    value, diagnostics = log_grid_quadrature(
        _exponential_density, (np.log(1e-14), np.log(60.0)), quad, what="exp"
    )
    assert value[0] == pytest.approx(1.0, abs=1e-9)
    assert diagnostics.what == "exp"
    assert diagnostics.lower == pytest.approx(1e-14)
    assert diagnostics.doublings >= 1


def test_log_grid_quadrature_reports_non_convergence() -> None:
    """Without any doubling the rule cannot certify convergence."""
    quad = QuadratureSpec(max_doublings=0)
    with pytest.raises(QuadratureNonConvergenceError):
        log_grid_quadrature(_exponential_density, (-5.0, 3.0), quad, what="exp")


def test_quadrature_spec_window_must_be_ordered() -> None:
    """v_min must stay below v_max."""
    with pytest.raises(InvalidQuadratureSpecError):
        QuadratureSpec(v_min=2.0, v_max=1.0)
    assert QuadratureSpec().with_nodes(8).n_nodes == 32
    assert QuadratureSpec().with_tolerance(1e-3).tolerance == 1e-3
