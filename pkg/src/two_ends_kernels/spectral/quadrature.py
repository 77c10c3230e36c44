"""Composite trapezoid rules on logarithmic grids with node doubling."""

import logging
from collections.abc import Callable, Sequence

import numpy as np

from two_ends_kernels.exceptions import QuadratureNonConvergenceError
from two_ends_kernels.schemas.quadrature_schemas import QuadratureDiagnostics, QuadratureSpec

logger = logging.getLogger(__name__)

MIN_INTERVALS_PER_PIECE = 16

# Called with (u nodes, trapezoid weights), returns sum_i w_i F(u_i)
WeightedSum = Callable[[np.ndarray, np.ndarray], np.ndarray]


def trapezoid_rule(
    u_min: float,
    u_max: float,
    n_nodes: int,
    breakpoints: Sequence[float] = (),
    refinement: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Return nodes and weights of a composite trapezoid rule on [u_min, u_max].

    Interior breakpoints split the interval into pieces with uniform rules; pieces share
    their end nodes, which therefore appear twice. The base rule spreads about ``n_nodes``
    intervals in proportion to piece lengths and each refinement halves every step.
    """
    cuts = sorted({u_min, u_max, *(b for b in breakpoints if u_min < b < u_max)})
    total = u_max - u_min
    nodes, weights = [], []
    for left, right in zip(cuts[:-1], cuts[1:], strict=True):
        base = max(MIN_INTERVALS_PER_PIECE, int(np.ceil(n_nodes * (right - left) / total)))
        n_intervals = base * 2**refinement
        piece = np.linspace(left, right, n_intervals + 1)
        step = (right - left) / n_intervals
        piece_weights = np.full(n_intervals + 1, step)
        piece_weights[[0, -1]] = step / 2
        nodes.append(piece)
        weights.append(piece_weights)
    return np.concatenate(nodes), np.concatenate(weights)


def _max_abs(value: np.ndarray) -> float:
    return float(np.max(np.abs(value)))


def log_grid_quadrature(
    weighted_sum: WeightedSum,
    u_window: tuple[float, float],
    quad: QuadratureSpec,
    what: str,
    breakpoints: Sequence[float] = (),
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    """Integrate over u = log v on a truncated window, doubling nodes until stable.

    The rule stops when successive estimates differ by less than
    ``quad.tolerance * max(1, |estimate|)`` in the max norm. With interior breakpoints the
    integrand is only piecewise smooth and the estimates are Richardson extrapolations of
    consecutive trapezoid sums.

    Raises
    ------
    QuadratureNonConvergenceError
        When ``quad.max_doublings`` doublings do not settle the estimate.
    """
    u_min, u_max = u_window
    tail_left = _max_abs(weighted_sum(np.array([u_min]), np.ones(1)))
    tail_right = _max_abs(weighted_sum(np.array([u_max]), np.ones(1)))
    extrapolate = any(u_min < b < u_max for b in breakpoints)

    def trapezoid(refinement: int) -> tuple[np.ndarray, int]:
        nodes, weights = trapezoid_rule(u_min, u_max, quad.n_nodes, breakpoints, refinement)
        return weighted_sum(nodes, weights), int(nodes.shape[0])

    coarse, n_nodes = trapezoid(0)
    estimate = coarse
    change = np.inf
    for doubling in range(1, quad.max_doublings + 1):
        fine, n_nodes = trapezoid(doubling)
        refined = (4 * fine - coarse) / 3 if extrapolate else fine
        change = _max_abs(refined - estimate)
        coarse, estimate = fine, refined
        if doubling > int(extrapolate) and change <= quad.tolerance * max(
            1.0, _max_abs(estimate)
        ):
            diagnostics = QuadratureDiagnostics(
                what=what,
                n_nodes=n_nodes,
                doublings=doubling,
                lower=float(np.exp(u_min)),
                upper=float(np.exp(u_max)),
                last_change=change,
                tail_left=tail_left,
                tail_right=tail_right,
            )
            logger.debug(f"Quadrature for {what} converged: {diagnostics}")
            return estimate, diagnostics
    raise QuadratureNonConvergenceError(
        what=what, last_change=change, tail_estimates=(tail_left, tail_right)
    )
