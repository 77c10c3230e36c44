"""Spectral multipliers of Laplace transform type, imaginary powers and the g-function.

A multiplier is given by a bounded function m(t) and acts as

    M(sqrt(L)) f = int_0^inf sqrt(L) exp(-t sqrt(L)) f m(t) dt

whose symbol is M(z) = int_0^inf z exp(-tz) m(t) dt for z > 0 and M(0) = 0. Every
quadrature runs in u = log t, where the integrand becomes (t z) exp(-t z) m(t) du.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from two_ends_kernels.enums.base_enums import CalculusMethodEnum
from two_ends_kernels.schemas.quadrature_schemas import QuadratureDiagnostics, QuadratureSpec
from two_ends_kernels.spectral.operators import SpectralData
from two_ends_kernels.spectral.quadrature import log_grid_quadrature
from two_ends_kernels.spectral.semigroups import NODE_CHUNK, poisson_symbol

logger = logging.getLogger(__name__)

CALCULUS_TOLERANCE = 1e-6
LEFT_WINDOW = 1e-10
RIGHT_TAIL_EXPONENT = 40.0
# Nodes just left and right of a jump of m are nudged by this relative amount
ONE_SIDED_NUDGE = 1e-12

TimeFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MultiplierSpec:
    """Bounded time function m together with its symbol when known in closed form.

    ``breakpoints`` lists the times where m jumps or has a kink, ``oscillation`` the
    frequency of m in log t; both steer the quadrature.
    """

    name: str
    m_tilde: TimeFunction
    sup_bound: float
    symbol: TimeFunction | None = None
    breakpoints: tuple[float, ...] = field(default=())
    oscillation: float = 0.0


def _vanishing_at_zero(symbol: TimeFunction) -> TimeFunction:
    def wrapped(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        positive = np.where(z > 0, z, 1.0)
        return np.where(z > 0, symbol(positive), 0.0)

    return wrapped


def constant_multiplier(value: float = 1.0) -> MultiplierSpec:
    """Return m = value, whose symbol is the constant value on z > 0."""
    return MultiplierSpec(
        name=f"constant({value})",
        m_tilde=lambda t: np.full(np.shape(t), value, dtype=float),
        sup_bound=abs(value),
        symbol=_vanishing_at_zero(lambda z: np.full(np.shape(z), value, dtype=float)),
    )


def indicator_multiplier(cutoff: float) -> MultiplierSpec:
    """Return m = indicator of [0, cutoff], whose symbol is 1 - exp(-cutoff z)."""
    if cutoff <= 0:
        msg = f"indicator cutoff must be positive, got {cutoff}"
        raise ValueError(msg)
    return MultiplierSpec(
        name=f"indicator({cutoff})",
        m_tilde=lambda t: (np.asarray(t) <= cutoff).astype(float),
        sup_bound=1.0,
        symbol=lambda z: 1.0 - np.exp(-cutoff * np.asarray(z, dtype=float)),
        breakpoints=(cutoff,),
    )


def imaginary_power_multiplier(sigma: float) -> MultiplierSpec:
    """Return m = t^(i sigma) / Gamma(1 + i sigma), whose symbol is z^(-i sigma)."""
    normalization = gamma(1 + 1j * sigma)
    return MultiplierSpec(
        name=f"imaginary_power({sigma})",
        m_tilde=lambda t: np.exp(1j * sigma * np.log(t)) / normalization,
        sup_bound=float(1 / abs(normalization)),
        symbol=_vanishing_at_zero(lambda z: np.exp(-1j * sigma * np.log(z))),
        oscillation=abs(sigma),
    )


def table_multiplier(times: list[float], values: list[float]) -> MultiplierSpec:
    """Return the piecewise linear m through (times, values), constant beyond the ends."""
    times_array = np.asarray(times, dtype=float)
    values_array = np.asarray(values, dtype=float)
    if times_array.shape != values_array.shape or times_array.size < 2:  # noqa: PLR2004
        msg = "table multiplier needs at least two (time, value) samples of equal length"
        raise ValueError(msg)
    if np.any(times_array <= 0) or np.any(np.diff(times_array) <= 0):
        msg = "table times must be positive and strictly increasing"
        raise ValueError(msg)
    return MultiplierSpec(
        name=f"table({times_array.size} samples)",
        m_tilde=lambda t: np.interp(t, times_array, values_array),
        sup_bound=float(np.max(np.abs(values_array))),
        breakpoints=tuple(times_array.tolist()),
    )


def _one_sided_times(u: np.ndarray, breakpoints_u: np.ndarray) -> np.ndarray:
    """Return t = exp(u), moving duplicated breakpoint nodes to their own side."""
    t = np.exp(u)
    for breakpoint in breakpoints_u:
        duplicates = np.flatnonzero(u == breakpoint)
        if duplicates.size == 2:  # noqa: PLR2004
            t[duplicates[0]] *= 1 - ONE_SIDED_NUDGE
            t[duplicates[1]] *= 1 + ONE_SIDED_NUDGE
    return t


def _node_count(mult: MultiplierSpec, quad: QuadratureSpec) -> QuadratureSpec:
    n_nodes = max(quad.n_nodes, int(64 * (1 + mult.oscillation)))
    return quad.with_nodes(n_nodes)


def _laplace_coefficients(
    roots: np.ndarray, coefficients: np.ndarray, mult: MultiplierSpec, quad: QuadratureSpec
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    """Return int (t z) exp(-t z) m(t) du times the coefficients, for each positive root z."""
    u_window = (
        float(np.log(LEFT_WINDOW / roots.max())),
        float(np.log(RIGHT_TAIL_EXPONENT / roots.min())),
    )
    breakpoints_u = np.log(np.asarray(mult.breakpoints, dtype=float))

    def weighted_sum(u: np.ndarray, w: np.ndarray) -> np.ndarray:
        total = np.zeros(roots.shape, dtype=complex)
        for start in range(0, u.shape[0], NODE_CHUNK):
            nodes = u[start : start + NODE_CHUNK]
            t = _one_sided_times(nodes, breakpoints_u)
            factor = w[start : start + NODE_CHUNK] * mult.m_tilde(t)
            total = total + factor @ poisson_symbol(roots**2, t[:, None], 1)
        return total * coefficients

    return log_grid_quadrature(
        weighted_sum,
        u_window,
        _node_count(mult, quad),
        what=f"multiplier {mult.name}",
        breakpoints=breakpoints_u.tolist(),
    )


def symbol_by_quadrature(
    mult: MultiplierSpec, z: np.ndarray, quad: QuadratureSpec | None = None
) -> np.ndarray:
    """Return the symbol of a multiplier at z >= 0 by quadrature of its defining integral."""
    quad = quad or QuadratureSpec(tolerance=CALCULUS_TOLERANCE)
    z = np.asarray(z, dtype=float)
    result = np.zeros(z.shape, dtype=complex)
    positive = z > 0
    if np.any(positive):
        values, _ = _laplace_coefficients(z[positive], np.ones(int(positive.sum())), mult, quad)
        result[positive] = values
    return result


def multiplier_oracle(spec: SpectralData, symbol: TimeFunction, f: np.ndarray) -> np.ndarray:
    """Return sum_j symbol(sqrt(lambda_j)) <f, phi_j> phi_j.

    The symbol is evaluated at every sqrt(lambda_j), zero modes included, so it decides its
    own value at 0.
    """
    return spec.apply_symbol(np.asarray(symbol(np.sqrt(spec.eigenvalues))), f)


def apply_laplace_multiplier(
    spec: SpectralData, mult: MultiplierSpec, f: np.ndarray, quad: QuadratureSpec | None = None
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    """Return M(sqrt(L)) f by time quadrature over the Poisson symbols of order one."""
    quad = quad or QuadratureSpec(tolerance=CALCULUS_TOLERANCE)
    positive = ~spec.zero_mask
    coefficients = spec.coefficients(f)
    weighted, diagnostics = _laplace_coefficients(
        np.sqrt(spec.eigenvalues[positive]), coefficients[positive], mult, quad
    )
    full = np.zeros(spec.n_modes, dtype=complex)
    full[positive] = weighted
    result = spec.synthesize(full)
    logger.debug(f"Applied {mult.name} with {diagnostics.n_nodes} nodes")
    if np.isrealobj(f) and np.max(np.abs(result.imag)) <= CALCULUS_TOLERANCE * max(
        1.0, float(np.max(np.abs(result)))
    ):
        return result.real, diagnostics
    return result, diagnostics


def imaginary_power(
    spec: SpectralData,
    s: float,
    f: np.ndarray,
    method: CalculusMethodEnum = CalculusMethodEnum.ORACLE,
    quad: QuadratureSpec | None = None,
) -> np.ndarray:
    """Return L^(is) f, with lambda^(is) on positive modes and 0 on the zero modes.

    The quadrature route uses m(t) = t^(-2is) / Gamma(1 - 2is), whose symbol at
    z = sqrt(lambda) is exactly lambda^(is).
    """
    if method == CalculusMethodEnum.ORACLE:
        positive = ~spec.zero_mask
        symbol = np.zeros(spec.n_modes, dtype=complex)
        symbol[positive] = np.exp(1j * s * np.log(spec.eigenvalues[positive]))
        return spec.apply_symbol(symbol, f)
    result, _ = apply_laplace_multiplier(spec, imaginary_power_multiplier(-2 * s), f, quad)
    return np.asarray(result, dtype=complex)


def g_function_constant(kappa: int) -> float:
    """Return (int_0^inf (u^kappa exp(-u))^2 du/u)^(1/2) = sqrt(Gamma(2 kappa) / 2^(2 kappa))."""
    return float(np.sqrt(gamma(2 * kappa) / 2 ** (2 * kappa)))


def g_function(
    spec: SpectralData, f: np.ndarray, kappa: int = 1, quad: QuadratureSpec | None = None
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    """Return the square function (int |(t sqrt(L))^kappa exp(-t sqrt(L)) f|^2 dt/t)^(1/2)."""
    if kappa < 1:
        msg = f"kappa must be at least 1, got {kappa}"
        raise ValueError(msg)
    quad = quad or QuadratureSpec(tolerance=CALCULUS_TOLERANCE)
    positive = ~spec.zero_mask
    if not np.any(positive):
        msg = "g-function needs at least one positive eigenvalue"
        raise ValueError(msg)
    lambdas = spec.eigenvalues[positive]
    roots = np.sqrt(lambdas)
    coefficients = spec.coefficients(f)[positive]
    eigenvectors = spec.eigenvectors[:, positive]
    u_window = (
        float(np.log(LEFT_WINDOW / roots.max())),
        float(np.log((RIGHT_TAIL_EXPONENT + 4 * kappa) / roots.min())),
    )

    def weighted_sum(u: np.ndarray, w: np.ndarray) -> np.ndarray:
        total = np.zeros(eigenvectors.shape[0])
        for start in range(0, u.shape[0], NODE_CHUNK):
            t = np.exp(u[start : start + NODE_CHUNK])
            modes = poisson_symbol(lambdas, t[:, None], kappa) * coefficients[None, :]
            values = eigenvectors @ modes.T
            total = total + np.abs(values) ** 2 @ w[start : start + NODE_CHUNK]
        return total

    squares, diagnostics = log_grid_quadrature(
        weighted_sum, u_window, quad, what=f"g-function (kappa={kappa})"
    )
    return np.sqrt(np.maximum(squares, 0.0)), diagnostics
