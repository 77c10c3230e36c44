"""Heat and Poisson kernels by the spectral oracle and by subordination quadrature.

The Poisson kernels are those of (t sqrt(L))^k exp(-t sqrt(L)). The subordination route
integrates heat kernels against time derivatives of a Gaussian:

    P_{t,k} = (-1)^(k+1) t^k / sqrt(pi) * int_0^inf d_t^(k+1) exp(-t^2 / 4v) H_v dv / sqrt(v)

which for k = 0 is the classical identity exp(-t sqrt(lambda)) =
t / (2 sqrt(pi)) int exp(-t^2/4v) exp(-v lambda) v^(-3/2) dv.
"""

import csv
import logging
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
from numpy.polynomial import hermite
from scipy.optimize import minimize_scalar

from two_ends_kernels.enums.base_enums import KernelKindEnum
from two_ends_kernels.exceptions import (
    DerivativeOrderError,
    QuadratureNonConvergenceError,
    SectorViolationError,
)
from two_ends_kernels.schemas.quadrature_schemas import QuadratureDiagnostics, QuadratureSpec
from two_ends_kernels.spectral.operators import SpectralData
from two_ends_kernels.spectral.quadrature import log_grid_quadrature

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 8
# exp(-LEFT_TAIL_EXPONENT) is the left truncation level of the Gaussian factor
LEFT_TAIL_EXPONENT = 60.0
RIGHT_TAIL_EXPONENT = 40.0
NODE_CHUNK = 1024
KERNEL_CSV_MAX_SITES = 2000
# Points within this angle of the sector edge count as on the edge
SECTOR_EDGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Kernel values K(x, y) of a semigroup operator at one time.

    The operator acts as (Kf)(x) = sum_y K(x, y) f(y) mu_y.
    """

    values: np.ndarray
    time: float | complex
    order: int
    kind: KernelKindEnum
    measures: np.ndarray

    @property
    def n_sites(self) -> int:
        """Return the number of sites."""
        return int(self.values.shape[0])

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Return the action of the kernel on a site vector."""
        return self.values @ (self.measures * f)

    def compose(self, other: "KernelMatrix") -> np.ndarray:
        """Return the kernel of the composition of two operators."""
        return (self.values * self.measures[None, :]) @ other.values

    def row_mass(self) -> np.ndarray:
        """Return sum_y K(x, y) mu_y for every x."""
        return self.values @ self.measures

    def symmetry_error(self) -> float:
        """Return max |K(x, y) - K(y, x)|."""
        return float(np.max(np.abs(self.values - self.values.T)))


class HeatProvider(Protocol):
    """Source of heat kernels H_v for arbitrary v > 0."""

    lambda_min_positive: float
    measures: np.ndarray | None

    def heat(self, v: float) -> np.ndarray:
        """Return the kernel of exp(-vL) with the stationary part removed."""
        ...

    @property
    def stationary(self) -> np.ndarray | None:
        """Return the limit of H_v as v grows (the zero-mode projector), if any."""
        ...


@dataclass(frozen=True, eq=False)
class SpectralHeatProvider:
    """Heat kernels synthesized from a spectral decomposition."""

    spec: SpectralData

    @property
    def lambda_min_positive(self) -> float:
        """Return the smallest positive eigenvalue."""
        return self.spec.lambda_min_positive

    @property
    def measures(self) -> np.ndarray:
        """Return the site measures."""
        return self.spec.measures

    def heat(self, v: float) -> np.ndarray:
        """Return the kernel of exp(-vL) restricted to the positive modes."""
        symbol = np.where(self.spec.zero_mask, 0.0, np.exp(-v * self.spec.eigenvalues))
        return self.spec.kernel_from_symbol(symbol)

    @property
    def stationary(self) -> np.ndarray | None:
        """Return the zero-mode projector kernel."""
        if not np.any(self.spec.zero_mask):
            return None
        return self.spec.kernel_from_symbol(self.spec.zero_mask.astype(float))


@dataclass(frozen=True, eq=False)
class CallableHeatProvider:
    """Heat kernels produced by an arbitrary callable v -> N x N array."""

    kernel: Callable[[float], np.ndarray]
    lambda_min_positive: float
    stationary_kernel: np.ndarray | None = None
    measures: np.ndarray | None = None

    def heat(self, v: float) -> np.ndarray:
        """Return the provided kernel minus its stationary part."""
        values = np.asarray(self.kernel(v))
        if self.stationary_kernel is None:
            return values
        return values - self.stationary_kernel

    @property
    def stationary(self) -> np.ndarray | None:
        """Return the stationary part given at construction."""
        return self.stationary_kernel


def heat_kernel(spec: SpectralData, t: float) -> KernelMatrix:
    """Return the heat kernel sum_j exp(-t lambda_j) phi_j(x) phi_j(y)."""
    if t <= 0:
        msg = f"heat time must be positive, got {t}"
        raise ValueError(msg)
    return KernelMatrix(
        values=spec.kernel_from_symbol(np.exp(-t * spec.eigenvalues)),
        time=t,
        order=0,
        kind=KernelKindEnum.HEAT,
        measures=spec.measures,
    )


def gaussian_time_derivative(
    t: float | complex | np.ndarray, s: float | np.ndarray, order: int
) -> np.ndarray:
    """Return the derivative of order ``order`` in t of exp(-t^2 / s).

    With u = t / sqrt(s) the derivative is s^(-order/2) (-1)^order H_order(u) exp(-u^2),
    H the physicists' Hermite polynomial. Complex t is allowed.
    """
    if not 1 <= order <= MAX_DERIVATIVE_ORDER:
        raise DerivativeOrderError(order=order, max_order=MAX_DERIVATIVE_ORDER)
    s = np.asarray(s, dtype=float)
    u = np.asarray(t) / np.sqrt(s)
    coefficients = np.zeros(order + 1)
    coefficients[order] = 1.0
    return s ** (-order / 2) * (-1) ** order * hermite.hermval(u, coefficients) * np.exp(-(u**2))


def fit_derivative_constant(order: int) -> float:
    """Return the smallest C with |d^order exp(-t^2/s)| <= C exp(-t^2/2s) s^(-order/2).

    The ratio only depends on u = t / sqrt(s) and equals |H_order(u)| exp(-u^2 / 2). Its grid
    maximum is polished by a bounded scalar search between the neighbouring grid nodes.
    """
    if not 1 <= order <= MAX_DERIVATIVE_ORDER:
        raise DerivativeOrderError(order=order, max_order=MAX_DERIVATIVE_ORDER)
    coefficients = np.zeros(order + 1)
    coefficients[order] = 1.0

    def ratio(u: np.ndarray | float) -> np.ndarray:
        return np.abs(hermite.hermval(u, coefficients)) * np.exp(-(np.asarray(u) ** 2) / 2)

    u = np.linspace(0.0, 12.0, 200_001)
    values = ratio(u)
    peak = int(np.argmax(values))
    bracket = (u[max(peak - 1, 0)], u[min(peak + 1, u.shape[0] - 1)])
    polished = minimize_scalar(
        lambda point: -float(ratio(point)),
        bounds=bracket,
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(values[peak], -polished.fun) * (1 + 1e-9))


def poisson_symbol(eigenvalues: np.ndarray, z: float | complex, k: int) -> np.ndarray:
    """Return (z sqrt(lambda))^k exp(-z sqrt(lambda)); at lambda = 0 this is 1 for k = 0 else 0."""
    roots = np.sqrt(eigenvalues)
    return (z * roots) ** k * np.exp(-z * roots)


def poisson_kernel_spectral(spec: SpectralData, t: float, k: int) -> KernelMatrix:
    """Return the kernel of (t sqrt(L))^k exp(-t sqrt(L)) by spectral synthesis."""
    if t <= 0 or k < 0:
        msg = f"Poisson kernel needs t > 0 and k >= 0, got t={t}, k={k}"
        raise ValueError(msg)
    return KernelMatrix(
        values=spec.kernel_from_symbol(poisson_symbol(spec.eigenvalues, t, k)),
        time=t,
        order=k,
        kind=KernelKindEnum.POISSON,
        measures=spec.measures,
    )


def check_sector(z: complex) -> None:
    """Raise unless 0 < |z| and |arg z| < pi/4."""
    if z == 0 or abs(np.angle(z)) >= np.pi / 4 - SECTOR_EDGE_TOL:
        raise SectorViolationError(z)


def sector_majorant_time(z: complex) -> tuple[float, float]:
    """Return (s, factor) with |P_{z,0}| <= factor * P_{s,0} entrywise for positive heat kernels.

    Subordination with complex time bounds |exp(-z^2/4v)| by exp(-s^2/4v) where
    s^2 = Re z^2, so s = |z| sqrt(cos 2 arg z) and factor = |z| / s.
    """
    check_sector(z)
    cos_double = float(np.cos(2 * np.angle(z)))
    s = abs(z) * np.sqrt(cos_double)
    return float(s), float(1 / np.sqrt(cos_double))


def _subordination_window(z: float | complex, lambda_min_positive: float, quad: QuadratureSpec):
    """Return the truncation window in u = log v."""
    re_square = float(np.real(z * z))
    v_min = quad.v_min or re_square / (4 * LEFT_TAIL_EXPONENT)
    v_max = quad.v_max or RIGHT_TAIL_EXPONENT / lambda_min_positive
    return np.log(v_min), np.log(max(v_max, 10 * v_min))


def _subordination_weights(z: float | complex, k: int, u: np.ndarray) -> np.ndarray:
    """Return the factor of H_v in the log-grid integrand at nodes u."""
    v = np.exp(u)
    prefactor = (-1) ** (k + 1) * z**k / np.sqrt(np.pi)
    return prefactor * gaussian_time_derivative(z, 4 * v, k + 1) * np.sqrt(v)


def subordinate_scalars(
    eigenvalues: np.ndarray, z: float | complex, k: int, quad: QuadratureSpec
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    """Return the subordination quadrature of (z sqrt(lambda))^k exp(-z sqrt(lambda)).

    Zero eigenvalues are not integrated: their value is 1 for k = 0 and 0 otherwise.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    positive = eigenvalues > 0
    result = np.zeros(eigenvalues.shape, dtype=complex if np.iscomplexobj(z) else float)
    if k == 0:
        result[~positive] = 1.0
    if not np.any(positive):
        window = _subordination_window(z, 1.0, quad)
        diagnostics = QuadratureDiagnostics(
            what="zero modes only",
            n_nodes=0,
            doublings=0,
            lower=float(np.exp(window[0])),
            upper=float(np.exp(window[1])),
            last_change=0.0,
            tail_left=0.0,
            tail_right=0.0,
        )
        return result, diagnostics
    lambdas = eigenvalues[positive]

    def weighted_sum(u: np.ndarray, w: np.ndarray) -> np.ndarray:
        total = np.zeros(lambdas.shape, dtype=result.dtype)
        for start in range(0, u.shape[0], NODE_CHUNK):
            nodes = u[start : start + NODE_CHUNK]
            factor = w[start : start + NODE_CHUNK] * _subordination_weights(z, k, nodes)
            total = total + factor @ np.exp(-np.exp(nodes)[:, None] * lambdas[None, :])
        return total

    window = _subordination_window(z, float(lambdas.min()), quad)
    values, diagnostics = log_grid_quadrature(
        weighted_sum, window, quad, what=f"subordination (z={z}, k={k})"
    )
    result[positive] = values
    return result, diagnostics


def poisson_kernel_subordination(
    heat_provider: HeatProvider, t: float, k: int, quad: QuadratureSpec | None = None
) -> tuple[KernelMatrix, QuadratureDiagnostics]:
    """Return the Poisson kernel P_{t,k} by quadrature of the subordination formula.

    A :class:`SpectralHeatProvider` takes the fast path: the quadrature runs per eigenvalue
    and the kernel is synthesized once. Any other provider is integrated matrix-wise.
    """
    if t <= 0 or k < 0:
        msg = f"Poisson kernel needs t > 0 and k >= 0, got t={t}, k={k}"
        raise ValueError(msg)
    return _subordinate(heat_provider, t, k, quad or QuadratureSpec())


def _subordinate(
    heat_provider: HeatProvider, z: float | complex, k: int, quad: QuadratureSpec
) -> tuple[KernelMatrix, QuadratureDiagnostics]:
    if isinstance(heat_provider, SpectralHeatProvider):
        spec = heat_provider.spec
        symbol, diagnostics = subordinate_scalars(spec.eigenvalues, z, k, quad)
        values = spec.kernel_from_symbol(symbol)
        measures = spec.measures
    else:
        values, diagnostics = _subordinate_matrices(heat_provider, z, k, quad)
        measures = heat_provider.measures
    kernel = KernelMatrix(
        values=values,
        time=z,
        order=k,
        kind=KernelKindEnum.POISSON,
        measures=measures if measures is not None else np.ones(values.shape[0]),
    )
    logger.debug(f"Subordinated Poisson kernel at z={z}, k={k}: {diagnostics.n_nodes} nodes")
    return kernel, diagnostics


def _subordinate_matrices(
    heat_provider: HeatProvider, z: float | complex, k: int, quad: QuadratureSpec
) -> tuple[np.ndarray, QuadratureDiagnostics]:
    def weighted_sum(u: np.ndarray, w: np.ndarray) -> np.ndarray:
        factors = w * _subordination_weights(z, k, u)
        total = None
        for factor, node in zip(factors, u, strict=True):
            term = factor * heat_provider.heat(float(np.exp(node)))
            total = term if total is None else total + term
        return total

    window = _subordination_window(z, heat_provider.lambda_min_positive, quad)
    values, diagnostics = log_grid_quadrature(
        weighted_sum, window, quad, what=f"matrix subordination (z={z}, k={k})"
    )
    stationary = heat_provider.stationary
    if k == 0 and stationary is not None:
        values = values + stationary
    return (values + values.T) / 2, diagnostics


def complex_poisson_kernel(
    source: SpectralData | HeatProvider,
    z: complex,
    k: int,
    quad: QuadratureSpec | None = None,
) -> tuple[KernelMatrix, QuadratureDiagnostics | None]:
    """Return the kernel of (z sqrt(L))^k exp(-z sqrt(L)) for z in the sector |arg z| < pi/4.

    Spectral data give the oracle kernel directly (no diagnostics); a heat provider goes
    through subordination with complex time. Real z reduces to the real Poisson kernel.
    """
    check_sector(z)
    if k < 0:
        msg = f"derivative order must be non-negative, got {k}"
        raise ValueError(msg)
    if np.imag(z) == 0:
        t = float(np.real(z))
        if isinstance(source, SpectralData):
            return poisson_kernel_spectral(source, t, k), None
        return poisson_kernel_subordination(source, t, k, quad)
    if isinstance(source, SpectralData):
        values = source.kernel_from_symbol(poisson_symbol(source.eigenvalues, z, k))
        kernel = KernelMatrix(
            values=values, time=z, order=k, kind=KernelKindEnum.POISSON, measures=source.measures
        )
        return kernel, None
    return _subordinate(source, complex(z), k, quad or QuadratureSpec())


def poisson_upper_via_heat(
    heat_bound_fn: Callable[[float], float],
    t: float,
    k: int,
    constant: float,
    quad: QuadratureSpec | None = None,
    v_cap: float = 1e12,
) -> tuple[float, QuadratureDiagnostics]:
    """Return the majorant C / (2^(k+1) sqrt(pi)) int exp(-t^2/8v) (t/sqrt(v))^k B(v) dv/v.

    ``heat_bound_fn`` maps v to an upper bound of |H_v(x, y)| at a fixed pair (x, y). The
    right end of the window is pushed out until the geometric tail beyond it falls below the
    tolerance, up to ``v_cap``.
    """
    quad = quad or QuadratureSpec()
    bound = np.vectorize(lambda v: abs(float(heat_bound_fn(float(v)))))

    def integrand(u: np.ndarray) -> np.ndarray:
        v = np.exp(u)
        return np.exp(-(t**2) / (8 * v)) * (t / np.sqrt(v)) ** k * bound(v)

    def weighted_sum(u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.atleast_1d(w @ integrand(u))

    u_min = np.log(t**2 / (8 * LEFT_TAIL_EXPONENT))
    u_max = np.log(max(100 * t**2, 100.0))
    prefactor = constant / (2 ** (k + 1) * np.sqrt(np.pi))
    tail = np.inf
    while u_max <= np.log(v_cap):
        value, diagnostics = log_grid_quadrature(
            weighted_sum, (u_min, u_max), quad, what=f"Poisson majorant (t={t}, k={k})"
        )
        ends = np.array([u_max - 1.0, u_max])
        last_values = integrand(ends)
        rate = np.log(last_values[0] / last_values[1]) if np.all(last_values > 0) else np.inf
        tail = last_values[1] / rate if rate > 0 else np.inf
        if tail <= quad.tolerance * max(1.0, float(value[0])):
            return float(prefactor * value[0]), diagnostics
        u_max += 0.5 * (u_max - u_min)
    raise QuadratureNonConvergenceError(
        what=f"Poisson majorant (t={t}, k={k})", last_change=float(tail), tail_estimates=(0.0, tail)
    )


def kernel_to_csv(
    kernel: KernelMatrix, path: Path, max_sites: int = KERNEL_CSV_MAX_SITES
) -> Path:
    """Write (x_id, y_id, value) triplets of a kernel; refused above ``max_sites`` sites."""
    if kernel.n_sites > max_sites:
        msg = f"kernel with {kernel.n_sites} sites exceeds the dump gate of {max_sites}"
        raise ValueError(msg)
    path.parent.mkdir(parents=True, exist_ok=True)
    is_complex = np.iscomplexobj(kernel.values)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x_id", "y_id", *(["real", "imag"] if is_complex else ["value"])])
        for x in range(kernel.n_sites):
            for y in range(kernel.n_sites):
                value = kernel.values[x, y]
                row = [x, y, repr(float(np.real(value)))]
                if is_complex:
                    row.append(repr(float(np.imag(value))))
                writer.writerow(row)
    logger.info(f"Kernel dump with {kernel.n_sites**2} entries written to {path}")
    return path
