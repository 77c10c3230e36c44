"""Heat semigroup checks and subordination against the spectral oracle."""

import logging
from itertools import pairwise

import numpy as np

from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.enums.base_enums import OperatorKindEnum
from two_ends_kernels.schemas.experiment_schemas import HeatCheckParams, PoissonCheckParams
from two_ends_kernels.spectral.operators import export_spectrum_csv
from two_ends_kernels.spectral.semigroups import (
    SpectralHeatProvider,
    complex_poisson_kernel,
    heat_kernel,
    kernel_to_csv,
    poisson_kernel_spectral,
    poisson_kernel_subordination,
    subordinate_scalars,
)

logger = logging.getLogger(__name__)

SCALAR_TIMES = (0.1, 1.0, 10.0)
SCALAR_EIGENVALUES = (0.01, 1.0, 100.0)


def _relative_deviation(values: np.ndarray, reference: np.ndarray) -> tuple[float, float]:
    deviation = float(np.max(np.abs(values - reference)))
    return deviation, deviation / float(np.max(np.abs(reference)))


def run_heat_check(context: RunContext) -> None:
    """Check symmetry, the semigroup law and conservation of mass of the heat kernel."""
    params: HeatCheckParams = context.config.experiment
    spec = context.spectrum
    times = sorted(params.times)
    kernels = {t: heat_kernel(spec, t) for t in times}
    pure_laplacian = context.config.operator.kind == OperatorKindEnum.LAPLACIAN

    rows = []
    for t in times:
        kernel = kernels[t]
        symmetry = kernel.symmetry_error() / float(np.max(np.abs(kernel.values)))
        masses = kernel.row_mass()
        # Schrodinger semigroups are only sub-Markovian
        if pure_laplacian:
            mass_error = float(np.max(np.abs(masses - 1.0)))
        else:
            mass_error = float(max(0.0, masses.max() - 1.0))
        rows.append((t, "", "", mass_error, symmetry))
        context.check_at_most(f"symmetry_t={t}", symmetry, params.symmetry_tolerance)
        context.check_at_most(f"mass_t={t}", mass_error, params.mass_tolerance)
    for t, s in pairwise(times):
        composed = kernels[t].compose(kernels[s])
        _, relative = _relative_deviation(composed, heat_kernel(spec, t + s).values)
        rows.append((t, s, relative, "", ""))
        context.check_at_most(f"semigroup_t={t}_s={s}", relative, params.semigroup_tolerance)
    context.writer.write_csv(
        "heat_checks.csv", ["t", "s", "semigroup_error", "mass_error", "symmetry_error"], rows
    )
    if params.dump_spectrum:
        context.writer.register(export_spectrum_csv(spec, context.writer.path("spectrum.csv")))
    if params.dump_kernel:
        path = context.writer.path("heat_kernel.csv")
        context.writer.register(kernel_to_csv(kernels[times[0]], path))
    context.note(f"heat kernel checked at t in {times} on {spec.n_modes} sites")


def run_poisson_check(context: RunContext) -> None:
    """Compare subordinated Poisson kernels with the spectral oracle."""
    params: PoissonCheckParams = context.config.experiment
    spec = context.spectrum
    provider = SpectralHeatProvider(spec)
    quad = context.config.quadrature

    scalar_quad = quad.with_tolerance(min(quad.tolerance, params.scalar_tolerance / 10))
    eigenvalues = np.array(SCALAR_EIGENVALUES)
    scalar_error = 0.0
    for t in SCALAR_TIMES:
        values, _ = subordinate_scalars(eigenvalues, t, 0, scalar_quad)
        exact = np.exp(-t * np.sqrt(eigenvalues))
        scalar_error = max(scalar_error, float(np.max(np.abs(values - exact))))
    context.check_at_most("scalar_subordination", scalar_error, params.scalar_tolerance)

    rows, diagnostics = [], []
    worst = 0.0
    for t in params.times:
        for k in params.orders:
            oracle = poisson_kernel_spectral(spec, t, k)
            kernel, diag = poisson_kernel_subordination(provider, t, k, quad)
            deviation, relative = _relative_deviation(kernel.values, oracle.values)
            worst = max(worst, relative)
            rows.append((t, 0.0, k, deviation, relative, diag.n_nodes, diag.doublings))
            diagnostics.append(diag)
            context.check_at_most(f"subordination_t={t}_k={k}", relative, params.tolerance)
    for modulus, argument in params.sector_points:
        z = modulus * np.exp(1j * argument)
        for k in params.orders:
            oracle, _ = complex_poisson_kernel(spec, z, k)
            kernel, diag = complex_poisson_kernel(provider, z, k, quad)
            deviation, relative = _relative_deviation(kernel.values, oracle.values)
            worst = max(worst, relative)
            rows.append((modulus, argument, k, deviation, relative, diag.n_nodes, diag.doublings))
            diagnostics.append(diag)
            name = f"sector_z={modulus}@{argument}_k={k}"
            context.check_at_most(name, relative, params.tolerance)
    context.writer.write_csv(
        "poisson_deviation.csv",
        [
            "modulus",
            "argument",
            "k",
            "max_abs_deviation",
            "relative_deviation",
            "n_nodes",
            "doublings",
        ],
        rows,
    )
    context.writer.write_json("quadrature_diagnostics.json", diagnostics)
    context.note(f"largest subordination deviation relative to the oracle: {worst:.3e}")
    context.note(f"largest scalar subordination error: {scalar_error:.3e}")
