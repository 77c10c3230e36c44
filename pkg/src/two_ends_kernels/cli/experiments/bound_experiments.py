"""Kernel bound fits, Trotter domination and approximation to the identity."""

import logging
from collections.abc import Mapping, Sequence

import numpy as np

from two_ends_kernels.analysis.bounds import (
    TROTTER_TOL,
    BoundEvaluator,
    HeatBoundEvaluator,
    KernelSample,
    PoissonBoundEvaluator,
    check_approx_identity,
    check_bounds,
    check_gaussian_type_domination,
    fit_and_check_bounds,
    on_diagonal_decay_slope,
    sample_kernels,
    sample_sector_kernels,
    small_end_site_at_abs,
)
from two_ends_kernels.cli.context import RunContext
from two_ends_kernels.enums.base_enums import KernelKindEnum
from two_ends_kernels.schemas.bound_schemas import POISSON_CASES, BoundFitReport
from two_ends_kernels.schemas.experiment_schemas import BoundsFitParams, DominationParams
from two_ends_kernels.spectral.operators import spectral_decompose
from two_ends_kernels.spectral.semigroups import (
    KernelMatrix,
    complex_poisson_kernel,
    heat_kernel,
    poisson_kernel_spectral,
    sector_majorant_time,
)

logger = logging.getLogger(__name__)

N_IDENTITY_PAIRS = 20
SAMPLE_COLUMNS = ["regime", "t", "x", "y", "value"]
SECTOR_DOMINATION_TOL = 1e-10


def _sample_rows(samples: Mapping[str, Sequence[KernelSample]]) -> list[tuple]:
    return [
        (label, s.t, s.x, s.y, s.value)
        for label, regime in sorted(samples.items())
        for s in regime
    ]


def _record_fit(
    context: RunContext,
    samples: Mapping[str, Sequence[KernelSample]],
    evaluator: BoundEvaluator,
    two_sided: bool,
    suffix: str,
) -> BoundFitReport:
    params: BoundsFitParams = context.config.experiment
    report = fit_and_check_bounds(
        samples, evaluator, two_sided, min_samples=params.min_samples_per_regime
    )
    context.writer.write_json(f"bound_fit_{suffix}.json", report)
    context.writer.write_csv(f"bound_samples_{suffix}.csv", SAMPLE_COLUMNS, _sample_rows(samples))
    context.check_at_most(f"violations_{suffix}", report.total_violations, 0)
    for fit in report.regimes:
        context.note(
            f"{fit.tag.label}: C_upper={fit.constants.c_upper:.3e} "
            f"C_lower={fit.constants.c_lower:.3e} c0={fit.constants.c0_upper:.3e} "
            f"({fit.n_samples} samples)"
        )
    if evaluator.kind == KernelKindEnum.POISSON:
        sampled, expected = len(report.regimes), len(POISSON_CASES)
        context.check(f"regimes_{suffix}", sampled == expected, sampled, expected)
    return report


def _fit(
    context: RunContext,
    kernels: Mapping[float, KernelMatrix],
    evaluator: BoundEvaluator,
    two_sided: bool,
    suffix: str,
) -> BoundFitReport:
    params: BoundsFitParams = context.config.experiment
    kind = evaluator.kind
    samples = sample_kernels(context.model, kernels, kind, params.n_per_regime, context.rng)
    report = _record_fit(context, samples, evaluator, two_sided, suffix)
    if params.recheck_inflation is not None:
        fresh = sample_kernels(context.model, kernels, kind, params.n_per_regime, context.rng)
        outcome = check_bounds(report, fresh, evaluator, params.recheck_inflation)
        misses = sum(counts["upper"] + counts["lower"] for counts in outcome.values())
        context.check_at_most(f"recheck_{suffix}", misses, 0)
    return report


def _fit_sector(context: RunContext, k: int, real: BoundFitReport) -> None:
    """Fit |P_{z,k}| against the Poisson estimate at t = |z| over the sector points."""
    params: BoundsFitParams = context.config.experiment
    spec = context.spectrum
    points = [modulus * np.exp(1j * argument) for modulus, argument in params.sector_points]
    kernels = [complex_poisson_kernel(spec, z, k)[0] for z in points]
    per_kernel = int(np.ceil(2 * params.n_per_regime / len(points)))
    samples = sample_sector_kernels(context.model, kernels, per_kernel, context.rng)
    evaluator = PoissonBoundEvaluator(context.model, k)
    report = _record_fit(context, samples, evaluator, False, f"sector_k{k}")

    real_constants = {fit.tag.label: fit.constants.c_upper for fit in real.regimes}
    inflation = max(
        (
            fit.constants.c_upper / real_constants[fit.tag.label]
            for fit in report.regimes
            if fit.tag.label in real_constants
        ),
        default=float("nan"),
    )
    context.note(f"sector k={k}: constants at most {inflation:.3f} times the real-axis ones")

    if k != 0:
        return
    worst = 0.0
    for z, kernel in zip(points, kernels, strict=True):
        s, factor = sector_majorant_time(z)
        majorant = factor * poisson_kernel_spectral(spec, s, 0).values
        excess = float(np.max(np.abs(kernel.values) - majorant)) / float(np.max(majorant))
        worst = max(worst, excess)
    context.check_at_most("sector_subordination_k0", worst, SECTOR_DOMINATION_TOL)


def run_bounds_fit(context: RunContext) -> None:
    """Fit the heat or Poisson estimates per regime and check them."""
    params: BoundsFitParams = context.config.experiment
    spec = context.spectrum
    model = context.model
    if params.kernel == KernelKindEnum.HEAT:
        kernels = {t: heat_kernel(spec, t) for t in params.times}
        report = _fit(context, kernels, HeatBoundEvaluator(model), params.two_sided, "heat")
        if report.seam_mismatch is not None:
            context.note(f"seam mismatch at t = 1: {report.seam_mismatch:.3e}")
    else:
        for k in params.orders:
            kernels = {t: poisson_kernel_spectral(spec, t, k) for t in params.times}
            evaluator = PoissonBoundEvaluator(model, k)
            report = _fit(context, kernels, evaluator, False, f"poisson_k{k}")
            if params.sector_points:
                _fit_sector(context, k, report)
        x = int(model.site_ids[0])
        pairs = [(x, int(y)) for y in context.rng.choice(model.site_ids, size=10)]
        order_zero, order_one = PoissonBoundEvaluator(model, 0), PoissonBoundEvaluator(model, 1)
        identical = all(
            order_zero.terms(t, a, b) == order_one.terms(t, a, b)
            for t in params.times
            for a, b in pairs
        )
        context.check("k_or_one_identity", identical)

    if params.decay_times:
        x = small_end_site_at_abs(model, params.decay_site_abs)
        slope = on_diagonal_decay_slope(spec, x, params.decay_times)
        expected = -model.params.n / 2
        error = abs(slope - expected) / abs(expected)
        context.note(
            f"on-diagonal decay slope at site {x} (|x| = {model.norm_abs_values[x]:.2f}): "
            f"{slope:.4f} (expected {expected})"
        )
        context.check_at_most("on_diagonal_decay", error, params.decay_tolerance)


def run_domination(context: RunContext) -> None:
    """Compare Schrodinger heat kernels with the free one for every configured potential."""
    params: DominationParams = context.config.experiment
    model = context.model
    free = context.laplacian_spectrum
    reports, rows = [], []
    for potential in params.potentials:
        name = f"{potential.kind.value}({potential.strength})"
        spec = spectral_decompose(context.with_potential(potential))
        report = check_gaussian_type_domination(spec, free, params.alpha_grid, params.times)
        reports.append(
            {
                "potential": potential.model_dump(mode="json"),
                "report": report.model_dump(mode="json"),
            }
        )
        rows += [(name, pair.alpha, pair.constant) for pair in report.pareto]
        context.check(
            f"trotter_{name}",
            report.trotter_violations == 0,
            report.max_trotter_excess,
            TROTTER_TOL,
        )
        context.note(f"{name}: max Trotter excess {report.max_trotter_excess:.3e}")

        if params.approx_identity_order is not None:
            k = params.approx_identity_order
            pairs = [
                (int(x), int(y))
                for x, y in context.rng.choice(model.site_ids, size=(N_IDENTITY_PAIRS, 2))
            ]
            identity = check_approx_identity(
                lambda t, spec=spec, k=k: poisson_kernel_spectral(spec, t, k),
                PoissonBoundEvaluator(model, k),
                params.times,
                pairs,
            )
            context.check(
                f"approx_identity_{name}",
                identity.passed,
                identity.required_constant,
                identity.constant,
            )
    context.writer.write_json("domination.json", reports)
    context.writer.write_csv("domination_pareto.csv", ["potential", "alpha", "constant"], rows)
