"""Tests for the heat and Poisson kernel estimates and their fits."""

import numpy as np
import pytest

from two_ends_kernels.analysis.bounds import (
    HeatBoundEvaluator,
    KernelSample,
    PoissonBoundEvaluator,
    check_approx_identity,
    check_bounds,
    check_gaussian_type_domination,
    classify_regime,
    fit_and_check_bounds,
    heat_bound_value,
    on_diagonal_decay_slope,
    orient,
    poisson_bound_value,
    sample_kernels,
    sample_sector_kernels,
    seam_mismatch,
    small_end_site_at_abs,
)
from two_ends_kernels.enums.base_enums import (
    BoundSideEnum,
    KernelKindEnum,
    PotentialKindEnum,
    RegionEnum,
    TimeRegimeEnum,
)
from two_ends_kernels.exceptions import (
    BoundFitPreconditionError,
    EmptyRegimeError,
    InvalidRegimeTagError,
)
from two_ends_kernels.geometry.model_geometry import (
    ManifoldModel,
    build_two_ends_model,
    graph_distance,
)
from two_ends_kernels.schemas.bound_schemas import POISSON_CASES, BoundConstants, RegimeTag
from two_ends_kernels.schemas.model_schemas import ModelParams
from two_ends_kernels.spectral.operators import (
    SpectralData,
    add_potential,
    assemble_laplacian,
    potential_from_profile,
    spectral_decompose,
)
from two_ends_kernels.spectral.semigroups import (
    complex_poisson_kernel,
    heat_kernel,
    poisson_kernel_spectral,
)

BIG, CENTER, SMALL = 10, 41, 70


def _heat_samples(model: ManifoldModel, spectrum: SpectralData, seed: int = 0) -> dict:
    """Sample heat kernels at a short and two long times."""
    kernels = {t: heat_kernel(spectrum, t) for t in (0.5, 4.0, 16.0)}
    return sample_kernels(model, kernels, KernelKindEnum.HEAT, 12, np.random.default_rng(seed))


def test_orient_puts_the_naming_end_first(small_model: ManifoldModel) -> None:
    """Big end before small end before K."""
    assert orient(small_model, SMALL, BIG) == (BIG, SMALL)
    assert orient(small_model, CENTER, SMALL) == (SMALL, CENTER)


@pytest.mark.parametrize(
    ("t", "x", "y", "case"),
    [
        (0.5, BIG, SMALL, 1),
        (2.0, CENTER, CENTER, 2),
        (2.0, CENTER, BIG, 3),
        (2.0, SMALL, CENTER, 4),
        (2.0, SMALL, BIG, 5),
        (2.0, BIG, BIG, 6),
        (2.0, SMALL, SMALL, 7),
    ],
)
def test_heat_regimes(small_model: ManifoldModel, t: float, x: int, y: int, case: int) -> None:
    """Short times share one case; long times split by region pair."""
    tag = classify_regime(small_model, KernelKindEnum.HEAT, t, x, y)
    assert tag.case == case
    assert tag.time_regime == (TimeRegimeEnum.SHORT if t <= 1 else TimeRegimeEnum.LONG)


def test_poisson_regimes_ignore_time(small_model: ManifoldModel) -> None:
    """Poisson cases depend on the regions only."""
    tags = {
        classify_regime(small_model, KernelKindEnum.POISSON, t, BIG, SMALL).label
        for t in (0.1, 1.0, 50.0)
    }
    assert tags == {"poisson-4"}


def test_heat_regime_needs_positive_time(small_model: ManifoldModel) -> None:
    """Heat regimes are defined for t > 0."""
    with pytest.raises(ValueError, match="t > 0"):
        classify_regime(small_model, KernelKindEnum.HEAT, 0.0, BIG, BIG)


def test_regime_tag_rejects_mismatched_cases() -> None:
    """A tag must name the case of its region pair."""
    with pytest.raises(InvalidRegimeTagError):
        RegimeTag(
            kind=KernelKindEnum.POISSON,
            case=3,
            region_x=RegionEnum.BIG_END,
            region_y=RegionEnum.CENTER,
        )
    with pytest.raises(InvalidRegimeTagError):
        RegimeTag(
            kind=KernelKindEnum.HEAT,
            case=2,
            region_x=RegionEnum.CENTER,
            region_y=RegionEnum.CENTER,
            time_regime=TimeRegimeEnum.SHORT,
        )


def test_poisson_order_zero_uses_k_or_one(small_model: ManifoldModel) -> None:
    """k = 0 and k = 1 share the same estimate."""
    zero, one = PoissonBoundEvaluator(small_model, 0), PoissonBoundEvaluator(small_model, 1)
    for x, y in [(BIG, SMALL), (CENTER, CENTER), (SMALL, SMALL)]:
        assert zero.terms(2.0, x, y) == one.terms(2.0, x, y)
    consts = BoundConstants(c_upper=3.0)
    assert poisson_bound_value(small_model, consts, 2.0, 0, BIG, SMALL) == pytest.approx(
        3.0 * sum(a for a, _ in one.terms(2.0, BIG, SMALL))
    )
    with pytest.raises(ValueError, match="non-negative"):
        poisson_bound_value(small_model, consts, 2.0, -1, BIG, SMALL)


def test_heat_bound_sides(small_model: ManifoldModel) -> None:
    """With equal rates the upper and lower estimates scale with their constants."""
    consts = BoundConstants(c_upper=4.0, c_lower=0.5, c0_upper=0.25, c0_lower=0.25)
    upper = heat_bound_value(small_model, consts, BoundSideEnum.UPPER, 2.0, BIG, SMALL)
    lower = heat_bound_value(small_model, consts, BoundSideEnum.LOWER, 2.0, BIG, SMALL)
    assert upper == pytest.approx(8.0 * lower)


def test_fitted_heat_bounds_hold_on_their_samples(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """Fitted constants dominate and minorize every sample and survive a re-check."""
    samples = _heat_samples(small_model, small_spectrum)
    evaluator = HeatBoundEvaluator(small_model)
    report = fit_and_check_bounds(samples, evaluator, two_sided=True, min_samples=5)

    assert report.total_violations == 0
    assert {fit.tag.label for fit in report.regimes} == set(samples)
    assert report.fit_for(1).tag.time_regime == TimeRegimeEnum.SHORT
    assert report.seam_mismatch is None or report.seam_mismatch >= 1
    for fit in report.regimes:
        assert fit.constants.c_lower <= fit.constants.c_upper
        assert fit.max_kernel_over_bound <= 1

    outcome = check_bounds(report, samples, evaluator, inflation=1.5)
    assert all(counts == {"upper": 0, "lower": 0} for counts in outcome.values())


def test_empty_regime_is_rejected(small_model: ManifoldModel) -> None:
    """Regimes without samples cannot be fitted."""
    with pytest.raises(EmptyRegimeError):
        fit_and_check_bounds({"heat-2": []}, HeatBoundEvaluator(small_model), two_sided=True)


def test_bound_fit_needs_enough_regimes_and_samples(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """Too few regimes or too thin a regime is refused before any constant is fitted."""
    samples = _heat_samples(small_model, small_spectrum)
    evaluator = HeatBoundEvaluator(small_model)
    three_regimes = dict(sorted(samples.items())[:3])
    with pytest.raises(BoundFitPreconditionError, match="3 regimes sampled"):
        fit_and_check_bounds(three_regimes, evaluator, two_sided=True, min_samples=5)
    with pytest.raises(BoundFitPreconditionError, match="fewer than 50 samples"):
        fit_and_check_bounds(samples, evaluator, two_sided=True)


def test_seam_mismatch_compares_neighbouring_pairs(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """At t = 1 the fitted short and long estimates agree up to a bounded factor near x = y."""
    evaluator = HeatBoundEvaluator(small_model)
    report = fit_and_check_bounds(
        _heat_samples(small_model, small_spectrum), evaluator, two_sided=True, min_samples=5
    )
    near = {fit.tag.label: [] for fit in report.regimes}
    for x, y in [(41, 42), (39, 40), (43, 42), (10, 11), (70, 71)]:
        assert graph_distance(small_model, x, y) == 0.5
        tag = classify_regime(small_model, KernelKindEnum.HEAT, 4.0, x, y)
        near[tag.label].append(KernelSample(t=4.0, x=x, y=y, value=1.0, tag=tag))
    far_sample = KernelSample(t=4.0, x=0, y=39, value=1.0, tag=near["heat-6"][0].tag)
    far = {label: [] for label in near} | {"heat-6": [far_sample]}

    factor = seam_mismatch(evaluator, report.regimes, near)
    assert factor is not None
    assert 1 <= factor < 1e8
    assert seam_mismatch(evaluator, report.regimes, far) is None


def test_sector_samples_fit_the_poisson_estimate(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """|P_{z,1}| at complex z is sampled per regime at t = |z| and fitted without violations."""
    points = [1.0 * np.exp(0.5j), 2.0 * np.exp(-0.5j), 4.0 * np.exp(0.3j)]
    kernels = [complex_poisson_kernel(small_spectrum, z, 1)[0] for z in points]
    samples = sample_sector_kernels(small_model, kernels, 4, np.random.default_rng(3))

    assert set(samples) == {f"poisson-{case}" for case in POISSON_CASES.values()}
    times = sorted({s.t for regime in samples.values() for s in regime})
    assert times == pytest.approx([1.0, 2.0, 4.0])
    report = fit_and_check_bounds(
        samples, PoissonBoundEvaluator(small_model, 1), two_sided=False, min_samples=5
    )
    assert report.total_violations == 0
    assert len(report.regimes) == len(POISSON_CASES)


@pytest.mark.slow
def test_on_diagonal_decay_near_k_on_the_acceptance_model() -> None:
    """h_t(x, x) decays like t^(-n/2) at |x| = 3 on the small end for t in [10, 100]."""
    model = build_two_ends_model(ModelParams(m=4, n=3, h=0.1, r_max=40.0))
    spectrum = spectral_decompose(assemble_laplacian(model))
    x = small_end_site_at_abs(model)
    assert model.region_of(x) == RegionEnum.SMALL_END
    assert model.norm_abs_values[x] == pytest.approx(3.0)
    slope = on_diagonal_decay_slope(spectrum, x, [10.0, 20.0, 40.0, 100.0])
    assert abs(slope + 1.5) / 1.5 <= 0.15



def test_on_diagonal_decay_of_a_constant_kernel() -> None:
    """A lone zero mode gives a flat diagonal."""
    slope = on_diagonal_decay_slope(SpectralData.from_eigenvalues([0.0]), 0, [1.0, 10.0, 100.0])
    assert abs(slope) < 1e-12


def test_schrodinger_heat_kernel_is_dominated(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """Adding a non-negative potential lowers the heat kernel entrywise."""
    laplacian = assemble_laplacian(small_model)
    potential = potential_from_profile(small_model, PotentialKindEnum.BUMP, 2.0)
    schrodinger = spectral_decompose(add_potential(laplacian, potential))
    report = check_gaussian_type_domination(schrodinger, small_spectrum, [1.0, 2.0], [0.5, 5.0])

    assert report.trotter_violations == 0
    assert report.first_violation is None
    assert report.pareto[0].alpha == 1.0
    assert report.pareto[0].constant <= 1.01
    assert report.times == [0.5, 5.0]


def test_approx_identity_report_is_consistent(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """A passing report names its constant and dilation, a failing one neither."""
    report = check_approx_identity(
        lambda t: poisson_kernel_spectral(small_spectrum, t, 1),
        PoissonBoundEvaluator(small_model, 1),
        [0.5, 2.0],
        [(BIG, SMALL), (CENTER, CENTER), (SMALL, SMALL)],
    )
    assert report.order == 1
    assert report.required_constant > 0
    assert report.passed == (report.constant is not None)
    assert report.passed == (report.alpha is not None)
    if report.passed:
        assert report.constant >= report.required_constant
