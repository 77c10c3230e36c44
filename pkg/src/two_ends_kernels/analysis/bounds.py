"""Closed-form heat and Poisson kernel bounds on the manifold with two ends, and their fits.

Each bound is a sum of terms ``a * exp(-c0 * e)``; keeping the terms apart lets the fits
scan the Gaussian rate c0 without re-evaluating distances and volumes.
"""

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import (
    BoundSideEnum,
    KernelKindEnum,
    RegionEnum,
    TimeRegimeEnum,
)
from two_ends_kernels.exceptions import BoundFitPreconditionError, EmptyRegimeError
from two_ends_kernels.geometry.model_geometry import (
    ManifoldModel,
    ball_volume,
    graph_distance,
    norm_abs,
)
from two_ends_kernels.schemas.bound_schemas import (
    HEAT_CASES,
    POISSON_CASES,
    SHORT_TIME_HEAT_CASE,
    ApproxIdentityReport,
    BoundConstants,
    BoundFitReport,
    DominationPair,
    DominationReport,
    RegimeFit,
    RegimeTag,
)
from two_ends_kernels.spectral.operators import SpectralData
from two_ends_kernels.spectral.semigroups import KernelMatrix, heat_kernel

logger = logging.getLogger(__name__)

REGION_ORDER = {RegionEnum.BIG_END: 0, RegionEnum.SMALL_END: 1, RegionEnum.CENTER: 2}
DEFAULT_C0_GRID = np.geomspace(1e-3, 1.0, 61)
FIT_MARGIN = 1e-9
TROTTER_TOL = 1e-10
MIN_FIT_REGIMES = 4
MIN_SAMPLES_PER_REGIME = 50
# Seam pairs lie within this multiple of sqrt(t) = 1 of each other
SEAM_REACH = 1.0
DECAY_SITE_ABS = 3.0

Terms = list[tuple[float, float]]


def orient(model: ManifoldModel, x: int, y: int) -> tuple[int, int]:
    """Return the pair ordered so that x lies in the end that names the case."""
    if REGION_ORDER[model.region_of(x)] <= REGION_ORDER[model.region_of(y)]:
        return x, y
    return y, x


def classify_regime(
    model: ManifoldModel, kind: KernelKindEnum, t: float, x: int, y: int
) -> RegimeTag:
    """Return the case of the heat or Poisson estimate that governs (t, x, y)."""
    if kind == KernelKindEnum.HEAT and t <= 0:
        msg = f"heat regime needs t > 0, got {t}"
        raise ValueError(msg)
    ox, oy = orient(model, x, y)
    pair = (model.region_of(ox), model.region_of(oy))
    if kind == KernelKindEnum.POISSON:
        return RegimeTag(kind=kind, case=POISSON_CASES[pair], region_x=pair[0], region_y=pair[1])
    if t <= 1:
        return RegimeTag(
            kind=kind,
            case=SHORT_TIME_HEAT_CASE,
            region_x=pair[0],
            region_y=pair[1],
            time_regime=TimeRegimeEnum.SHORT,
        )
    return RegimeTag(
        kind=kind,
        case=HEAT_CASES[pair],
        region_x=pair[0],
        region_y=pair[1],
        time_regime=TimeRegimeEnum.LONG,
    )


@dataclass(frozen=True)
class HeatBoundEvaluator:
    """Two-sided heat kernel estimates in seven space-time cases."""

    model: ManifoldModel

    kind = KernelKindEnum.HEAT
    order = 0

    def terms(self, t: float, x: int, y: int, case: int | None = None) -> Terms:
        """Return the (prefactor, exponent) terms of the bound; ``case`` overrides the regime."""
        params = self.model.params
        m, n = params.m, params.n
        case = case or classify_regime(self.model, self.kind, t, x, y).case
        if case == SHORT_TIME_HEAT_CASE:
            d = graph_distance(self.model, x, y)
            return [(1.0 / ball_volume(self.model, x, np.sqrt(t)), d**2 / t)]
        ox, oy = orient(self.model, x, y)
        d = graph_distance(self.model, ox, oy)
        ax, ay = norm_abs(self.model, ox), norm_abs(self.model, oy)
        gauss = d**2 / t
        match case:
            case 2:
                return [(t ** (-n / 2), gauss)]
            case 3:
                return [(t ** (-n / 2) * ax ** (2 - m) + t ** (-m / 2), gauss)]
            case 4:
                return [(t ** (-n / 2) * ax ** (2 - n) + t ** (-n / 2), gauss)]
            case 5:
                return [(t ** (-n / 2) * ax ** (2 - m) + t ** (-m / 2) * ay ** (2 - n), gauss)]
            case 6:
                far = (ax**2 + ay**2) / t
                return [(t ** (-n / 2) * (ax * ay) ** (2 - m), far), (t ** (-m / 2), gauss)]
            case 7:
                far = (ax**2 + ay**2) / t
                return [(t ** (-n / 2) * (ax * ay) ** (2 - n), far), (t ** (-n / 2), gauss)]
        msg = f"unknown heat case {case}"
        raise ValueError(msg)


@dataclass(frozen=True)
class PoissonBoundEvaluator:
    """Upper estimates of P_{t,k} in six spatial cases, with k v 1 = max(k, 1)."""

    model: ManifoldModel
    order: int = 0

    kind = KernelKindEnum.POISSON

    def terms(self, t: float, x: int, y: int, case: int | None = None) -> Terms:
        """Return the bound as (prefactor, 0) terms."""
        params = self.model.params
        m, n = params.m, params.n
        k_or_one = max(self.order, 1)
        case = case or classify_regime(self.model, self.kind, t, x, y).case
        ox, oy = orient(self.model, x, y)
        d = graph_distance(self.model, ox, oy)
        ax, ay = norm_abs(self.model, ox), norm_abs(self.model, oy)
        near = t / (t + d)
        big = t ** (-m) * near ** (m + k_or_one)
        small = t ** (-n) * near ** (n + k_or_one)
        match case:
            case 1 | 3 | 6:
                prefactors = [big, small]
            case 2:
                prefactors = [big, small * ax ** (2 - m)]
            case 4:
                prefactors = [big, small * ax ** (2 - m), big * ay ** (2 - n)]
            case 5:
                far = t / (t + ax + ay)
                prefactors = [big, t ** (-n) * (ax * ay) ** (2 - m) * far ** (n + k_or_one)]
            case _:
                msg = f"unknown Poisson case {case}"
                raise ValueError(msg)
        return [(prefactor, 0.0) for prefactor in prefactors]


BoundEvaluator = HeatBoundEvaluator | PoissonBoundEvaluator


def _evaluate(terms: Terms, constant: float, c0: float) -> float:
    return constant * sum(a * np.exp(-c0 * e) for a, e in terms)


def heat_bound_value(
    model: ManifoldModel,
    consts: BoundConstants,
    side: BoundSideEnum,
    t: float,
    x: int,
    y: int,
) -> float:
    """Return the upper or lower heat kernel estimate at (t, x, y)."""
    terms = HeatBoundEvaluator(model).terms(t, x, y)
    if side == BoundSideEnum.UPPER:
        return _evaluate(terms, consts.c_upper, consts.c0_upper)
    return _evaluate(terms, consts.c_lower, consts.c0_lower)


def poisson_bound_value(
    model: ManifoldModel, consts: BoundConstants, t: float, k: int, x: int, y: int
) -> float:
    """Return the upper estimate of |P_{t,k}(x, y)|."""
    if k < 0:
        msg = f"derivative order must be non-negative, got {k}"
        raise ValueError(msg)
    return _evaluate(PoissonBoundEvaluator(model, k).terms(t, x, y), consts.c_upper, 1.0)


@dataclass(frozen=True)
class KernelSample:
    """One kernel value |K_t(x, y)| with its regime."""

    t: float
    x: int
    y: int
    value: float
    tag: RegimeTag


def sample_kernels(
    model: ManifoldModel,
    kernels: Mapping[float, KernelMatrix],
    kind: KernelKindEnum,
    n_per_regime: int,
    rng: np.random.Generator,
    reach: float = 6.0,
) -> dict[str, list[KernelSample]]:
    """Draw kernel samples for every region pair and time, grouped by regime label.

    Partners y are drawn within distance ``reach * sqrt(t)`` (``reach * t`` for Poisson
    kernels) of x so that samples are not lost to underflow. Values below the relative
    round-off floor ``config.kernel_floor`` are dropped.
    """
    pairs = list(POISSON_CASES) if kind == KernelKindEnum.POISSON else list(HEAT_CASES)
    grouped: dict[str, list[KernelSample]] = {}
    for t, kernel in sorted(kernels.items()):
        magnitudes = np.abs(kernel.values)
        floor = config.kernel_floor * float(magnitudes.max())
        radius = reach * (t if kind == KernelKindEnum.POISSON else np.sqrt(t))
        # Short heat times share a single regime across all region pairs
        share = len(pairs) if kind == KernelKindEnum.HEAT and t <= 1 else 1
        per_pair = max(1, int(np.ceil(n_per_regime / share)))
        for region_x, region_y in pairs:
            xs, ys = model.sites_in(region_x), model.sites_in(region_y)
            drawn = 0
            for _ in range(10 * per_pair):
                if drawn >= per_pair:
                    break
                x = int(rng.choice(xs))
                distances = model.distances_from(x)[ys]
                candidates = ys[distances <= max(radius, float(distances.min()))]
                y = int(rng.choice(candidates))
                if magnitudes[x, y] <= floor:
                    continue
                tag = classify_regime(model, kind, t, x, y)
                grouped.setdefault(tag.label, []).append(
                    KernelSample(t=t, x=x, y=y, value=float(magnitudes[x, y]), tag=tag)
                )
                drawn += 1
    logger.info(
        f"Sampled {sum(len(v) for v in grouped.values())} {kind.value} kernel values "
        f"in {len(grouped)} regimes"
    )
    return grouped


def sample_sector_kernels(
    model: ManifoldModel,
    kernels: Sequence[KernelMatrix],
    n_per_kernel: int,
    rng: np.random.Generator,
) -> dict[str, list[KernelSample]]:
    """Draw |P_{z,k}(x, y)| samples for complex times z, recorded at t = |z|.

    Complex kernels share the Poisson regimes, so samples of every z are merged per regime
    and can be fitted against the real estimates evaluated at |z|.
    """
    merged: dict[str, list[KernelSample]] = {}
    for kernel in kernels:
        drawn = sample_kernels(
            model, {abs(kernel.time): kernel}, KernelKindEnum.POISSON, n_per_kernel, rng
        )
        for label, regime in drawn.items():
            merged.setdefault(label, []).extend(regime)
    return merged


def small_end_site_at_abs(model: ManifoldModel, target: float = DECAY_SITE_ABS) -> int:
    """Return the small-end site whose |x| is closest to ``target``."""
    sites = model.sites_in(RegionEnum.SMALL_END)
    return int(sites[np.argmin(np.abs(model.norm_abs_values[sites] - target))])


def _term_table(evaluator: BoundEvaluator, samples: Sequence[KernelSample]) -> list[Terms]:
    return [evaluator.terms(s.t, s.x, s.y, s.tag.case) for s in samples]


def _bounds_at(table: list[Terms], c0: float) -> np.ndarray:
    return np.array([_evaluate(terms, 1.0, c0) for terms in table])


def _fit_regime(
    evaluator: BoundEvaluator,
    samples: Sequence[KernelSample],
    two_sided: bool,
    c0_grid: np.ndarray,
) -> RegimeFit:
    if not samples:
        raise EmptyRegimeError("<empty>")
    table = _term_table(evaluator, samples)
    values = np.array([s.value for s in samples])
    has_gaussian = any(e > 0 for terms in table for _, e in terms)
    grid = c0_grid if has_gaussian else np.array([1.0])

    best = None
    for c0 in grid:
        log_ratio = np.log(values) - np.log(_bounds_at(table, c0))
        spread = float(log_ratio.max() - log_ratio.min())
        if best is None or spread < best[0]:
            best = (spread, float(c0), log_ratio)
    spread, c0, log_ratio = best

    c_upper = float(np.exp(log_ratio.max())) * (1 + FIT_MARGIN)
    c_lower = float(np.exp(log_ratio.min())) / (1 + FIT_MARGIN)
    constants = BoundConstants(c_upper=c_upper, c_lower=c_lower, c0_upper=c0, c0_lower=c0)
    bounds = _bounds_at(table, c0)
    upper_violations = int(np.sum(values > c_upper * bounds))
    lower_violations = int(np.sum(values < c_lower * bounds)) if two_sided else 0
    return RegimeFit(
        tag=samples[0].tag,
        constants=constants,
        n_samples=len(samples),
        max_kernel_over_bound=float(np.max(values / (c_upper * bounds))),
        max_bound_over_kernel=float(np.max(c_lower * bounds / values)) if two_sided else None,
        log_ratio_spread=spread,
        violations=upper_violations + lower_violations,
    )


def fit_and_check_bounds(
    samples: Mapping[str, Sequence[KernelSample]],
    evaluator: BoundEvaluator,
    two_sided: bool,
    c0_grid: np.ndarray | None = None,
    min_regimes: int = MIN_FIT_REGIMES,
    min_samples: int = MIN_SAMPLES_PER_REGIME,
) -> BoundFitReport:
    """Fit per-regime constants making the bound dominate (and, two-sided, minorize) the samples.

    c0 is scanned on a log grid and the value with the smallest spread of log ratios is
    kept; C_upper and C_lower are the extreme ratios at that c0.

    Raises
    ------
    EmptyRegimeError
        When a regime label carries no samples.
    BoundFitPreconditionError
        When fewer than ``min_regimes`` regimes are sampled or a regime holds fewer than
        ``min_samples`` samples.
    """
    c0_grid = DEFAULT_C0_GRID if c0_grid is None else np.asarray(c0_grid)
    for label, regime_samples in samples.items():
        if not regime_samples:
            raise EmptyRegimeError(label)
    if len(samples) < min_regimes:
        msg = f"{len(samples)} regimes sampled, at least {min_regimes} required"
        raise BoundFitPreconditionError(msg)
    thin = {label: len(s) for label, s in sorted(samples.items()) if len(s) < min_samples}
    if thin:
        msg = f"regimes {thin} hold fewer than {min_samples} samples"
        raise BoundFitPreconditionError(msg)
    fits = [
        _fit_regime(evaluator, regime_samples, two_sided, c0_grid)
        for _, regime_samples in sorted(samples.items())
    ]

    seam = None
    if evaluator.kind == KernelKindEnum.HEAT:
        seam = seam_mismatch(evaluator, fits, samples)
    times = sorted({s.t for regime in samples.values() for s in regime})
    report = BoundFitReport(
        kind=evaluator.kind,
        order=evaluator.order,
        two_sided=two_sided,
        regimes=fits,
        seam_mismatch=seam,
        sample_grid=f"t in {times}, {sum(len(v) for v in samples.values())} samples",
    )
    logger.info(
        f"Fitted {evaluator.kind.value} bounds on {len(fits)} regimes, "
        f"{report.total_violations} violations"
    )
    return report


def seam_mismatch(
    evaluator: HeatBoundEvaluator,
    fits: Sequence[RegimeFit],
    samples: Mapping[str, Sequence[KernelSample]],
) -> float | None:
    """Return the largest factor between the fitted t <= 1 and t > 1 upper bounds at t = 1.

    Only sampled pairs within distance ``SEAM_REACH`` are compared; farther pairs sit in the
    Gaussian tail where the ratio measures the fitted rates c0 rather than the seam.
    """
    by_case = {fit.tag.case: fit for fit in fits}
    short = by_case.get(SHORT_TIME_HEAT_CASE)
    if short is None:
        return None
    factor = None
    for fit in fits:
        if fit.tag.case == SHORT_TIME_HEAT_CASE:
            continue
        pairs = {(s.x, s.y) for s in samples[fit.tag.label]}
        for x, y in sorted(pairs):
            if graph_distance(evaluator.model, x, y) > SEAM_REACH:
                continue
            short_value = _evaluate(
                evaluator.terms(1.0, x, y, SHORT_TIME_HEAT_CASE),
                short.constants.c_upper,
                short.constants.c0_upper,
            )
            long_value = _evaluate(
                evaluator.terms(1.0, x, y, fit.tag.case),
                fit.constants.c_upper,
                fit.constants.c0_upper,
            )
            ratio = max(short_value / long_value, long_value / short_value)
            factor = ratio if factor is None else max(factor, ratio)
    return factor


def check_bounds(
    report: BoundFitReport,
    samples: Mapping[str, Sequence[KernelSample]],
    evaluator: BoundEvaluator,
    inflation: float = 1.5,
) -> dict[str, dict[str, int]]:
    """Re-check fitted constants on fresh samples, loosened by ``inflation`` on each side."""
    fits = {fit.tag.label: fit for fit in report.regimes}
    outcome = {}
    for label, regime_samples in samples.items():
        if label not in fits or not regime_samples:
            continue
        constants = fits[label].constants
        values = np.array([s.value for s in regime_samples])
        table = _term_table(evaluator, regime_samples)
        upper = _bounds_at(table, constants.c0_upper) * constants.c_upper * inflation
        lower = _bounds_at(table, constants.c0_lower) * constants.c_lower / inflation
        outcome[label] = {
            "upper": int(np.sum(values > upper)),
            "lower": int(np.sum(values < lower)) if report.two_sided else 0,
        }
    return outcome


def on_diagonal_decay_slope(spec: SpectralData, x: int, t_grid: Sequence[float]) -> float:
    """Return the log-log slope of t -> h_t(x, x) over the grid."""
    times = np.asarray(t_grid, dtype=float)
    weights = spec.eigenvectors[x] ** 2
    diagonal = np.array([np.sum(np.exp(-t * spec.eigenvalues) * weights) for t in times])
    slope, _ = np.polyfit(np.log(times), np.log(diagonal), 1)
    return float(slope)


def check_gaussian_type_domination(
    heat_potential: SpectralData,
    heat_free: SpectralData,
    alpha_grid: Sequence[float],
    t_grid: Sequence[float],
) -> DominationReport:
    """Compare the heat kernel of L = Delta + V with that of Delta.

    Checks the Trotter inequality entrywise and, for every alpha, the smallest C with
    h_t <= C h_(alpha t) over the entries of h_(alpha t) above the round-off floor.
    """
    violations, max_excess, first = 0, -np.inf, None
    for t in t_grid:
        excess = heat_kernel(heat_potential, t).values - heat_kernel(heat_free, t).values
        max_excess = max(max_excess, float(excess.max()))
        bad = np.argwhere(excess > TROTTER_TOL)
        if bad.size and first is None:
            first = (float(t), int(bad[0, 0]), int(bad[0, 1]))
        violations += int(bad.shape[0])
    if violations:
        logger.error(f"Trotter domination violated {violations} times, first at {first}")

    constants = []
    for alpha in alpha_grid:
        worst = 0.0
        for t in t_grid:
            dominated = heat_kernel(heat_potential, t).values
            dominating = heat_kernel(heat_free, alpha * t).values
            mask = dominating > config.kernel_floor * dominating.max()
            worst = max(worst, float(np.max(dominated[mask] / dominating[mask])))
        constants.append((float(alpha), worst))

    pareto = []
    for alpha, constant in sorted(constants):
        if not pareto or constant < pareto[-1].constant:
            pareto.append(DominationPair(alpha=alpha, constant=constant))
    return DominationReport(
        trotter_violations=violations,
        max_trotter_excess=max_excess,
        first_violation=first,
        pareto=pareto,
        times=[float(t) for t in t_grid],
    )


def check_approx_identity(
    kernel_family: Callable[[float], KernelMatrix],
    evaluator: PoissonBoundEvaluator,
    t_grid: Sequence[float],
    pairs: Sequence[tuple[int, int]],
    c_grid: Sequence[float] = tuple(np.geomspace(1e-2, 1e4, 25)),
    alpha_grid: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0),
) -> ApproxIdentityReport:
    """Check |phi_t(x, y)| <= C * PoissonBound(alpha t, k, x, y) for some grid (C, alpha)."""
    kernels = {t: kernel_family(t) for t in t_grid}
    required = {}
    for alpha in alpha_grid:
        ratio = 0.0
        for t, kernel in kernels.items():
            for x, y in pairs:
                bound = _evaluate(evaluator.terms(alpha * t, x, y), 1.0, 1.0)
                ratio = max(ratio, abs(complex(kernel.values[x, y])) / bound)
        required[float(alpha)] = ratio
    best_alpha = min(required, key=required.get)
    needed = required[best_alpha]
    admissible = sorted(c for c in c_grid if c >= needed)
    report = ApproxIdentityReport(
        passed=bool(admissible),
        order=evaluator.order,
        alpha=best_alpha if admissible else None,
        constant=float(admissible[0]) if admissible else None,
        required_constant=needed,
        worst_ratio=needed / float(max(c_grid)),
    )
    logger.info(f"Approximation to the identity check: {report}")
    return report
