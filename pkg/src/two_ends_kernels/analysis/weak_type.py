"""Empirical weak-(1,1) quasinorms of operators acting on site vectors."""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from two_ends_kernels.config import config

logger = logging.getLogger(__name__)

N_LEVELS = 64
LEVEL_DECADES = 3.0

SiteOperator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class WeakTypeSweep:
    """Distribution function of |Tf| sampled on a log grid of levels.

    ``products[i] = levels[i] * measures[i] / ||f||_1`` with ``measures[i]`` the measure
    of {|Tf| > levels[i]}.
    """

    levels: np.ndarray = field(repr=False)
    measures: np.ndarray = field(repr=False)
    products: np.ndarray = field(repr=False)
    l1_norm: float

    @property
    def quasinorm(self) -> float:
        """Return the sup of the normalized products over the grid."""
        return float(self.products.max())

    def rows(self) -> list[tuple[float, float, float]]:
        """Return (level, measure, product) rows for CSV output."""
        return [
            (float(a), float(b), float(c))
            for a, b, c in zip(self.levels, self.measures, self.products, strict=True)
        ]


def level_grid(sup_value: float, n_levels: int = N_LEVELS) -> np.ndarray:
    """Return ``n_levels`` log-spaced levels from sup_value / 10^3 up to sup_value.

    The grid is the fixed relative grid multiplied by ``sup_value``, so rescaling the
    function by a power of two rescales every level exactly.
    """
    return sup_value * 10.0 ** np.linspace(-LEVEL_DECADES, 0.0, n_levels)


def weak_type_sweep(
    apply_t: SiteOperator,
    f: np.ndarray,
    measures: np.ndarray,
    levels: Sequence[float] | None = None,
) -> WeakTypeSweep:
    """Sample lambda * mu{|Tf| > lambda} / ||f||_1 over a grid of levels.

    Raises
    ------
    ValueError
        When f vanishes, or when Tf vanishes and no level grid is given.
    """
    f = np.asarray(f)
    l1_norm = float(np.sum(np.abs(f) * measures))
    if l1_norm == 0:
        msg = "weak-type sweep needs a non-zero function"
        raise ValueError(msg)
    magnitudes = np.abs(apply_t(f))
    if levels is None:
        sup_value = float(magnitudes.max())
        if sup_value == 0:
            msg = "Tf vanishes identically, the level grid is undefined"
            raise ValueError(msg)
        grid = level_grid(sup_value)
    else:
        grid = np.asarray(levels, dtype=float)
    above = magnitudes[None, :] > grid[:, None]
    level_measures = above.astype(float) @ measures
    return WeakTypeSweep(
        levels=grid,
        measures=level_measures,
        products=grid * level_measures / l1_norm,
        l1_norm=l1_norm,
    )


def weak_quasinorm(
    apply_t: SiteOperator,
    f: np.ndarray,
    measures: np.ndarray,
    levels: Sequence[float] | None = None,
) -> float:
    """Return sup over the level grid of lambda * mu{|Tf| > lambda} / ||f||_1."""
    return weak_type_sweep(apply_t, f, measures, levels).quasinorm


def point_mass(measures: np.ndarray, site: int) -> np.ndarray:
    """Return the unit-mass point mass at a site, delta_x / mu_x."""
    f = np.zeros(measures.shape[0])
    f[site] = 1.0 / measures[site]
    return f


def family_quasinorms(
    apply_t: SiteOperator, family: Sequence[np.ndarray], measures: np.ndarray
) -> np.ndarray:
    """Return the weak quasinorm of every function of a family, in family order."""
    values = Parallel(n_jobs=config.n_jobs)(
        delayed(weak_quasinorm)(apply_t, f, measures) for f in family
    )
    values = np.array(values)
    logger.info(
        f"Weak quasinorms of {len(family)} functions: "
        f"min {values.min():.3e}, median {np.median(values):.3e}, max {values.max():.3e}"
    )
    return values


def median_spread(values: np.ndarray) -> float:
    """Return the largest factor between a value and the median of the family."""
    median = float(np.median(values))
    return float(max(values.max() / median, median / values.min()))
