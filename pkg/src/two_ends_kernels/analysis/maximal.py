"""Region splitting, Hardy-Littlewood and semigroup maximal functions."""

import logging
from collections.abc import Sequence

import numpy as np
from joblib import Parallel, delayed

from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import KernelKindEnum, RegionEnum
from two_ends_kernels.geometry.model_geometry import ManifoldModel
from two_ends_kernels.spectral.operators import SpectralData
from two_ends_kernels.spectral.semigroups import check_sector, poisson_symbol

logger = logging.getLogger(__name__)


def region_split(model: ManifoldModel, f: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (f on the big end, f on the small end, f on K), each extended by zero."""
    return tuple(
        np.where(model.region_mask(region), f, 0.0)
        for region in (RegionEnum.BIG_END, RegionEnum.SMALL_END, RegionEnum.CENTER)
    )


def level_set(values: np.ndarray, threshold: float) -> np.ndarray:
    """Return the indicator of {|values| > threshold}."""
    return np.abs(values) > threshold


def _group_ends(sorted_distances: np.ndarray, cap: int) -> np.ndarray:
    """Return the last sorted position of every group of equal distances, at most ``cap``."""
    ends = np.flatnonzero(np.diff(sorted_distances) > 0)
    ends = np.append(ends, sorted_distances.shape[0] - 1)
    if ends.shape[0] > cap:
        keep = np.unique(np.round(np.linspace(0, ends.shape[0] - 1, cap)).astype(int))
        ends = ends[keep]
    return ends


def _maximal_chunk(
    distances: np.ndarray,
    measures: np.ndarray,
    magnitudes: np.ndarray,
    centers: np.ndarray,
    cap: int,
) -> np.ndarray:
    result = np.zeros(measures.shape[0])
    for center in centers:
        order = np.argsort(distances[center], kind="stable")
        sorted_distances = distances[center][order]
        mass = np.cumsum(measures[order])
        integral = np.cumsum(measures[order] * magnitudes[order])
        ends = _group_ends(sorted_distances, cap)
        averages = integral[ends] / mass[ends]
        # A site is in every ball whose radius group ends at or after its own position
        best_from = np.maximum.accumulate(averages[::-1])[::-1]
        positions = np.searchsorted(ends, np.arange(order.shape[0]))
        np.maximum.at(result, order, best_from[positions])
    return result


def maximal_function(model: ManifoldModel, f: np.ndarray) -> np.ndarray:
    """Return the uncentered maximal function of |f| over closed graph balls.

    Every site is a candidate center and every distinct distance from it a candidate
    radius; at most ``config.max_radii_per_center`` radii are kept per center.
    """
    distances = model.distance_matrix
    magnitudes = np.abs(np.asarray(f, dtype=complex if np.iscomplexobj(f) else float))
    n_chunks = max(1, min(model.n_sites, 4 * max(1, config.n_jobs)))
    partials = Parallel(n_jobs=config.n_jobs)(
        delayed(_maximal_chunk)(
            distances, model.measures, magnitudes, chunk, config.max_radii_per_center
        )
        for chunk in np.array_split(model.site_ids, n_chunks)
    )
    result = np.maximum.reduce(partials)
    logger.debug(f"Maximal function over {model.n_sites} centers, max {result.max():.3e}")
    return result


def semigroup_maximal(
    spec: SpectralData,
    f: np.ndarray,
    kind: KernelKindEnum,
    grid: Sequence[float | complex],
    k: int = 0,
) -> np.ndarray:
    """Return max over the grid of |exp(-tL) f| (heat) or |(z sqrt(L))^k exp(-z sqrt(L)) f|.

    Poisson grids may be complex and must lie in the sector |arg z| < pi/4.
    """
    if len(grid) == 0:
        msg = "semigroup maximal function needs a non-empty grid"
        raise ValueError(msg)
    coefficients = spec.coefficients(f)
    if kind == KernelKindEnum.HEAT:
        times = np.asarray(grid, dtype=float)
        if np.any(times <= 0):
            msg = "heat times must be positive"
            raise ValueError(msg)
        symbols = np.exp(-times[:, None] * spec.eigenvalues[None, :])
    else:
        for z in grid:
            check_sector(complex(z))
        points = np.asarray(grid, dtype=complex)
        if np.all(points.imag == 0):
            points = points.real
        symbols = poisson_symbol(spec.eigenvalues[None, :], points[:, None], k)
    values = spec.eigenvectors @ (symbols * coefficients[None, :]).T
    return np.max(np.abs(values), axis=1)
