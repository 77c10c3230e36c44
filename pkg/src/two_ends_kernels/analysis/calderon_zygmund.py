"""Dyadic stopping-time Calderon-Zygmund decomposition on the radial chart of an end.

The chart of an end is its radial coordinate r >= 0 (distance to the boundary of K), with
the origin on that boundary. Dyadic cubes are the half-open intervals [2^k a, 2^k (a+1))
and the measure of a cube is the sum of the site measures it contains.
"""

import logging
from dataclasses import dataclass, field
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np

from two_ends_kernels.enums.base_enums import RegionEnum
from two_ends_kernels.exceptions import CZPreconditionError, ThresholdError
from two_ends_kernels.geometry.model_geometry import ManifoldModel
from two_ends_kernels.schemas.analysis_schemas import CubeSummary, CZSummary

logger = logging.getLogger(__name__)

SUP_INF_LIMIT = 3.0


@dataclass(frozen=True, eq=False)
class DyadicCube:
    """Cube [2^level * index, 2^level * (index + 1)) of a chart with its sites."""

    level: int
    index: int
    sites: np.ndarray = field(repr=False)
    measure: float

    @property
    def side(self) -> float:
        """Return the side length 2^level."""
        return 2.0**self.level

    @property
    def left(self) -> float:
        """Return the closed end of the interval."""
        return self.side * self.index

    @property
    def right(self) -> float:
        """Return the open end of the interval."""
        return self.side * (self.index + 1)

    @property
    def corner_at_origin(self) -> bool:
        """Return True when the origin is a corner of the cube."""
        return self.index == 0


@dataclass(frozen=True, eq=False)
class DyadicGrid:
    """Dyadic cubes over the radial chart of one end of a model."""

    model: ManifoldModel
    region: RegionEnum
    sites: np.ndarray
    coordinates: np.ndarray
    root_level: int

    @classmethod
    def for_end(cls, model: ManifoldModel, region: RegionEnum) -> Self:
        """Build the chart of the big or the small end."""
        if region == RegionEnum.CENTER:
            msg = "dyadic charts are defined on the ends only"
            raise ValueError(msg)
        sites = model.sites_in(region)
        coordinates = model.radii[sites]
        root_level = int(np.ceil(np.log2(coordinates.max() * (1 + 1e-12))))
        return cls(
            model=model, region=region, sites=sites, coordinates=coordinates, root_level=root_level
        )

    def cube(self, level: int, index: int) -> DyadicCube:
        """Return a cube with the chart sites it contains."""
        side = 2.0**level
        inside = (self.coordinates >= side * index) & (self.coordinates < side * (index + 1))
        sites = self.sites[inside]
        return DyadicCube(
            level=level, index=index, sites=sites, measure=float(self.model.measures[sites].sum())
        )

    @property
    def root(self) -> DyadicCube:
        """Return the generation-root cube [0, 2^root_level) covering the whole chart."""
        return self.cube(self.root_level, 0)

    def children(self, cube: DyadicCube) -> list[DyadicCube]:
        """Return the two halves of a cube."""
        return [self.cube(cube.level - 1, 2 * cube.index + offset) for offset in (0, 1)]

    def norm_abs_range(self, cube: DyadicCube) -> tuple[float, float]:
        """Return (inf |z|, sup |z|) over the sites of a cube."""
        values = self.model.norm_abs_values[cube.sites]
        return float(values.min()), float(values.max())


@dataclass(frozen=True, eq=False)
class BadPart:
    """Mean-zero piece (f - avg_Q f) on a selected cube."""

    cube: DyadicCube
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class CZDecomposition:
    """f = good + sum of bad parts, with the selected cubes."""

    grid: DyadicGrid
    threshold: float
    f: np.ndarray = field(repr=False)
    good: np.ndarray = field(repr=False)
    bad: list[BadPart]

    @property
    def cubes(self) -> list[DyadicCube]:
        """Return the selected cubes."""
        return [part.cube for part in self.bad]

    def origin_classes(self) -> tuple[list[int], list[int]]:
        """Return the indices of cubes without and with a corner at the origin."""
        at_origin = [i for i, cube in enumerate(self.cubes) if cube.corner_at_origin]
        away = [i for i, cube in enumerate(self.cubes) if not cube.corner_at_origin]
        return away, at_origin

    def reconstruction(self) -> np.ndarray:
        """Return good + sum of bad parts."""
        total = self.good.copy()
        for part in self.bad:
            total = total + part.values
        return total

    def to_summary(self) -> CZSummary:
        """Return the JSON-ready summary with the invariant measurements."""
        measures = self.grid.model.measures
        magnitudes = np.abs(self.f)
        away, at_origin = self.origin_classes()
        ratios = []
        for i in away:
            inf_abs, sup_abs = self.grid.norm_abs_range(self.cubes[i])
            ratios.append(sup_abs / inf_abs)
        chart = self.grid.sites
        return CZSummary(
            region=self.grid.region,
            threshold=self.threshold,
            cubes=[
                CubeSummary(
                    level=cube.level,
                    index=cube.index,
                    left=cube.left,
                    right=cube.right,
                    measure=cube.measure,
                    average=float(np.sum(magnitudes[cube.sites] * measures[cube.sites]))
                    / cube.measure,
                    corner_at_origin=cube.corner_at_origin,
                    n_sites=int(cube.sites.shape[0]),
                )
                for cube in self.cubes
            ],
            total_cube_measure=float(sum(cube.measure for cube in self.cubes)),
            l1_norm=float(np.sum(magnitudes[chart] * measures[chart])),
            good_sup=float(np.max(np.abs(self.good[chart]))) if chart.size else 0.0,
            reconstruction_error=float(np.max(np.abs(self.reconstruction() - self.f))),
            max_mean_error=max(
                (abs(float(np.sum(part.values * measures))) for part in self.bad), default=0.0
            ),
            away_from_origin=away,
            at_origin=at_origin,
            max_sup_inf_ratio=max(ratios) if ratios else None,
        )


def cz_decompose(grid: DyadicGrid, f: np.ndarray, threshold: float) -> CZDecomposition:
    """Return the Calderon-Zygmund decomposition of f restricted to the chart of ``grid``.

    Starting from the root cube, every unselected cube is halved and a half is selected
    when the average of |f| over it exceeds the threshold. Halving stops at cubes holding a
    single site. Values of f off the chart stay in the good part.

    Raises
    ------
    ThresholdError
        When the threshold is not positive.
    CZPreconditionError
        When the root cube average already exceeds the threshold.
    """
    if threshold <= 0:
        raise ThresholdError(threshold)
    f = np.asarray(f)
    measures = grid.model.measures
    magnitudes = np.abs(f)

    def average(cube: DyadicCube) -> float:
        return float(np.sum(magnitudes[cube.sites] * measures[cube.sites])) / cube.measure

    root = grid.root
    root_average = average(root)
    if root_average > threshold:
        raise CZPreconditionError(root_average=root_average, threshold=threshold)

    selected: list[DyadicCube] = []
    pending = [root] if root.sites.shape[0] > 1 else []
    while pending:
        cube = pending.pop()
        for child in grid.children(cube):
            if child.sites.shape[0] == 0:
                continue
            if average(child) > threshold:
                selected.append(child)
            elif child.sites.shape[0] > 1:
                pending.append(child)
    selected.sort(key=lambda cube: cube.left)

    good = f.astype(np.result_type(f, float)).copy()
    bad = []
    for cube in selected:
        mean = np.sum(f[cube.sites] * measures[cube.sites]) / cube.measure
        values = np.zeros_like(good)
        values[cube.sites] = f[cube.sites] - mean
        good[cube.sites] = mean
        bad.append(BadPart(cube=cube, values=values))
    logger.info(
        f"CZ decomposition on {grid.region.value} at threshold {threshold:.3e}: "
        f"{len(selected)} cubes selected"
    )
    return CZDecomposition(grid=grid, threshold=threshold, f=f, good=good, bad=bad)


def check_cz_invariants(decomposition: CZDecomposition, dimension: int) -> dict[str, bool]:
    """Evaluate the decomposition invariants; keys name the invariant."""
    summary = decomposition.to_summary()
    threshold = decomposition.threshold
    bound = 2**dimension * threshold
    scale = max(1.0, float(np.max(np.abs(decomposition.f))))
    return {
        "reconstruction": summary.reconstruction_error <= 1e-12 * scale,
        "mean_zero": summary.max_mean_error <= 1e-12 * scale * decomposition.grid.model.total_mass,
        "cube_average": all(cube.average <= bound * (1 + 1e-12) for cube in summary.cubes),
        "cube_measure": summary.total_cube_measure
        <= summary.l1_norm / threshold * (1 + 1e-12),
        "good_sup": summary.good_sup <= bound * (1 + 1e-12),
        "sup_inf": summary.max_sup_inf_ratio is None
        or summary.max_sup_inf_ratio <= SUP_INF_LIMIT,
    }
