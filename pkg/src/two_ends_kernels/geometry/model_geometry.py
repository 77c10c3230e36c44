"""Discrete models of the manifold with two ends: measure, distance, |x| and ball volumes.

In RadialRay mode the manifold is collapsed onto its radial coordinate: the big end is a
weighted half-line with density rho^(m-1), the small end a weighted half-line with density
rho^(n-1), and the central part K is a segment with unit density joining them. Here
rho = 1 + r is the chart radius of an end, r the distance to the boundary of K.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import MeshModeEnum, RegionEnum
from two_ends_kernels.exceptions import (
    DisconnectedModelError,
    InsufficientRangeError,
    InvalidModelParamsError,
    InvalidSiteError,
    UnsupportedMeshModeError,
)
from two_ends_kernels.schemas.model_schemas import ModelParams, RegimeVolumeFit, VolumeReport

logger = logging.getLogger(__name__)

MIN_RADII_PER_REGIME = 8
MIN_REPORT_R_MAX = 20.0
N_WITNESS_SITES = 3
REGION_VALUES = frozenset(region.value for region in RegionEnum)


@dataclass(frozen=True, eq=False)
class ManifoldModel:
    """Weighted graph approximating the manifold with two ends.

    Sites are identified by their index ``0..n_sites-1``. Edges are stored once, as
    ``(i, j)`` pairs with ``i < j``; the conductance and length arrays are aligned with them.
    """

    params: ModelParams
    regions: np.ndarray
    radii: np.ndarray
    measures: np.ndarray
    edges: np.ndarray
    conductances: np.ndarray
    lengths: np.ndarray

    def __post_init__(self) -> None:
        """Check the structural invariants of the graph."""
        n_sites = self.measures.shape[0]
        if self.regions.shape != (n_sites,) or self.radii.shape != (n_sites,):
            raise InvalidModelParamsError("regions, radii and measures must have equal length")
        if not set(np.unique(self.regions)).issubset(REGION_VALUES):
            raise InvalidModelParamsError(f"unknown region labels in {np.unique(self.regions)}")
        if np.any(self.measures <= 0):
            raise InvalidModelParamsError("every site needs a positive measure")
        if np.any(self.radii < 0):
            raise InvalidModelParamsError("radial coordinates must be non-negative")
        if self.edges.ndim != 2 or self.edges.shape[1] != 2:  # noqa: PLR2004
            raise InvalidModelParamsError("edges must be an (E, 2) array")
        if np.any(self.edges[:, 0] >= self.edges[:, 1]):
            raise InvalidModelParamsError("edges must be stored once with i < j")
        if np.any(self.conductances <= 0) or np.any(self.lengths <= 0):
            raise InvalidModelParamsError("conductances and lengths must be positive")
        n_components, _ = connected_components(self.length_graph, directed=False)
        if n_components != 1:
            raise DisconnectedModelError(n_components)

    @property
    def n_sites(self) -> int:
        """Return the number of sites."""
        return int(self.measures.shape[0])

    @property
    def site_ids(self) -> np.ndarray:
        """Return the site identifiers."""
        return np.arange(self.n_sites)

    @property
    def total_mass(self) -> float:
        """Return the measure of the whole model."""
        return float(self.measures.sum())

    def region_mask(self, region: RegionEnum) -> np.ndarray:
        """Return the boolean indicator of a region."""
        return self.regions == region.value

    def sites_in(self, region: RegionEnum) -> np.ndarray:
        """Return the indices of the sites of a region."""
        return np.flatnonzero(self.region_mask(region))

    def region_of(self, site: int) -> RegionEnum:
        """Return the region of a site."""
        self.check_site(site)
        return RegionEnum(str(self.regions[site]))

    def check_site(self, site: int) -> None:
        """Raise if ``site`` is not a valid site index."""
        if not 0 <= site < self.n_sites:
            raise InvalidSiteError(site=site, n_sites=self.n_sites)

    @cached_property
    def site_dimensions(self) -> np.ndarray:
        """Return the local dimension of the end each site belongs to (m on K)."""
        return np.where(
            self.region_mask(RegionEnum.SMALL_END), self.params.n, self.params.m
        ).astype(float)

    @cached_property
    def conductance_matrix(self) -> csr_matrix:
        """Return the symmetric sparse conductance matrix."""
        return self._symmetric_sparse(self.conductances)

    @cached_property
    def length_graph(self) -> csr_matrix:
        """Return the symmetric sparse matrix of edge lengths."""
        return self._symmetric_sparse(self.lengths)

    def _symmetric_sparse(self, values: np.ndarray) -> csr_matrix:
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.concatenate([values, values])
        return csr_matrix((data, (rows, cols)), shape=(self.n_sites, self.n_sites))

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Return the dense matrix of shortest-path distances.

        Computed by chunks of source sites with joblib when the model is below the
        configured cache cap.
        """
        if self.n_sites > config.distance_cache_cap:
            raise InvalidModelParamsError(
                f"{self.n_sites} sites exceed the distance cache cap {config.distance_cache_cap}"
            )
        n_chunks = max(1, min(self.n_sites, 4 * max(1, config.n_jobs)))
        chunks = np.array_split(self.site_ids, n_chunks)
        rows = Parallel(n_jobs=config.n_jobs)(
            delayed(dijkstra)(self.length_graph, directed=False, indices=chunk)
            for chunk in chunks
        )
        distances = np.vstack(rows)
        # Exact symmetry; dijkstra may differ in the last bit between directions
        distances = np.minimum(distances, distances.T)
        logger.debug(f"Distance matrix computed for {self.n_sites} sites")
        return distances

    def distances_from(self, site: int) -> np.ndarray:
        """Return the distances from one site to every site."""
        self.check_site(site)
        if self.n_sites <= config.distance_cache_cap:
            return self.distance_matrix[site]
        return dijkstra(self.length_graph, directed=False, indices=site)

    @cached_property
    def norm_abs_values(self) -> np.ndarray:
        """Return |x| = 1 + d(x, K) for every site."""
        center = self.sites_in(RegionEnum.CENTER)
        to_center = dijkstra(self.length_graph, directed=False, indices=center, min_only=True)
        return 1.0 + to_center


def build_two_ends_model(params: ModelParams) -> ManifoldModel:
    """Build the RadialRay model of the manifold with two ends.

    Sites are ordered along the line from the tip of the big end, through K, to the tip of
    the small end; consecutive sites are joined by an edge of length ``h``. Site weights are
    ``rho^(d-1) * h`` on the ends and ``h`` on K, and conductances follow the finite-volume
    rule ``sqrt(w_i w_j) / h``. No edge leaves the last site of an end (reflecting closure).
    """
    if params.mode != MeshModeEnum.RADIAL_RAY:
        raise UnsupportedMeshModeError(params.mode.value)

    h = params.h
    n_center = round(params.center_width / h) + 1
    n_ray = round(params.r_max / h)

    ray_radii = h * np.arange(1, n_ray + 1)
    big_radii = ray_radii[::-1]
    center_radii = np.zeros(n_center)
    radii = np.concatenate([big_radii, center_radii, ray_radii])
    regions = np.array(
        [RegionEnum.BIG_END.value] * n_ray
        + [RegionEnum.CENTER.value] * n_center
        + [RegionEnum.SMALL_END.value] * n_ray
    )
    densities = np.concatenate(
        [
            (1.0 + big_radii) ** (params.m - 1),
            np.ones(n_center),
            (1.0 + ray_radii) ** (params.n - 1),
        ]
    )
    n_sites = radii.shape[0]
    edges = np.column_stack([np.arange(n_sites - 1), np.arange(1, n_sites)])
    lengths = np.full(n_sites - 1, h)
    conductances = np.sqrt(densities[:-1] * densities[1:]) / lengths

    model = ManifoldModel(
        params=params,
        regions=regions,
        radii=radii,
        measures=densities * h,
        edges=edges,
        conductances=conductances,
        lengths=lengths,
    )
    logger.info(
        f"Built two-ends model m={params.m}, n={params.n}, h={h}, r_max={params.r_max}: "
        f"{model.n_sites} sites ({n_center} in K)"
    )
    return model


def graph_distance(model: ManifoldModel, x: int, y: int) -> float:
    """Return the shortest-path distance between two sites."""
    model.check_site(y)
    return float(model.distances_from(x)[y])


def norm_abs(model: ManifoldModel, x: int) -> float:
    """Return |x| = 1 + d(x, K)."""
    model.check_site(x)
    return float(model.norm_abs_values[x])


def ball_volume(model: ManifoldModel, x: int, r: float) -> float:
    """Return the measure of the closed graph ball B(x, r)."""
    distances = model.distances_from(x)
    return float(model.measures[distances <= r].sum())


def cap_fraction(model: ManifoldModel, x: int, r: float) -> float:
    """Return the fraction of a radial shell covered by a geodesic ball of radius r.

    On an end of chart dimension d the shell through x is a sphere of radius |x|; a ball of
    radius r covers a cap of relative size min(1, r/|x|)^(d-1). On the small end the
    compact factor of dimension m-n is covered in proportion min(1, r)^(m-n).
    """
    abs_x = norm_abs(model, x)
    dimension = model.site_dimensions[x]
    fraction = min(1.0, r / abs_x) ** (dimension - 1)
    if model.region_of(x) == RegionEnum.SMALL_END:
        fraction *= min(1.0, r) ** (model.params.m - model.params.n)
    return float(fraction)


def geodesic_ball_volume(model: ManifoldModel, x: int, r: float) -> float:
    """Return the volume of the manifold ball B(x, r) represented by the radial model."""
    return ball_volume(model, x, r) * cap_fraction(model, x, r)


def doubling_ratio_sweep(model: ManifoldModel, x: int, radii: np.ndarray) -> np.ndarray:
    """Return V(x, 2r) / V(x, r) for each radius of the sweep."""
    return np.array(
        [geodesic_ball_volume(model, x, 2 * r) / geodesic_ball_volume(model, x, r) for r in radii]
    )


def _half_step_radii(h: float, r_low: float, r_high: float, n_target: int = 24) -> np.ndarray:
    """Return radii of the form (k + 1/2) h, log-spaced between r_low and r_high.

    Half-step radii never fall on a site, so a ball of radius (k + 1/2) h on a ray holds
    exactly 2k + 1 sites.
    """
    k_low = max(1, int(np.ceil(r_low / h - 0.5)))
    k_high = int(np.floor(r_high / h - 0.5))
    if k_high < k_low:
        return np.array([])
    ks = np.unique(np.round(np.geomspace(k_low, k_high, n_target)).astype(int))
    return (ks + 0.5) * h


def _fit_regime(
    model: ManifoldModel, regime: str, expected: int, x: int, radii: np.ndarray
) -> RegimeVolumeFit:
    if radii.shape[0] < MIN_RADII_PER_REGIME:
        raise InsufficientRangeError(
            regime=regime, n_radii=int(radii.shape[0]), required=MIN_RADII_PER_REGIME
        )
    volumes = np.array([geodesic_ball_volume(model, x, r) for r in radii])
    log_r, log_v = np.log(radii), np.log(volumes)
    slope, intercept = np.polyfit(log_r, log_v, 1)
    residuals = log_v - (slope * log_r + intercept)
    return RegimeVolumeFit(
        regime=regime,
        expected_slope=expected,
        slope=float(slope),
        intercept=float(intercept),
        r_min=float(radii[0]),
        r_max=float(radii[-1]),
        n_radii=int(radii.shape[0]),
        residuals=residuals.tolist(),
    )


def _site_at_radius(model: ManifoldModel, region: RegionEnum, r: float) -> int:
    sites = model.sites_in(region)
    return int(sites[np.argmin(np.abs(model.radii[sites] - r))])


def volume_growth_report(model: ManifoldModel) -> VolumeReport:
    """Fit the log-log volume growth slopes of the three volume regimes.

    (i) r <= 1 around a big-end site: slope m. (ii) balls inside the small end with r > 1:
    slope n. (iii) x on the small end near K and r > 2|x|: slope m, since the ball then
    reaches far into the big end.
    """
    params = model.params
    if params.r_max < MIN_REPORT_R_MAX:
        raise InvalidModelParamsError(
            f"volume report needs r_max >= {MIN_REPORT_R_MAX}, got {params.r_max}"
        )
    h, r_max = params.h, params.r_max

    x_big = _site_at_radius(model, RegionEnum.BIG_END, r_max / 2)
    small_regime = _fit_regime(
        model, "small_balls", params.m, x_big, _half_step_radii(h, 2 * h, 1.0)
    )

    x_small_deep = _site_at_radius(model, RegionEnum.SMALL_END, r_max / 2)
    depth = float(model.radii[x_small_deep])
    inside_regime = _fit_regime(
        model,
        "inside_small_end",
        params.n,
        x_small_deep,
        _half_step_radii(h, 1.0, 0.9 * min(depth, r_max - depth)),
    )

    x_small_near = _site_at_radius(model, RegionEnum.SMALL_END, h)
    abs_near = norm_abs(model, x_small_near)
    far_radii = np.geomspace(max(2 * abs_near, r_max / 8), 0.95 * r_max, 24)
    far_regime = _fit_regime(model, "beyond_twice_abs", params.m, x_small_near, far_radii)

    sweep = np.geomspace(1.0, r_max / 2, 24)
    ratios = doubling_ratio_sweep(model, x_small_deep, sweep)

    # 3|x| <= r_max keeps the doubled ball inside the truncated small end
    witness_sites = [
        _site_at_radius(model, RegionEnum.SMALL_END, target - 1.0)
        for target in np.geomspace(2.0, r_max / 3, N_WITNESS_SITES)
    ]
    witness_abs = [norm_abs(model, x) for x in witness_sites]
    witness_ratios = [
        float(doubling_ratio_sweep(model, x, np.array([abs_x + h / 4]))[0])
        for x, abs_x in zip(witness_sites, witness_abs, strict=True)
    ]
    logger.info(
        f"Volume slopes: small={small_regime.slope:.3f}, inside={inside_regime.slope:.3f}, "
        f"beyond={far_regime.slope:.3f}; max doubling ratio {ratios.max():.2f}, "
        f"witness ratios {[round(r, 3) for r in witness_ratios]}"
    )
    return VolumeReport(
        params=params,
        regimes=[small_regime, inside_regime, far_regime],
        max_doubling_ratio=float(ratios.max()),
        doubling_radii=sweep.tolist(),
        doubling_ratios=ratios.tolist(),
        witness_abs=witness_abs,
        witness_ratios=witness_ratios,
    )
