"""Tests for the constructive Whitney cover."""

import numpy as np
import pytest

from two_ends_kernels.analysis.maximal import level_set, maximal_function, region_split
from two_ends_kernels.analysis.whitney import whitney_cover
from two_ends_kernels.exceptions import WhitneyDomainError
from two_ends_kernels.geometry.model_geometry import ManifoldModel


def _line_distances(n_sites: int) -> np.ndarray:
    """Distances |i - j| of a unit-step path."""
    sites = np.arange(n_sites, dtype=float)
    return np.abs(sites[:, None] - sites[None, :])


def test_cover_of_an_interval_on_a_path() -> None:
    """The deepest site is taken first and the edges get their own small balls."""
    omega = np.zeros(10, dtype=bool)
    omega[2:7] = True
    cover = whitney_cover(_line_distances(10), omega)

    assert cover.centers.tolist() == [4, 2, 6]
    assert cover.radii.tolist() == [1.5, 0.5, 0.5]
    assert cover.covers_open_set()
    assert cover.fifth_balls_disjoint()
    assert cover.overlap_constant == 1
    summary = cover.to_summary()
    assert summary.n_open_sites == 5
    assert [ball.n_sites for ball in summary.balls] == [3, 1, 1]
    assert summary.max_weight_error == 0.0


def test_cover_rejects_degenerate_sets() -> None:
    """The open set must be non-empty with a non-empty complement."""
    distances = _line_distances(4)
    with pytest.raises(WhitneyDomainError):
        whitney_cover(distances, np.zeros(4, dtype=bool))
    with pytest.raises(WhitneyDomainError):
        whitney_cover(distances, np.ones(4, dtype=bool))


@pytest.mark.parametrize("quantile", [0.3, 0.6, 0.9])
def test_cover_of_a_maximal_level_set(small_model: ManifoldModel, quantile: float) -> None:
    """Level sets of M f_2 are covered exactly with disjoint fifth-balls."""
    f = np.random.default_rng(5).standard_normal(small_model.n_sites)
    _, f_small, _ = region_split(small_model, f)
    values = maximal_function(small_model, f_small)
    levels = np.unique(values)
    omega = level_set(values, float(levels[int(quantile * (levels.size - 1))]))
    cover = whitney_cover(small_model.distance_matrix, omega)

    summary = cover.to_summary()
    assert summary.covers_open_set
    assert summary.fifth_balls_disjoint
    assert summary.max_weight_error <= 1e-12
    assert np.all(cover.membership.sum(axis=1) >= 1)
    assert not np.any(cover.membership[:, ~omega])
