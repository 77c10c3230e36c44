"""Tests for the discrete operators and the spectral oracle."""

from pathlib import Path

import numpy as np
import pytest

from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import PotentialKindEnum, RegionEnum
from two_ends_kernels.exceptions import NegativePotentialError, SpectralSizeError
from two_ends_kernels.geometry.model_geometry import ManifoldModel
from two_ends_kernels.spectral.operators import (
    SpectralData,
    add_potential,
    assemble_laplacian,
    export_spectrum_csv,
    mu_inner,
    potential_from_profile,
    spectral_decompose,
)


def _random_pair(n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw two reproducible random site vectors."""
    rng = np.random.default_rng(7)
    return rng.standard_normal(n_sites), rng.standard_normal(n_sites)


def test_laplacian_annihilates_constants(small_model: ManifoldModel) -> None:
    """Constants are harmonic for the graph Laplacian."""
    laplacian = assemble_laplacian(small_model)
    assert np.allclose(laplacian.apply(np.ones(small_model.n_sites)), 0.0, atol=1e-10)


def test_laplacian_is_self_adjoint_and_nonnegative(small_model: ManifoldModel) -> None:
    """<Lf, g> = <f, Lg> and <Lf, f> >= 0 in the weighted inner product."""
    laplacian = assemble_laplacian(small_model)
    f, g = _random_pair(small_model.n_sites)
    left = mu_inner(small_model.measures, laplacian.apply(f), g)
    right = mu_inner(small_model.measures, f, laplacian.apply(g))
    assert left == pytest.approx(right, rel=1e-10)
    assert laplacian.quadratic_form(f) > 0
    assert laplacian.trace() == pytest.approx(np.trace(laplacian.dense_matrix()))


def test_add_potential_validates_input(small_model: ManifoldModel) -> None:
    """Potentials must be non-negative site vectors."""
    laplacian = assemble_laplacian(small_model)
    with pytest.raises(NegativePotentialError):
        add_potential(laplacian, -np.ones(small_model.n_sites))
    with pytest.raises(ValueError, match="shape"):
        add_potential(laplacian, np.ones(3))
    shifted = add_potential(laplacian, np.full(small_model.n_sites, 2.0))
    assert np.allclose(shifted.apply(np.ones(small_model.n_sites)), 2.0, atol=1e-10)


def test_potential_profiles(small_model: ManifoldModel) -> None:
    """Bumps live on K and radial decay follows |x|^-power."""
    bump = potential_from_profile(small_model, PotentialKindEnum.BUMP, 3.0)
    center = small_model.region_mask(RegionEnum.CENTER)
    assert np.all(bump[center] == 3.0)
    assert np.all(bump[~center] == 0.0)
    decay = potential_from_profile(small_model, PotentialKindEnum.RADIAL_DECAY, 1.0, power=2.0)
    assert decay[0] == pytest.approx(1 / 21.0**2)
    constant = potential_from_profile(small_model, PotentialKindEnum.CONSTANT, 0.5)
    assert np.all(constant == 0.5)


def test_spectrum_is_orthonormal_with_one_zero_mode(small_spectrum: SpectralData) -> None:
    """Eigenfunctions are orthonormal for mu and the connected graph has one zero mode."""
    gram = small_spectrum.eigenvectors.T @ (
        small_spectrum.measures[:, None] * small_spectrum.eigenvectors
    )
    assert np.allclose(gram, np.eye(small_spectrum.n_modes), atol=1e-9)
    assert int(small_spectrum.zero_mask.sum()) == 1
    assert np.all(np.diff(small_spectrum.eigenvalues) >= 0)
    assert small_spectrum.lambda_min_positive > 0


def test_spectrum_reproduces_the_operator(
    small_model: ManifoldModel, small_spectrum: SpectralData
) -> None:
    """Applying the symbol lambda reproduces Lf."""
    f, _ = _random_pair(small_model.n_sites)
    expected = assemble_laplacian(small_model).apply(f)
    reproduced = small_spectrum.apply_symbol(small_spectrum.eigenvalues, f)
    assert np.allclose(reproduced, expected, atol=1e-8)


def test_spectral_size_cap(small_model: ManifoldModel, monkeypatch: pytest.MonkeyPatch) -> None:
    """Models above the configured cap are refused by the dense oracle."""
    monkeypatch.setattr(config, "spectral_size_cap", 10)
    with pytest.raises(SpectralSizeError):
        spectral_decompose(assemble_laplacian(small_model))


def test_toy_spectrum_helpers(toy_spectrum: SpectralData) -> None:
    """Toy spectra sort their eigenvalues and project on the zero mode."""
    assert SpectralData.from_eigenvalues([2.0, 0.0, 1.0]).eigenvalues.tolist() == [0.0, 1.0, 2.0]
    assert toy_spectrum.lambda_min_positive == 0.25
    assert toy_spectrum.zero_mode_projection(np.ones(4)).tolist() == [1.0, 0.0, 0.0, 0.0]
    with pytest.raises(ValueError, match="positive eigenvalue"):
        _ = SpectralData.from_eigenvalues([0.0]).lambda_min_positive


def test_export_spectrum_csv(toy_spectrum: SpectralData, tmp_path: Path) -> None:
    """One header row plus one row per eigenvalue."""
    path = export_spectrum_csv(toy_spectrum, tmp_path / "spectrum.csv", include_eigenvectors=True)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "j,eigenvalue,phi_0,phi_1,phi_2,phi_3"
    assert len(lines) == 5
    assert lines[2].startswith("1,0.25,")
