"""Shared pytest fixtures for the test suite."""

from pathlib import Path

import pytest
import yaml

from two_ends_kernels.geometry.model_geometry import ManifoldModel, build_two_ends_model
from two_ends_kernels.schemas.model_schemas import ModelParams
from two_ends_kernels.spectral.operators import SpectralData, assemble_laplacian, spectral_decompose

# 40 sites per end and 3 in K
SMALL_PARAMS = {"m": 4, "n": 3, "h": 0.5, "r_max": 20.0}


@pytest.fixture(scope="session")
def small_model() -> ManifoldModel:
    """Provide a coarse two-ends model shared by the whole session."""
    return build_two_ends_model(ModelParams(**SMALL_PARAMS))


@pytest.fixture(scope="session")
def small_spectrum(small_model: ManifoldModel) -> SpectralData:
    """Provide the spectral decomposition of the Laplacian of the coarse model."""
    return spectral_decompose(assemble_laplacian(small_model))


@pytest.fixture
def toy_spectrum() -> SpectralData:
    """Provide a diagonal spectrum with one zero mode and unit measures."""
    return SpectralData.from_eigenvalues([0.0, 0.25, 1.0, 4.0])


@pytest.fixture
def write_config(tmp_path: Path):
    """Return a helper writing an experiment YAML file into the test directory."""

    def _write(name: str, payload: dict) -> Path:
        path = tmp_path / f"{name}.yaml"
        path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
        return path

    return _write
