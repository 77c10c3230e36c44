"""Tests for the model text format."""

from pathlib import Path

import numpy as np
import pytest

from two_ends_kernels.exceptions import InvalidModelParamsError, SerializationVersionError
from two_ends_kernels.geometry.model_geometry import ManifoldModel
from two_ends_kernels.geometry.serialization import HEADER, load_model, save_model


def test_save_and_load_reproduce_the_model(small_model: ManifoldModel, tmp_path: Path) -> None:
    """Floats written with repr come back bit for bit."""
    loaded = load_model(save_model(small_model, tmp_path / "model.txt"))

    assert loaded.params == small_model.params
    assert np.array_equal(loaded.regions, small_model.regions)
    assert np.array_equal(loaded.radii, small_model.radii)
    assert np.array_equal(loaded.measures, small_model.measures)
    assert np.array_equal(loaded.edges, small_model.edges)
    assert np.array_equal(loaded.conductances, small_model.conductances)
    assert np.array_equal(loaded.lengths, small_model.lengths)


def test_unknown_header_is_rejected(tmp_path: Path) -> None:
    """Files from another format version are refused."""
    path = tmp_path / "model.txt"
    path.write_text("# two-ends-model v0\n", encoding="utf-8")
    with pytest.raises(SerializationVersionError):
        load_model(path)


def test_missing_params_line_is_rejected(tmp_path: Path) -> None:
    """The second line must carry the model parameters."""
    path = tmp_path / "model.txt"
    path.write_text(f"{HEADER}\n[sites]\n", encoding="utf-8")
    with pytest.raises(InvalidModelParamsError):
        load_model(path)
