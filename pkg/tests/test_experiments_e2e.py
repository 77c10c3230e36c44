"""End-to-end runs of every experiment kind through the command line."""

import json
from pathlib import Path

import pytest
import yaml

from two_ends_kernels.cli import app
from two_ends_kernels.cli.writers import MANIFEST_NAME, git_blob_sha1

from tests.conftest import SMALL_PARAMS

EXPERIMENTS = {
    "heat": {"kind": "heat-check", "times": [0.1, 1.0, 10.0], "dump_spectrum": True},
    "poisson": {"kind": "poisson-check", "times": [0.5, 2.0], "orders": [0, 1]},
    "heat_bounds": {
        "kind": "bounds-fit",
        "kernel": "heat",
        "times": [0.5, 4.0, 16.0],
        "n_per_regime": 20,
        "min_samples_per_regime": 10,
    },
    "poisson_bounds": {
        "kind": "bounds-fit",
        "kernel": "poisson",
        "times": [0.5, 4.0, 16.0],
        "orders": [0, 1],
        "n_per_regime": 20,
        "min_samples_per_regime": 10,
        "sector_points": [[1.0, 0.5], [2.0, -0.5], [4.0, 0.3], [0.5, -0.3]],
    },
    "domination": {
        "kind": "domination",
        "potentials": [{"kind": "bump", "strength": 2.0}],
        "times": [0.5, 5.0],
        "approx_identity_order": None,
    },
    "g_function": {"kind": "g-function", "kappas": [1, 2], "n_functions": 3},
    "maximal": {"kind": "maximal", "n_functions": 3},
    "cz": {"kind": "cz-demo", "region": "small_end", "n_trials": 20},
    "whitney": {"kind": "whitney-demo", "n_trials": 10},
    "multiplier": {
        "kind": "multiplier",
        "multipliers": [{"kind": "constant"}, {"kind": "indicator", "cutoff": 2.0}],
        "n_functions": 2,
    },
}


def _run(tmp_path: Path, name: str, payload: dict) -> Path:
    """Run one experiment file and return its output directory."""
    tmp_path.mkdir(parents=True, exist_ok=True)
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(payload), encoding="utf-8")
    status = app.main(["run", str(path), "--output-root", str(tmp_path / "results")])
    assert status == app.EXIT_OK
    return tmp_path / "results" / name


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_experiment_passes_on_the_small_model(tmp_path: Path, name: str) -> None:
    """Each kind runs to completion with every check passing."""
    output_dir = _run(tmp_path, name, {"model": SMALL_PARAMS, "experiment": EXPERIMENTS[name]})

    manifest = json.loads((output_dir / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert manifest["config"]["experiment"]["kind"] == EXPERIMENTS[name]["kind"]
    for artifact, checksum in manifest["files"].items():
        assert git_blob_sha1((output_dir / artifact).read_bytes()) == checksum
    checks = json.loads((output_dir / "checks.json").read_text(encoding="utf-8"))
    assert all(check["passed"] for check in checks)


def test_reruns_are_reproducible(tmp_path: Path) -> None:
    """The same config and seed produce byte-identical artifacts."""
    payload = {"model": SMALL_PARAMS, "experiment": EXPERIMENTS["cz"], "seed": 7}
    first = _run(tmp_path / "first", "cz", payload)
    second = _run(tmp_path / "second", "cz", payload)
    manifests = [
        json.loads((output_dir / MANIFEST_NAME).read_text(encoding="utf-8"))
        for output_dir in (first, second)
    ]
    assert manifests[0]["content_hash"] == manifests[1]["content_hash"]


@pytest.mark.slow
def test_volume_regimes_on_a_fine_model(tmp_path: Path) -> None:
    """Fitted volume exponents match m, n and m within the default tolerance."""
    model = SMALL_PARAMS | {"h": 0.05}
    output_dir = _run(tmp_path, "volume", {"model": model, "experiment": {"kind": "volume"}})
    assert (output_dir / "volume_fits.csv").is_file()
