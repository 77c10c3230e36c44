"""Tests for the ``two-ends`` command line."""

import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from two_ends_kernels.cli import app
from two_ends_kernels.enums.base_enums import ExperimentKindEnum
from two_ends_kernels.exceptions import (
    EmptyRegimeError,
    SpectralConvergenceError,
    SpectralSizeError,
)

from tests.conftest import SMALL_PARAMS


def _heat_check(**experiment: object) -> dict:
    """Return a small heat-check payload."""
    return {"model": SMALL_PARAMS, "experiment": {"kind": "heat-check", **experiment}}


def test_list_kinds(capsys: pytest.CaptureFixture[str]) -> None:
    """Every experiment kind is printed."""
    assert app.main(["list-kinds"]) == app.EXIT_OK
    assert capsys.readouterr().out.split() == [kind.value for kind in ExperimentKindEnum]


def test_validate_accepts_a_good_file(write_config, capsys: pytest.CaptureFixture[str]) -> None:
    """A valid file is reported with its kind."""
    path = write_config("heat", _heat_check())
    assert app.main(["validate", str(path)]) == app.EXIT_OK
    assert "valid heat-check experiment" in capsys.readouterr().out


def test_bad_files_exit_with_config_status(
    write_config, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Unreadable, malformed and invalid files exit with status 2."""
    broken = tmp_path / "broken.yaml"
    broken.write_text("model: [1, 2\n", encoding="utf-8")
    assert app.main(["validate", str(broken)]) == app.EXIT_BAD_CONFIG

    assert app.main(["run", str(tmp_path / "missing.yaml")]) == app.EXIT_BAD_CONFIG

    invalid = write_config("invalid", _heat_check(times=[-1.0]))
    capsys.readouterr()
    assert app.main(["run", str(invalid), "--output-root", str(tmp_path)]) == app.EXIT_BAD_CONFIG
    assert "experiment" in capsys.readouterr().err

    bad_model = write_config("bad_model", {**_heat_check(), "model": SMALL_PARAMS | {"m": 2}})
    assert app.main(["validate", str(bad_model)]) == app.EXIT_BAD_CONFIG


def test_run_writes_artifacts(write_config, tmp_path: Path) -> None:
    """A passing run writes its checks, summary and manifest under the config stem."""
    path = write_config("heat", _heat_check(times=[0.5, 2.0]))
    assert app.main(["run", str(path), "--output-root", str(tmp_path / "out")]) == app.EXIT_OK

    output_dir = tmp_path / "out" / "heat"
    for name in ("checks.json", "summary.txt", "manifest.json", "heat_checks.csv"):
        assert (output_dir / name).is_file()
    checks = json.loads((output_dir / "checks.json").read_text(encoding="utf-8"))
    assert checks
    assert all(check["passed"] for check in checks)
    manifest = json.loads((output_dir / "manifest.json").read_text(encoding="utf-8"))
    assert "heat_checks.csv" in manifest["files"]
    assert "all checks passed" in (output_dir / "summary.txt").read_text(encoding="utf-8")


def test_output_dir_overrides_the_stem(write_config, tmp_path: Path) -> None:
    """The output_dir field names the run folder."""
    path = write_config("heat", {**_heat_check(times=[1.0]), "output_dir": "named"})
    assert app.main(["run", str(path), "--output-root", str(tmp_path)]) == app.EXIT_OK
    assert (tmp_path / "named" / "manifest.json").is_file()


def test_failing_check_exits_with_status_one(
    write_config, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """An unreachable tolerance fails the semigroup check."""
    path = write_config("strict", _heat_check(times=[0.5, 2.0], semigroup_tolerance=1e-300))
    assert app.main(["run", str(path), "--output-root", str(tmp_path)]) == app.EXIT_CHECK_FAILED
    assert "semigroup" in capsys.readouterr().err
    summary = (tmp_path / "strict" / "summary.txt").read_text(encoding="utf-8")
    assert "first failing check: semigroup" in summary


def test_numerical_failure_exits_with_status_one(
    write_config, tmp_path: Path, mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    """Numerical failures during a run are reported as failed runs."""
    run = mocker.patch.object(
        app, "run_experiment", side_effect=SpectralConvergenceError("no convergence")
    )
    path = write_config("heat", _heat_check())
    assert app.main(["run", str(path), "--output-root", str(tmp_path)]) == app.EXIT_CHECK_FAILED
    run.assert_called_once()
    assert "numerical failure" in capsys.readouterr().err


def test_value_errors_during_a_run_are_failed_runs(
    write_config, tmp_path: Path, mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    """A valid file whose run raises a ValueError exits with status 1, not as a config error."""
    mocker.patch.object(app, "run_experiment", side_effect=EmptyRegimeError("heat-2"))
    path = write_config("heat", _heat_check())
    assert app.main(["run", str(path), "--output-root", str(tmp_path)]) == app.EXIT_CHECK_FAILED
    err = capsys.readouterr().err
    assert "run failed" in err
    assert "invalid experiment config" not in err


def test_models_too_large_to_solve_are_config_errors(
    write_config, tmp_path: Path, mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    """Size limits hit at run time point back at the file and exit with status 2."""
    too_large = SpectralSizeError(n_sites=9000, cap=4000)
    mocker.patch.object(app, "run_experiment", side_effect=too_large)
    path = write_config("heat", _heat_check())
    assert app.main(["run", str(path), "--output-root", str(tmp_path)]) == app.EXIT_BAD_CONFIG
    assert "spectral size cap" in capsys.readouterr().err
