"""Tests for the run artifact writers."""

import json
from pathlib import Path

from two_ends_kernels.cli.writers import MANIFEST_NAME, RunWriter, canonical_json, git_blob_sha1
from two_ends_kernels.schemas.experiment_schemas import CheckResult


def _write_run(output_dir: Path) -> RunWriter:
    """Write the same small set of artifacts into a directory."""
    writer = RunWriter(output_dir)
    writer.write_csv("values.csv", ["t", "value"], [(0.1, 1 / 3), (1.0, 2.0)])
    writer.write_json("checks.json", [CheckResult(name="mass", passed=True, value=1e-12)])
    writer.write_manifest({"seed": 3}, seed=3)
    return writer


def test_canonical_json_is_sorted_with_trailing_newline() -> None:
    """Keys are sorted and the text ends with a newline."""
    text = canonical_json({"b": 1, "a": [1, 2]})
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')


def test_git_blob_sha1_matches_git() -> None:
    """Checksums are the object ids git gives to blobs."""
    assert git_blob_sha1(b"") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
    assert git_blob_sha1(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def test_csv_floats_round_trip(tmp_path: Path) -> None:
    """Floats are written with repr."""
    _write_run(tmp_path)
    lines = (tmp_path / "values.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["t,value", f"0.1,{1 / 3!r}", "1.0,2.0"]
    assert float(lines[1].split(",")[1]) == 1 / 3


def test_manifest_lists_every_artifact(tmp_path: Path) -> None:
    """The manifest records the checksum of each written file."""
    writer = _write_run(tmp_path)
    manifest = json.loads((tmp_path / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert sorted(manifest["files"]) == ["checks.json", "values.csv"]
    assert manifest["files"]["values.csv"] == git_blob_sha1((tmp_path / "values.csv").read_bytes())
    assert manifest["files"] == writer.files
    assert manifest["seed"] == 3


def test_identical_runs_share_the_content_hash(tmp_path: Path) -> None:
    """Same config and same bytes give the same combined hash."""
    _write_run(tmp_path / "first")
    _write_run(tmp_path / "second")
    first = json.loads((tmp_path / "first" / MANIFEST_NAME).read_text(encoding="utf-8"))
    second = json.loads((tmp_path / "second" / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert first["content_hash"] == second["content_hash"]
