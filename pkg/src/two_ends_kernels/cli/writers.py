"""Deterministic writers for run artifacts and the run manifest."""

import csv
import hashlib
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def canonical_json(value: Any) -> str:
    """Return sorted, indented JSON with a trailing newline."""
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def git_blob_sha1(content: bytes) -> str:
    """Return the object id git assigns to a blob with this content."""
    return hashlib.sha1(b"blob %d\x00" % len(content) + content).hexdigest()  # noqa: S324


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


class RunWriter:
    """Write the files of one run into its output directory and keep their checksums."""

    def __init__(self, output_dir: Path) -> None:
        """Initialise the writer; the directory is created on first write."""
        self.output_dir = output_dir
        self.files: dict[str, str] = {}

    def path(self, name: str) -> Path:
        """Return the path of an artifact, creating the output directory."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def register(self, path: Path) -> Path:
        """Record the checksum of a file written by another routine."""
        self.files[path.name] = git_blob_sha1(path.read_bytes())
        logger.debug(f"Registered artifact {path.name}")
        return path

    def write_text(self, name: str, text: str) -> Path:
        """Write a text artifact."""
        path = self.path(name)
        path.write_text(text, encoding="utf-8")
        return self.register(path)

    def write_json(self, name: str, payload: BaseModel | Sequence[BaseModel] | Any) -> Path:
        """Write a JSON artifact; pydantic models are dumped in JSON mode."""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        elif isinstance(payload, list) and payload and isinstance(payload[0], BaseModel):
            payload = [item.model_dump(mode="json") for item in payload]
        return self.write_text(name, canonical_json(payload))

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Write a CSV artifact; floats are written with ``repr``."""
        path = self.path(name)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(value) for value in row])
        return self.register(path)

    def write_manifest(self, config_echo: dict[str, Any], seed: int) -> Path:
        """Write the manifest listing every artifact with its checksum.

        The combined hash covers the config echo and the artifact checksums, so two runs
        with the same hash produced the same bytes.
        """
        files = dict(sorted(self.files.items()))
        combined = hashlib.sha256(
            canonical_json({"config": config_echo, "files": files}).encode("utf-8")
        ).hexdigest()
        manifest = {"config": config_echo, "seed": seed, "files": files, "content_hash": combined}
        path = self.path(MANIFEST_NAME)
        path.write_text(canonical_json(manifest), encoding="utf-8")
        logger.info(f"Manifest with {len(files)} artifacts written to {path}")
        return path
