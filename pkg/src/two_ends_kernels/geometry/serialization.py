"""Text serialization of manifold models.

File layout::

    # two-ends-model v1
    params {"m": 4, "n": 3, ...}
    [sites]
    id,region,r,mu
    ...
    [edges]
    i,j,conductance,length
    ...

Floats are written with ``repr`` so a save/load cycle reproduces the model exactly.
"""

import csv
import json
import logging
from pathlib import Path

import numpy as np

from two_ends_kernels.exceptions import InvalidModelParamsError, SerializationVersionError
from two_ends_kernels.geometry.model_geometry import ManifoldModel
from two_ends_kernels.schemas.model_schemas import ModelParams

logger = logging.getLogger(__name__)

HEADER = "# two-ends-model v1"
SITES_SECTION = "[sites]"
EDGES_SECTION = "[edges]"
SITE_COLUMNS = ["id", "region", "r", "mu"]
EDGE_COLUMNS = ["i", "j", "conductance", "length"]


def save_model(model: ManifoldModel, path: Path) -> Path:
    """Write a model to ``path`` and return the path."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"{HEADER}\n")
        handle.write(f"params {json.dumps(model.params.model_dump(mode='json'), sort_keys=True)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        handle.write(f"{SITES_SECTION}\n")
        writer.writerow(SITE_COLUMNS)
        for site in model.site_ids:
            writer.writerow(
                [
                    int(site),
                    str(model.regions[site]),
                    repr(float(model.radii[site])),
                    repr(float(model.measures[site])),
                ]
            )
        handle.write(f"{EDGES_SECTION}\n")
        writer.writerow(EDGE_COLUMNS)
        for (i, j), conductance, length in zip(
            model.edges, model.conductances, model.lengths, strict=True
        ):
            writer.writerow([int(i), int(j), repr(float(conductance)), repr(float(length))])
    logger.info(f"Model with {model.n_sites} sites saved to {path}")
    return path


def load_model(path: Path) -> ManifoldModel:
    """Read a model written by :func:`save_model`."""
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise SerializationVersionError(lines[0] if lines else "")
    if not lines[1].startswith("params "):
        raise InvalidModelParamsError(f"missing params line in {path}")
    params = ModelParams.model_validate_json(lines[1].removeprefix("params "))

    try:
        sites_start = lines.index(SITES_SECTION)
        edges_start = lines.index(EDGES_SECTION)
    except ValueError as exc:
        raise InvalidModelParamsError(f"missing section in {path}") from exc

    site_rows = list(csv.DictReader(lines[sites_start + 1 : edges_start]))
    edge_rows = list(csv.DictReader(lines[edges_start + 1 :]))
    ids = [int(row["id"]) for row in site_rows]
    if ids != list(range(len(ids))):
        raise InvalidModelParamsError("site ids must be 0..N-1 in order")

    model = ManifoldModel(
        params=params,
        regions=np.array([row["region"] for row in site_rows]),
        radii=np.array([float(row["r"]) for row in site_rows]),
        measures=np.array([float(row["mu"]) for row in site_rows]),
        edges=np.array([[int(row["i"]), int(row["j"])] for row in edge_rows], dtype=int).reshape(
            -1, 2
        ),
        conductances=np.array([float(row["conductance"]) for row in edge_rows]),
        lengths=np.array([float(row["length"]) for row in edge_rows]),
    )
    logger.info(f"Model with {model.n_sites} sites loaded from {path}")
    return model
