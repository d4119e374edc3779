"""Readers and writers for distance matrices, clusterings and planted instances.

Matrix text format: the first line holds ``n``; each of the next ``n`` lines
holds ``n`` whitespace-separated decimals.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Clustering, DistanceMatrix
from .errors import InputError


def format_matrix(D: DistanceMatrix) -> str:
    lines = [str(D.n)]
    lines += [" ".join(repr(float(x)) for x in row) for row in D.d]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, metric: bool = True) -> DistanceMatrix:
    tokens = text.split()
    if not tokens:
        raise InputError("empty matrix file")
    try:
        n = int(tokens[0])
        values = [float(t) for t in tokens[1:]]
    except ValueError as exc:
        raise InputError(f"bad matrix file: {exc}") from None
    if n < 0 or len(values) != n * n:
        raise InputError(f"expected {n}x{n} values, found {len(values)}")
    return DistanceMatrix(np.array(values).reshape(n, n), metric=metric)


def write_matrix(path, D: DistanceMatrix) -> None:
    Path(path).write_text(format_matrix(D))


def read_matrix(path, metric: bool = True) -> DistanceMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read matrix {path}: {exc}") from None
    return parse_matrix(text, metric=metric)


def clustering_to_json(C: Clustering, cost: float | None = None) -> str:
    return json.dumps(C.to_dict(cost))


def clustering_from_json(text: str) -> Clustering:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad clustering JSON: {exc}") from None
    return Clustering.from_dict(obj)


def sidecar_path(matrix_path) -> Path:
    p = Path(matrix_path)
    return p.with_name(p.stem + ".json")


def write_instance(path, inst) -> Path:
    """Write ``inst.matrix`` to ``path`` and its metadata to a JSON sidecar.

    Returns the sidecar path (``<stem>.json`` next to the matrix file).
    """
    write_matrix(path, inst.matrix)
    side = sidecar_path(path)
    side.write_text(json.dumps(inst.sidecar(), indent=1))
    return side


def read_instance(path):
    from .lab.instances import PlantedInstance

    side = sidecar_path(path)
    try:
        meta = json.loads(side.read_text())
    except OSError as exc:
        raise InputError(f"cannot read sidecar {side}: {exc}") from None
    return PlantedInstance.from_sidecar(read_matrix(path), meta)
