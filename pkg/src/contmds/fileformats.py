"""JSON file schemas for distance tensors and embeddings.

Both documents carry ``format_version`` 1.  Two-axis grids store the axes
separately (``alpha`` fast, ``beta`` slow) with slices flattened
alpha-fastest; the declared slice count must equal the axis product.
Floats are serialized with Python's shortest exact representation (at most
17 significant digits), so save followed by load is bit-exact and
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import ParseError, SchemaVersionMismatch
from .metrics import (
    roughness_per_curve,
    stability_vectors,
    stress_per_slice,
    total_cost,
    weighted_stress_per_slice,
)
from .model import (
    DistanceTensor,
    EmbeddingCurves,
    HyperparameterGrid,
    SolverSettings,
    settings_to_dict,
    validate_distance_tensor,
)
from .penalty import grid_roughness_operator

FORMAT_VERSION = 1


def _dump(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return doc


def _require(doc: dict, key: str, kind, ctx: str):
    if key not in doc:
        raise ParseError(f"{ctx}: missing required key {key!r}")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{ctx}: key {key!r} must be a number")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError(f"{ctx}: key {key!r} must be an integer")
        return value
    if not isinstance(value, kind):
        raise ParseError(f"{ctx}: key {key!r} has the wrong type")
    return value


def _check_version(doc: dict, ctx: str) -> None:
    version = _require(doc, "format_version", int, ctx)
    if version != FORMAT_VERSION:
        raise SchemaVersionMismatch(
            f"{ctx}: format_version {version} is not supported (expected {FORMAT_VERSION})"
        )


def _grid_from_document(doc: dict, ctx: str) -> HyperparameterGrid:
    alpha = np.asarray(_require(doc, "alpha", list, ctx), dtype=float)
    beta = None
    if "T_beta" in doc or "beta" in doc:
        t_beta = _require(doc, "T_beta", int, ctx)
        beta = np.asarray(_require(doc, "beta", list, ctx), dtype=float)
        if beta.size != t_beta:
            raise SchemaVersionMismatch(
                f"{ctx}: beta axis has {beta.size} values but T_beta is {t_beta}"
            )
    grid = HyperparameterGrid(alpha, beta)
    declared = _require(doc, "T", int, ctx)
    if declared != grid.n_slices:
        axes = f"alpha({grid.n_alpha})"
        if beta is not None:
            axes += f" x beta({grid.n_beta}) = {grid.n_slices}"
        raise SchemaVersionMismatch(
            f"{ctx}: T is {declared} but the grid defines {grid.n_slices} slices ({axes})"
        )
    return grid


def _grid_to_document(doc: dict, grid: HyperparameterGrid) -> None:
    if grid.two_axis:
        doc["T_beta"] = grid.n_beta
    doc["alpha"] = [float(a) for a in grid.alpha]
    if grid.two_axis:
        doc["beta"] = [float(b) for b in grid.beta]


def tensor_document(tensor: DistanceTensor) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "T": tensor.n_slices,
        "N": tensor.n_items,
    }
    _grid_to_document(doc, tensor.grid)
    doc["labels"] = list(tensor.labels)
    doc["data"] = [slice_.tolist() for slice_ in tensor.entries]
    return doc


def save_distance_tensor(tensor: DistanceTensor, path) -> None:
    _dump(tensor_document(tensor), path)


def tensor_from_document(doc: dict, ctx: str = "distance tensor") -> DistanceTensor:
    _check_version(doc, ctx)
    grid = _grid_from_document(doc, ctx)
    n = _require(doc, "N", int, ctx)
    labels = _require(doc, "labels", list, ctx)
    data = _require(doc, "data", list, ctx)
    try:
        arr = np.asarray(data, dtype=float)
    except ValueError as exc:
        raise ParseError(f"{ctx}: key 'data' is not a rectangular numeric array: {exc}") from exc
    if arr.ndim != 3 or arr.shape != (grid.n_slices, n, n):
        raise SchemaVersionMismatch(
            f"{ctx}: data has shape {tuple(arr.shape)}, expected ({grid.n_slices}, {n}, {n})"
        )
    return validate_distance_tensor(arr, grid, labels=labels)


def load_distance_tensor(path) -> DistanceTensor:
    return tensor_from_document(_load_json(path), ctx=str(path))


def embedding_document(result, tensor: DistanceTensor, settings: SolverSettings | None = None) -> dict:
    """Wire/file form of a solve: coordinates plus provenance."""
    settings = settings if settings is not None else result.settings
    curves = result.curves
    doc = {
        "format_version": FORMAT_VERSION,
        "T": curves.n_slices,
        "d": curves.dim,
        "N": curves.n_items,
    }
    _grid_to_document(doc, curves.grid)
    doc["labels"] = list(tensor.labels)
    doc["coords"] = [slice_.tolist() for slice_ in curves.coords]
    doc["provenance"] = {
        "settings": settings_to_dict(settings),
        "seed": settings.seed,
        "cost_trace": [float(c) for c in result.cost_trace],
        "converged": bool(result.converged),
        "stress_per_slice": [float(s) for s in stress_per_slice(curves, tensor)],
    }
    return doc


def save_embedding_document(doc: dict, path) -> None:
    _dump(doc, path)


def load_embedding_document(path) -> dict:
    doc = _load_json(path)
    validate_embedding_document(doc, ctx=str(path))
    return doc


def validate_embedding_document(doc: dict, ctx: str = "embedding") -> None:
    _check_version(doc, ctx)
    grid = _grid_from_document(doc, ctx)
    n = _require(doc, "N", int, ctx)
    dim = _require(doc, "d", int, ctx)
    labels = _require(doc, "labels", list, ctx)
    if len(labels) != n:
        raise SchemaVersionMismatch(f"{ctx}: {len(labels)} labels for N={n} items")
    coords = _require(doc, "coords", list, ctx)
    try:
        arr = np.asarray(coords, dtype=float)
    except ValueError as exc:
        raise ParseError(f"{ctx}: key 'coords' is not a rectangular numeric array: {exc}") from exc
    if arr.shape != (grid.n_slices, n, dim):
        raise SchemaVersionMismatch(
            f"{ctx}: coords have shape {tuple(arr.shape)}, expected ({grid.n_slices}, {n}, {dim})"
        )
    prov = _require(doc, "provenance", dict, ctx)
    _require(prov, "settings", dict, f"{ctx}: provenance")
    _require(prov, "cost_trace", list, f"{ctx}: provenance")
    if "converged" not in prov:
        raise ParseError(f"{ctx}: provenance: missing required key 'converged'")


def curves_from_document(doc: dict) -> EmbeddingCurves:
    grid = _grid_from_document(doc, "embedding")
    return EmbeddingCurves(grid=grid, coords=np.asarray(doc["coords"], dtype=float))


def metrics_document(curves: EmbeddingCurves, tensor: DistanceTensor, weights=None, lam: float = 0.0) -> dict:
    """Diagnostics payload shared by the metrics command and the serve API."""
    op = grid_roughness_operator(curves.grid)
    rough = roughness_per_curve(curves, op)
    if curves.n_slices >= 2:
        instability = stability_vectors(curves, op).path_length
    else:
        instability = np.zeros(curves.n_items)
    doc = {
        "total_cost": float(total_cost(curves, tensor, weights, lam, op)),
        "stress_per_slice": [float(s) for s in weighted_stress_per_slice(curves, tensor, weights)],
        "roughness_per_curve": [float(r) for r in rough],
        "instability": [float(s) for s in instability],
        "labels": list(tensor.labels),
    }
    return doc


def load_matrix(path) -> np.ndarray:
    """Auxiliary input: a square matrix as a JSON array of rows or as
    whitespace-separated text."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        arr = np.asarray(data, dtype=float)
    else:
        arr = np.loadtxt(path, ndmin=2)
    if arr.ndim != 2:
        raise ParseError(f"{path}: expected a 2-D matrix, got shape {tuple(arr.shape)}")
    return arr


def load_points(path) -> np.ndarray:
    """Auxiliary input: an (N, D) point array, JSON or whitespace text."""
    return load_matrix(path)


def load_graphs(path) -> list[np.ndarray]:
    """Auxiliary input: a JSON document with key ``graphs`` holding a list
    of square adjacency matrices."""
    doc = _load_json(path)
    graphs = _require(doc, "graphs", list, str(path))
    return [np.asarray(g, dtype=float) for g in graphs]


def load_groups(path) -> list:
    """Auxiliary input: group labels, one per item (JSON list or one label
    per line)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        if not isinstance(data, list):
            raise ParseError(f"{path}: expected a JSON list of group labels")
        return data
    return [line.strip() for line in path.read_text().splitlines() if line.strip()]
