"""Diagnostics for reading embeddings: distortion, cost, stability, quality.

Stress values count every ordered pair, i.e. each unordered pair appears
twice, matching a squared Frobenius norm over full difference matrices.
Keep that in mind when comparing against half-matrix conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from .exceptions import InvalidSettings, ShapeMismatch, SingleSliceInput
from .model import DistanceTensor, EmbeddingCurves, WeightTensor
from .penalty import RoughnessOperator, grid_roughness_operator


def _coords(curves) -> np.ndarray:
    if isinstance(curves, EmbeddingCurves):
        return curves.coords
    arr = np.asarray(curves, dtype=float)
    if arr.ndim != 3:
        raise ShapeMismatch(f"expected (T, N, d) coordinates, got shape {arr.shape}")
    return arr


def _distances(tensor) -> np.ndarray:
    return tensor.entries if isinstance(tensor, DistanceTensor) else np.asarray(tensor, dtype=float)


def embedded_distances(coords_slice: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix of one embedded slice."""
    out = cdist(coords_slice, coords_slice)
    np.fill_diagonal(out, 0.0)
    return out


def stress_per_slice(curves, tensor) -> np.ndarray:
    """Per-slice distortion: sum over all ordered pairs of
    ``(||x_i - x_j|| - d_ij)^2``."""
    return weighted_stress_per_slice(curves, tensor, None)


def weighted_stress_per_slice(curves, tensor, weights: WeightTensor | None) -> np.ndarray:
    coords = _coords(curves)
    target = _distances(tensor)
    if coords.shape[:2] != target.shape[:2]:
        raise ShapeMismatch(
            f"curves have shape {coords.shape[:2]}, tensor {target.shape[:2]} (slices, items)"
        )
    if weights is not None:
        if weights.entries.shape != target.shape:
            raise ShapeMismatch(
                f"weights shape {weights.entries.shape} does not match tensor {target.shape}"
            )
        if isinstance(tensor, DistanceTensor):
            target = weights.effective_distances(tensor)
    out = np.empty(coords.shape[0])
    for k in range(coords.shape[0]):
        resid = (embedded_distances(coords[k]) - target[k]) ** 2
        if weights is not None:
            resid = weights.entries[k] * resid
        else:
            np.fill_diagonal(resid, 0.0)
        out[k] = resid.sum()
    return out


def roughness_per_curve(curves, op: RoughnessOperator | np.ndarray | None = None) -> np.ndarray:
    """Quadratic roughness of each item's curve under the grid's penalty."""
    coords = _coords(curves)
    if op is None:
        if not isinstance(curves, EmbeddingCurves):
            raise InvalidSettings("pass a penalty matrix when curves carry no grid")
        op = grid_roughness_operator(curves.grid)
    mat = op.matrix if isinstance(op, RoughnessOperator) else np.asarray(op)
    if mat.shape[0] != coords.shape[0]:
        raise ShapeMismatch(
            f"penalty matrix is {mat.shape[0]}x{mat.shape[1]}, curves have {coords.shape[0]} slices"
        )
    smoothed = np.tensordot(mat, coords, axes=(1, 0))
    return np.einsum("tnd,tnd->n", coords, smoothed)


def total_cost(curves, tensor, weights: WeightTensor | None, lam: float, op) -> float:
    """Weighted stress summed over slices plus ``lam`` times total roughness."""
    stress = weighted_stress_per_slice(curves, tensor, weights).sum()
    return float(stress + lam * roughness_per_curve(curves, op).sum())


@dataclass(frozen=True)
class StabilityReport:
    """Slice-to-slice displacements plus two per-item scalars.

    ``path_length`` (the instability score) is the total distance an item
    travels across the grid; ``curve_roughness`` is the penalty value used
    for coloring.  A straight line can have a large path length and zero
    roughness: the two measure different things.
    """

    displacements: np.ndarray  # (T-1, N, d)
    path_length: np.ndarray  # (N,)
    curve_roughness: np.ndarray  # (N,)


def stability_vectors(curves, op=None) -> StabilityReport:
    """Displacement vectors ``x_i^{k+1} - x_i^k`` and instability scores."""
    coords = _coords(curves)
    if coords.shape[0] < 2:
        raise SingleSliceInput("stability needs at least two slices")
    disp = np.diff(coords, axis=0)
    path = np.linalg.norm(disp, axis=2).sum(axis=0)
    if op is None and isinstance(curves, EmbeddingCurves):
        op = grid_roughness_operator(curves.grid)
    rough = roughness_per_curve(coords, op) if op is not None else np.zeros(coords.shape[1])
    return StabilityReport(displacements=disp, path_length=path, curve_roughness=rough)


def cluster_quality(points, labels) -> float:
    """Between-cluster over within-cluster variance of a labeled cloud.

    Cluster means are weighted by size about the grand mean; points vary
    about their cluster mean.  Returns ``inf`` when the within-variance is
    exactly zero (degenerate clusters).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    labels = np.asarray(labels)
    if labels.shape[0] != pts.shape[0]:
        raise ShapeMismatch(f"{labels.shape[0]} labels for {pts.shape[0]} points")
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise InvalidSettings("cluster quality needs at least two clusters")
    grand = pts.mean(axis=0)
    between = 0.0
    within = 0.0
    for lab in uniq:
        members = pts[labels == lab]
        center = members.mean(axis=0)
        between += members.shape[0] * float(np.sum((center - grand) ** 2))
        within += float(np.sum((members - center) ** 2))
    n = pts.shape[0]
    if within == 0.0:
        return math.inf
    return (between / n) / (within / n)


def kmeans_baseline(points, k: int, seed: int = 0) -> np.ndarray:
    """Reference clustering: Lloyd iterations with plus-plus seeding,
    20 restarts, best within-cluster sum of squares; deterministic given
    the seed."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if k > pts.shape[0]:
        raise InvalidSettings(f"k={k} exceeds the number of points {pts.shape[0]}")
    model = KMeans(n_clusters=k, init="k-means++", n_init=20, random_state=seed)
    return model.fit(pts).labels_


def procrustes_align(a, b) -> tuple[np.ndarray, float]:
    """Rigidly align ``b`` onto ``a`` (rotation/reflection plus translation).

    Returns the aligned copy of ``b`` and the Frobenius residual
    ``||a - b_aligned||_F``.  Scaling is not fitted: embeddings are only
    defined up to rigid motions, not dilation.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot align {b.shape} onto {a.shape}")
    mu_a = a.mean(axis=0)
    mu_b = b.mean(axis=0)
    ac = a - mu_a
    bc = b - mu_b
    u, _, vt = np.linalg.svd(bc.T @ ac)
    rot = u @ vt
    aligned = bc @ rot + mu_a
    residual = float(np.linalg.norm(a - aligned))
    return aligned, residual
