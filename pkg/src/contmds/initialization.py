"""Starting configurations for the solver.

Three strategies: classical scaling per slice (chained with rigid
alignment so consecutive slices agree where possible), classical scaling
of an aggregated matrix replicated over slices, and seeded random draws.
Initialization only picks the starting point; it never changes the cost.
"""

from __future__ import annotations

import numpy as np

from .exceptions import EigenFailure, InvalidSettings, ShapeMismatch
from .metrics import procrustes_align
from .model import DistanceTensor, EmbeddingCurves, HyperparameterGrid


def classical_scaling(d_slice, dim: int) -> np.ndarray:
    """Torgerson scaling of one distance matrix.

    Double-center ``B = -1/2 J D^2 J`` with ``J = I - 11^T / N``, take the
    top ``dim`` eigenpairs (sorted descending, negative eigenvalues clamped
    to zero) and scale the eigenvectors by the square roots.  Reproduces a
    Euclidean-embeddable matrix exactly.
    """
    d = np.asarray(d_slice, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {d.shape}")
    n = d.shape[0]
    if not 1 <= dim <= n - 1:
        raise InvalidSettings(f"classical scaling needs 1 <= dim <= N-1, got dim={dim}, N={n}")
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (d**2) @ j
    try:
        vals, vecs = np.linalg.eigh(b)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    top = order[:dim]
    scale = np.sqrt(np.clip(vals[top], 0.0, None))
    return vecs[:, top] * scale[None, :]


def init_per_slice(tensor: DistanceTensor, dim: int) -> EmbeddingCurves:
    """Classical scaling of every slice independently, then each slice
    rigidly aligned to its predecessor to avoid arbitrary jumps between
    the per-slice solutions."""
    coords = np.empty((tensor.n_slices, tensor.n_items, dim))
    coords[0] = classical_scaling(tensor.entries[0], dim)
    for k in range(1, tensor.n_slices):
        raw = classical_scaling(tensor.entries[k], dim)
        coords[k], _ = procrustes_align(coords[k - 1], raw)
    return EmbeddingCurves(grid=tensor.grid, coords=coords)


def init_aggregated(tensor: DistanceTensor, dim: int) -> EmbeddingCurves:
    """Classical scaling of the slice-aggregated matrix, replicated.

    Aggregation averages squared distances over slices and takes the
    elementwise square root, so a mixture family with a grid symmetric
    around one half aggregates to its midpoint slice.
    """
    mean_sq = np.mean(tensor.entries**2, axis=0)
    base = classical_scaling(np.sqrt(mean_sq), dim)
    coords = np.broadcast_to(base, (tensor.n_slices, *base.shape)).copy()
    return EmbeddingCurves(grid=tensor.grid, coords=coords)


def init_random(
    tensor: DistanceTensor, dim: int, rng, scale: float | None = None
) -> EmbeddingCurves:
    """I.i.d. normal coordinates with standard deviation ``scale``.

    ``scale`` defaults to the mean off-diagonal distance of the first
    slice divided by ``sqrt(2 * dim)``, so random configurations start at
    roughly the data's scale.
    """
    rng = np.random.default_rng(rng)
    if scale is None:
        first = tensor.entries[0]
        n = first.shape[0]
        off = first[~np.eye(n, dtype=bool)]
        scale = float(off.mean()) / np.sqrt(2.0 * dim)
    coords = scale * rng.standard_normal((tensor.n_slices, tensor.n_items, dim))
    return EmbeddingCurves(grid=tensor.grid, coords=coords)


def initial_curves(
    tensor: DistanceTensor, dim: int, strategy: str, rng
) -> EmbeddingCurves:
    if strategy == "per-slice":
        return init_per_slice(tensor, dim)
    if strategy == "aggregated":
        return init_aggregated(tensor, dim)
    if strategy == "random":
        return init_random(tensor, dim, rng)
    raise InvalidSettings(f"unknown init strategy {strategy!r}")
