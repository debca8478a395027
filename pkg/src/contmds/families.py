"""Constructors for distance tensors indexed by a hyperparameter.

Each family maps a knob someone might reasonably argue about (feature
weighting, cluster scale, graph thresholds, hierarchy level) onto the grid
axis, so the downstream embedding shows how that choice reshapes the data.
Every constructor returns a tensor that passes full validation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .exceptions import (
    AlphaOutOfRange,
    AsymmetryTooLarge,
    DuplicatePointsWarning,
    EmptyGraph,
    InvalidSettings,
    ShapeMismatch,
)
from .model import DistanceTensor, HyperparameterGrid, validate_distance_tensor


def euclidean_distances(points) -> np.ndarray:
    """Pairwise Euclidean distance matrix of an ``(N, D)`` point cloud."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = cdist(pts, pts)
    np.fill_diagonal(out, 0.0)
    return out


def _as_square(matrix, name: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeMismatch(f"{name} must be a square matrix, got {arr.shape}")
    return arr


def weighted_mixture(d1, d2, alphas, labels=None) -> DistanceTensor:
    """Blend two distance matrices along a mixture grid.

    Slice ``k`` has entries ``sqrt(a_k * d1^2 + (1 - a_k) * d2^2)``; the
    convex combination of squared distances keeps each slice a distance
    matrix.  Endpoints reproduce the inputs exactly.

    Parameters
    ----------
    d1, d2 : (N, N) array-like
        Distance matrices; ``alpha = 1`` gives ``d1``, ``alpha = 0`` gives ``d2``.
    alphas : array-like of float in [0, 1]
        Strictly increasing mixture weights, one per slice.
    """
    m1 = _as_square(d1, "d1")
    m2 = _as_square(d2, "d2")
    if m1.shape != m2.shape:
        raise ShapeMismatch(f"d1 is {m1.shape}, d2 is {m2.shape}")
    alphas = np.asarray(alphas, dtype=float)
    if ((alphas < 0) | (alphas > 1)).any():
        bad = alphas[(alphas < 0) | (alphas > 1)][0]
        raise AlphaOutOfRange(f"mixture weight {bad} outside [0, 1]")
    slices = np.empty((alphas.size, *m1.shape))
    for k, a in enumerate(alphas):
        if a == 0.0:
            slices[k] = m2
        elif a == 1.0:
            slices[k] = m1
        else:
            slices[k] = np.sqrt(a * m1**2 + (1.0 - a) * m2**2)
    grid = HyperparameterGrid(alphas)
    return validate_distance_tensor(slices, grid, labels=labels)


@dataclass(frozen=True)
class ClusterToyConfig:
    """Synthetic clusters whose centers collapse linearly to the origin."""

    n_clusters: int = 5
    points_per_cluster: int = 10
    ambient_dim: int = 5
    n_slices: int = 11
    noise_sd: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if min(self.n_clusters, self.points_per_cluster, self.ambient_dim, self.n_slices) < 1:
            raise InvalidSettings("toy config counts must all be >= 1")
        if self.noise_sd < 0:
            raise InvalidSettings("noise_sd must be >= 0")


@dataclass(frozen=True)
class ToyDataset:
    """Collapsing-clusters data: tensor, true labels, per-slice point clouds."""

    tensor: DistanceTensor
    labels: np.ndarray  # (N,) int cluster index per item
    points: np.ndarray  # (T, N, ambient_dim) sampled cloud per slice


def collapsing_clusters_toy(cfg: ClusterToyConfig) -> ToyDataset:
    """Gaussian clusters around centers scaled by ``(1 - alpha)``.

    At ``alpha = 0`` the originally drawn centers apply; at ``alpha = 1``
    every center sits at the origin and only noise remains.  Noise is
    resampled independently per slice, with the random stream consumed in
    slice order so results are reproducible from the seed alone.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_clusters * cfg.points_per_cluster
    centers = rng.standard_normal((cfg.n_clusters, cfg.ambient_dim))
    labels = np.repeat(np.arange(cfg.n_clusters), cfg.points_per_cluster)
    alphas = np.linspace(0.0, 1.0, cfg.n_slices)
    points = np.empty((cfg.n_slices, n, cfg.ambient_dim))
    slices = np.empty((cfg.n_slices, n, n))
    for k, a in enumerate(alphas):
        cloud = (1.0 - a) * centers[labels]
        cloud = cloud + cfg.noise_sd * rng.standard_normal((n, cfg.ambient_dim))
        points[k] = cloud
        slices[k] = euclidean_distances(cloud)
    grid = HyperparameterGrid(alphas)
    item_labels = [f"c{c}p{p}" for c in range(cfg.n_clusters) for p in range(cfg.points_per_cluster)]
    tensor = validate_distance_tensor(slices, grid, labels=item_labels)
    return ToyDataset(tensor=tensor, labels=labels, points=points)


def _partition_matrix(assignment: np.ndarray, centroids: np.ndarray, eps: float) -> np.ndarray:
    centroid_dist = euclidean_distances(centroids)
    mat = centroid_dist[np.ix_(assignment, assignment)].copy()
    same = assignment[:, None] == assignment[None, :]
    mat[same] = eps
    np.fill_diagonal(mat, 0.0)
    return mat


def hclust_distance_family(points, eps: float | None = None, labels=None) -> DistanceTensor:
    """Distance tensor over the levels of a centroid-linkage hierarchy.

    Starting from singletons, the two clusters with the closest centroids
    are merged until one cluster remains; ties go to the lexicographically
    smallest pair of cluster indices.  Each level contributes one slice:
    items sharing a cluster sit at the small constant ``eps``, all other
    pairs at the distance between their cluster centroids (the unweighted
    mean of member points).  The finest slice is therefore the raw
    Euclidean matrix and the coarsest is all ``eps``.

    ``eps`` defaults to ``1e-3`` times the smallest positive pairwise
    distance, keeping merged items visually fused without degenerate
    zero distances.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    if n < 2:
        raise ShapeMismatch(f"need at least 2 points, got {n}")
    raw = euclidean_distances(pts)
    off = raw[np.triu_indices(n, k=1)]
    if (off == 0).any():
        warnings.warn(
            "input contains duplicate points; centroid merges remain defined",
            DuplicatePointsWarning,
            stacklevel=2,
        )
    if eps is None:
        positive = off[off > 0]
        if positive.size == 0:
            raise InvalidSettings("all points coincide; pass an explicit eps")
        eps = 1e-3 * float(positive.min())
    if not eps > 0:
        raise InvalidSettings(f"eps must be > 0, got {eps}")

    # Active clusters as member-index lists; cluster order by smallest member.
    members: list[list[int]] = [[i] for i in range(n)]
    slices = []
    while True:
        centroids = np.array([pts[m].mean(axis=0) for m in members])
        assignment = np.empty(n, dtype=int)
        for ci, m in enumerate(members):
            assignment[m] = ci
        slices.append(_partition_matrix(assignment, centroids, eps))
        if len(members) == 1:
            break
        cd = euclidean_distances(centroids)
        iu = np.triu_indices(len(members), k=1)
        flat = cd[iu]
        order = np.lexsort((iu[1], iu[0], flat))  # distance first, then (i, j)
        best = order[0]
        i, j = int(iu[0][best]), int(iu[1][best])
        members[i] = sorted(members[i] + members[j])
        del members[j]

    grid = HyperparameterGrid(np.arange(len(slices), dtype=float))
    return validate_distance_tensor(np.array(slices), grid, labels=labels)


def threshold_hamming_family(adjacencies, quantiles, labels=None) -> DistanceTensor:
    """Hamming distances between subjects' graphs after quantile thresholding.

    For each grid value ``q`` and each subject, the weakest ``q``-quantile
    of that subject's positive off-diagonal weights is zeroed (lower
    interpolation; ties at the cut are all removed; ``q = 0`` removes
    nothing), the result is binarized at ``> 0``, and the slice distance
    between two subjects is the number of upper-triangle edge
    disagreements.
    """
    arrs = [np.asarray(a, dtype=float) for a in adjacencies]
    n_subjects = len(arrs)
    if n_subjects < 2:
        raise ShapeMismatch(f"need at least 2 subjects, got {n_subjects}")
    shape = arrs[0].shape
    for s, a in enumerate(arrs):
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != shape:
            raise ShapeMismatch(f"subject {s} matrix has shape {a.shape}, expected {shape}")
        if not np.allclose(a, a.T):
            raise AsymmetryTooLarge(f"subject {s} adjacency matrix is not symmetric")
        if (a < 0).any():
            raise InvalidSettings(f"subject {s} has negative weights")
    n_nodes = shape[0]
    iu = np.triu_indices(n_nodes, k=1)
    positives = []
    for s, a in enumerate(arrs):
        pos = a[iu][a[iu] > 0]
        if pos.size == 0:
            raise EmptyGraph(f"subject {s} has no positive weights")
        positives.append(pos)

    quantiles = np.asarray(quantiles, dtype=float)
    if ((quantiles < 0) | (quantiles >= 1)).any():
        bad = quantiles[(quantiles < 0) | (quantiles >= 1)][0]
        raise AlphaOutOfRange(f"quantile {bad} outside [0, 1)")

    slices = np.empty((quantiles.size, n_subjects, n_subjects))
    for k, q in enumerate(quantiles):
        binarized = []
        for s, a in enumerate(arrs):
            thr = 0.0 if q == 0.0 else float(np.quantile(positives[s], q, method="lower"))
            binarized.append(a[iu] > thr)
        for s in range(n_subjects):
            slices[k, s, s] = 0.0
            for t in range(s + 1, n_subjects):
                h = float(np.count_nonzero(binarized[s] ^ binarized[t]))
                slices[k, s, t] = h
                slices[k, t, s] = h
    grid = HyperparameterGrid(quantiles)
    if labels is None:
        labels = [f"subject{s}" for s in range(n_subjects)]
    return validate_distance_tensor(slices, grid, labels=labels)


def consensus_shortest_path_family(adjacencies, thresholds, labels=None) -> DistanceTensor:
    """Shortest-path distances between nodes of thresholded consensus graphs.

    The consensus matrix is the mean of the binarized subject adjacencies;
    a slice at threshold ``t`` keeps edges where the consensus is strictly
    above ``t`` and measures unweighted shortest-path hop counts.
    Disconnected pairs get the finite substitute distance ``N`` (one more
    than any realizable path).
    """
    arrs = [np.asarray(a, dtype=float) for a in adjacencies]
    if len(arrs) < 1:
        raise ShapeMismatch("need at least one subject")
    shape = arrs[0].shape
    for s, a in enumerate(arrs):
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != shape:
            raise ShapeMismatch(f"subject {s} matrix has shape {a.shape}, expected {shape}")
        if not np.allclose(a, a.T):
            raise AsymmetryTooLarge(f"subject {s} adjacency matrix is not symmetric")
    n_nodes = shape[0]
    consensus = np.mean([(a > 0) for a in arrs], axis=0)
    np.fill_diagonal(consensus, 0.0)

    thresholds = np.asarray(thresholds, dtype=float)
    slices = np.empty((thresholds.size, n_nodes, n_nodes))
    for k, t in enumerate(thresholds):
        adj = (consensus > t).astype(float)
        dist = shortest_path(csr_matrix(adj), method="D", unweighted=True, directed=False)
        dist[~np.isfinite(dist)] = float(n_nodes)
        np.fill_diagonal(dist, 0.0)
        slices[k] = dist
    grid = HyperparameterGrid(thresholds)
    if labels is None:
        labels = [f"node{i}" for i in range(n_nodes)]
    return validate_distance_tensor(slices, grid, labels=labels)


def mixed_dimensionality_family(seed: int, n: int = 30, n_slices: int = 11) -> DistanceTensor:
    """Mixture between distances of 2-D and 12-D Gaussian point clouds.

    The first slice (``alpha = 0``) is exactly the 2-D matrix, the last is
    the 12-D one; embedding the family in two dimensions shows distortion
    growing with the weight of the high-dimensional part.
    """
    if n < 3:
        raise ShapeMismatch(f"need n >= 3 points, got {n}")
    rng = np.random.default_rng(seed)
    low = rng.standard_normal((n, 2))
    high = rng.standard_normal((n, 12))
    d_low = euclidean_distances(low)
    d_high = euclidean_distances(high)
    alphas = np.linspace(0.0, 1.0, n_slices)
    return weighted_mixture(d_high, d_low, alphas)
