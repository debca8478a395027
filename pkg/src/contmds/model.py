"""Core data types: hyperparameter grids, distance tensors, curves, settings.

Index conventions used throughout the package:

* Distance tensors are ``(T, N, N)`` arrays: slice index first, then item
  pair.  For two hyperparameter axes the slices are flattened with the
  first axis fastest, i.e. slice ``p`` corresponds to
  ``(alpha[p % T_alpha], beta[p // T_alpha])``.
* Embedding curves are ``(T, N, d)`` arrays.  The vectorization of one
  curve stacks slices in grid order with the ``d`` coordinates contiguous
  within each slice: ``(x^1_1 .. x^1_d, x^2_1 .. x^2_d, ...)``.  The
  penalized update system relies on this order; see :mod:`contmds.penalty`.

All types are immutable after construction (arrays are made read-only) and
safe to share across threads.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    AsymmetryTooLarge,
    CmdsError,
    IndexOutOfRange,
    InvalidSettings,
    NegativeDistance,
    NonFiniteEntry,
    NonZeroDiagonal,
    ShapeMismatch,
)

# Relative tolerance below which asymmetry / diagonal noise is repaired
# rather than rejected.  Absorbs serialization round-trip error without
# masking data problems.
ASYMMETRY_RTOL = 1e-9

VARIANTS = ("raw", "sammon", "elastic", "unfolding", "lmds")
INIT_STRATEGIES = ("per-slice", "aggregated", "random")


def _frozen(values, dtype=float) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(values, dtype=dtype))
    out.flags.writeable = False
    return out


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class HyperparameterGrid:
    """Ordered grid of hyperparameter values, optionally with a second axis.

    Parameters
    ----------
    alpha : array-like of float
        Strictly increasing grid values of the first (fast) axis.
    beta : array-like of float, optional
        Strictly increasing values of the second (slow) axis.  When given,
        the total slice count is ``len(alpha) * len(beta)``.
    """

    alpha: np.ndarray
    beta: np.ndarray | None = None

    def __post_init__(self):
        alpha = _frozen(self.alpha)
        if alpha.ndim != 1 or alpha.size < 1:
            raise ShapeMismatch("grid axis must be a 1-D array with length >= 1")
        if alpha.size > 1 and not np.all(np.diff(alpha) > 0):
            raise InvalidSettings("grid values must be strictly increasing")
        _set(self, "alpha", alpha)
        if self.beta is not None:
            beta = _frozen(self.beta)
            if beta.ndim != 1 or beta.size < 1:
                raise ShapeMismatch("second grid axis must be 1-D with length >= 1")
            if beta.size > 1 and not np.all(np.diff(beta) > 0):
                raise InvalidSettings("second-axis values must be strictly increasing")
            _set(self, "beta", beta)

    @property
    def n_alpha(self) -> int:
        return int(self.alpha.size)

    @property
    def n_beta(self) -> int:
        return 1 if self.beta is None else int(self.beta.size)

    @property
    def n_slices(self) -> int:
        return self.n_alpha * self.n_beta

    @property
    def two_axis(self) -> bool:
        return self.beta is not None

    def slice_values(self) -> list[tuple[float, ...]]:
        """Grid coordinates of every slice in flattening order (alpha fastest)."""
        if self.beta is None:
            return [(float(a),) for a in self.alpha]
        return [(float(a), float(b)) for b in self.beta for a in self.alpha]


@dataclass(frozen=True)
class DistanceTensor:
    """Validated pairwise dissimilarities over the grid, shape ``(T, N, N)``."""

    grid: HyperparameterGrid
    entries: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        _set(self, "entries", _frozen(self.entries))
        _set(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def n_slices(self) -> int:
        return self.entries.shape[0]

    @property
    def n_items(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class EmbeddingCurves:
    """Embedded configuration, shape ``(T, N, d)``; one smooth curve per item."""

    grid: HyperparameterGrid
    coords: np.ndarray

    def __post_init__(self):
        coords = _frozen(self.coords)
        if coords.ndim != 3:
            raise ShapeMismatch(f"coords must be (T, N, d), got shape {coords.shape}")
        if coords.shape[0] != self.grid.n_slices:
            raise ShapeMismatch(
                f"coords have {coords.shape[0]} slices, grid has {self.grid.n_slices}"
            )
        if not np.isfinite(coords).all():
            raise NonFiniteEntry("embedding coordinates must be finite")
        _set(self, "coords", coords)

    @property
    def n_slices(self) -> int:
        return self.coords.shape[0]

    @property
    def n_items(self) -> int:
        return self.coords.shape[1]

    @property
    def dim(self) -> int:
        return self.coords.shape[2]


@dataclass(frozen=True)
class WeightTensor:
    """Nonnegative pair weights selecting the solver variant.

    ``entries`` has the same shape as the distance tensor with a zero
    diagonal, so sums over ``j`` naturally exclude the self pair.  For the
    local variant, ``far_pair`` marks pairs whose target distance is
    replaced by the repulsion constant ``d_infinity``.
    """

    variant: str
    entries: np.ndarray
    far_pair: np.ndarray | None = None
    d_infinity: float | None = None
    far_weight: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidSettings(f"unknown variant {self.variant!r}")
        entries = _frozen(self.entries)
        if entries.ndim != 3 or entries.shape[1] != entries.shape[2]:
            raise ShapeMismatch(f"weights must be (T, N, N), got {entries.shape}")
        if not np.isfinite(entries).all():
            raise NonFiniteEntry("weights must be finite")
        if (entries < 0).any():
            raise NegativeDistance("weights must be nonnegative")
        if not np.array_equal(entries, entries.transpose(0, 2, 1)):
            raise AsymmetryTooLarge("weight slices must be symmetric")
        _set(self, "entries", entries)
        if self.far_pair is not None:
            _set(self, "far_pair", _frozen(self.far_pair, dtype=bool))

    def effective_distances(self, tensor: DistanceTensor) -> np.ndarray:
        """Target distances seen by the cost: the local variant substitutes
        the repulsion constant on far pairs, all other variants use the
        tensor unchanged."""
        if self.far_pair is None:
            return tensor.entries
        return np.where(self.far_pair, self.d_infinity, tensor.entries)


@dataclass(frozen=True)
class VariantSpec:
    """Variant selector plus the extra knobs some variants need.

    For ``unfolding``, ``groups`` assigns each item a group label; pairs in
    different groups get weight zero.  For ``lmds``, ``k`` nearest
    neighbors (union-symmetrized per slice) keep weight one and their true
    distance; all other pairs get weight ``far_weight`` and target distance
    ``d_infinity``.  Defaults chosen at weight-building time:
    ``far_weight = 1/N`` and ``d_infinity = 2 * max(D)``.
    """

    tag: str = "raw"
    groups: tuple | None = None
    k: int = 5
    far_weight: float | None = None
    d_infinity: float | None = None

    def __post_init__(self):
        if self.tag not in VARIANTS:
            raise InvalidSettings(f"unknown variant {self.tag!r}")
        if self.groups is not None:
            _set(self, "groups", tuple(self.groups))
        if self.tag == "lmds":
            if self.k < 1:
                raise InvalidSettings("lmds neighborhood size k must be >= 1")
            if self.far_weight is not None and not self.far_weight > 0:
                raise InvalidSettings("lmds far-pair weight must be > 0")
        if self.tag == "unfolding" and self.groups is None:
            raise InvalidSettings("unfolding variant requires group labels")


@dataclass(frozen=True)
class SolverSettings:
    """Everything a solve depends on; the seed fixes every random draw."""

    lam: float = 0.0
    dim: int = 2
    tol: float = 1e-6
    max_outer: int = 100
    max_inner: int = 50
    init: str = "aggregated"
    seed: int = 0
    variant: VariantSpec = field(default_factory=VariantSpec)

    def __post_init__(self):
        if not self.lam >= 0:
            raise InvalidSettings(f"lambda must be >= 0, got {self.lam}")
        if not self.dim >= 1:
            raise InvalidSettings(f"dim must be >= 1, got {self.dim}")
        if not self.tol > 0:
            raise InvalidSettings(f"tol must be > 0, got {self.tol}")
        if not self.max_outer >= 1 or not self.max_inner >= 1:
            raise InvalidSettings("iteration caps must be >= 1")
        if self.init not in INIT_STRATEGIES:
            raise InvalidSettings(f"unknown init strategy {self.init!r}")
        if isinstance(self.variant, str):
            _set(self, "variant", VariantSpec(tag=self.variant))


def default_labels(n: int) -> tuple[str, ...]:
    width = len(str(max(n - 1, 0)))
    return tuple(f"item{str(i).zfill(width)}" for i in range(n))


def validate_distance_tensor(
    raw, grid: HyperparameterGrid, labels=None
) -> DistanceTensor:
    """Validate (and minimally repair) a raw ``(T, N, N)`` distance array.

    Asymmetry and diagonal noise up to ``ASYMMETRY_RTOL`` times the largest
    entry are repaired (symmetrize by averaging, zero the diagonal);
    anything larger is rejected with the offending slice and indices named.

    Parameters
    ----------
    raw : array-like, shape (T, N, N)
        Pairwise dissimilarities per grid slice.  A single ``(N, N)``
        matrix is accepted for ``T == 1`` grids.
    grid : HyperparameterGrid
        Grid whose slice count must match ``T``.
    labels : sequence of str, optional
        Item names; generated when omitted.

    Returns
    -------
    DistanceTensor
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ShapeMismatch(
            f"expected a (T, N, N) array, got shape {tuple(arr.shape)}"
        )
    T, N = arr.shape[0], arr.shape[1]
    if N < 2:
        raise ShapeMismatch(f"need at least 2 items, got N={N}")
    if T != grid.n_slices:
        raise ShapeMismatch(f"tensor has {T} slices, grid defines {grid.n_slices}")
    if labels is None:
        labels = default_labels(N)
    elif len(labels) != N:
        raise ShapeMismatch(f"{len(labels)} labels for {N} items")

    if not np.isfinite(arr).all():
        k, i, j = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteEntry(f"non-finite distance at slice {k}, entry ({i}, {j})")
    if (arr < 0).any():
        k, i, j = np.argwhere(arr < 0)[0]
        raise NegativeDistance(
            f"negative distance {arr[k, i, j]} at slice {k}, entry ({i}, {j})"
        )

    scale = float(arr.max()) if arr.size else 0.0
    tol = ASYMMETRY_RTOL * scale
    asym = np.abs(arr - arr.transpose(0, 2, 1))
    if asym.max(initial=0.0) > tol:
        k, i, j = np.argwhere(asym > tol)[0]
        raise AsymmetryTooLarge(
            f"asymmetry {asym[k, i, j]:.3g} at slice {k}, entry ({i}, {j}) "
            f"exceeds {tol:.3g}"
        )
    arr = 0.5 * (arr + arr.transpose(0, 2, 1))

    diag = np.abs(np.diagonal(arr, axis1=1, axis2=2))
    if diag.max(initial=0.0) > tol:
        k, i = np.argwhere(diag > tol)[0]
        raise NonZeroDiagonal(
            f"diagonal entry {arr[k, i, i]:.3g} at slice {k}, item {i} "
            f"exceeds {tol:.3g}"
        )
    idx = np.arange(N)
    arr[:, idx, idx] = 0.0

    return DistanceTensor(grid=grid, entries=arr, labels=tuple(labels))


def vectorize_curve(curves: EmbeddingCurves | np.ndarray, i: int) -> np.ndarray:
    """Stack curve ``i`` into a length ``T*d`` vector (slices in grid order,
    coordinates contiguous within each slice)."""
    coords = curves.coords if isinstance(curves, EmbeddingCurves) else np.asarray(curves)
    if not 0 <= i < coords.shape[1]:
        raise IndexOutOfRange(f"item index {i} outside [0, {coords.shape[1]})")
    return coords[:, i, :].ravel()


def devectorize_curve(vec: np.ndarray, n_slices: int, dim: int) -> np.ndarray:
    """Exact inverse of :func:`vectorize_curve`; returns a ``(T, d)`` array."""
    vec = np.asarray(vec, dtype=float)
    if vec.size != n_slices * dim:
        raise ShapeMismatch(
            f"vector of length {vec.size} cannot be a ({n_slices}, {dim}) curve"
        )
    return vec.reshape(n_slices, dim)


def settings_to_dict(settings: SolverSettings) -> dict:
    """Canonical JSON-ready form of solver settings (mirrored by the CLI,
    the serve API, and embedding-file provenance)."""
    v = settings.variant
    out = {
        "dim": settings.dim,
        "lambda": settings.lam,
        "variant": v.tag,
        "init": settings.init,
        "tol": settings.tol,
        "max_outer": settings.max_outer,
        "max_inner": settings.max_inner,
        "seed": settings.seed,
    }
    if v.tag == "lmds":
        out["lmds_k"] = v.k
        out["lmds_w"] = v.far_weight
        out["lmds_dinf"] = v.d_infinity
    if v.tag == "unfolding":
        out["groups"] = list(v.groups)
    return out


def settings_from_dict(doc: dict) -> SolverSettings:
    """Inverse of :func:`settings_to_dict`; raises InvalidSettings on junk."""
    if not isinstance(doc, dict):
        raise InvalidSettings("settings must be a JSON object")
    known = {
        "dim", "lambda", "variant", "init", "tol", "max_outer", "max_inner",
        "seed", "lmds_k", "lmds_w", "lmds_dinf", "groups",
    }
    unknown = set(doc) - known
    if unknown:
        raise InvalidSettings(f"unknown settings keys: {sorted(unknown)}")
    tag = doc.get("variant", "raw")
    try:
        variant = VariantSpec(
            tag=tag,
            groups=tuple(doc["groups"]) if doc.get("groups") is not None else None,
            k=int(doc.get("lmds_k", 5)),
            far_weight=doc.get("lmds_w"),
            d_infinity=doc.get("lmds_dinf"),
        )
        return SolverSettings(
            lam=float(doc.get("lambda", 0.0)),
            dim=int(doc.get("dim", 2)),
            tol=float(doc.get("tol", 1e-6)),
            max_outer=int(doc.get("max_outer", 100)),
            max_inner=int(doc.get("max_inner", 50)),
            init=doc.get("init", "aggregated"),
            seed=int(doc.get("seed", 0)),
            variant=variant,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CmdsError):
            raise
        raise InvalidSettings(f"malformed settings: {exc}") from exc
