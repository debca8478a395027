"""Scikit-learn style front end for the curve embedding solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .model import (
    DistanceTensor,
    HyperparameterGrid,
    SolverSettings,
    VariantSpec,
    validate_distance_tensor,
)
from .solver import cmds


class ContinuousMDS(BaseEstimator):
    """Embed items as smooth curves across a grid of distance matrices.

    Accepts a precomputed ``(T, N, N)`` distance tensor (or a single
    ``(N, N)`` matrix, treated as one slice) and fits a ``(T, N, d)``
    configuration whose per-slice Euclidean distances track the input
    while each item's trajectory stays smooth across slices.

    Parameters
    ----------
    n_components : int
        Embedding dimension.
    lam : float
        Roughness penalty weight; 0 decouples the slices, large values
        force straight-line trajectories.
    variant : str
        One of ``raw``, ``sammon``, ``elastic``, ``unfolding``, ``lmds``.
    init : str
        ``per-slice``, ``aggregated`` or ``random``.
    tol : float
        Relative stopping tolerance for both loops.
    max_outer, max_inner : int
        Iteration caps.
    seed : int
        Fixes every random draw; identical settings give bit-identical fits.
    lmds_k, lmds_w, lmds_dinf
        Local-variant knobs: neighborhood size, far-pair weight, repulsion
        distance (defaults ``1/N`` and twice the largest distance).
    groups : sequence, optional
        Group label per item for the ``unfolding`` variant.

    Attributes
    ----------
    embedding_ : ndarray
        ``(T, N, d)`` coordinates, or ``(N, d)`` when a single matrix was fit.
    cost_trace_ : ndarray
        Total cost before iterating and after each sweep (non-increasing).
    converged_ : bool
    result_ : SolveResult
        Full solver output including per-curve gradient residuals.

    Examples
    --------
    >>> import numpy as np
    >>> from contmds import ContinuousMDS
    >>> pts = np.random.default_rng(0).normal(size=(8, 2))
    >>> d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    >>> coords = ContinuousMDS(n_components=2, seed=1).fit_transform(d)
    >>> coords.shape
    (8, 2)
    """

    def __init__(
        self,
        n_components: int = 2,
        lam: float = 0.0,
        variant: str = "raw",
        init: str = "aggregated",
        tol: float = 1e-6,
        max_outer: int = 100,
        max_inner: int = 50,
        seed: int = 0,
        lmds_k: int = 5,
        lmds_w: float | None = None,
        lmds_dinf: float | None = None,
        groups=None,
    ):
        self.n_components = n_components
        self.lam = lam
        self.variant = variant
        self.init = init
        self.tol = tol
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.seed = seed
        self.lmds_k = lmds_k
        self.lmds_w = lmds_w
        self.lmds_dinf = lmds_dinf
        self.groups = groups

    def _settings(self) -> SolverSettings:
        variant = VariantSpec(
            tag=self.variant,
            groups=tuple(self.groups) if self.groups is not None else None,
            k=self.lmds_k,
            far_weight=self.lmds_w,
            d_infinity=self.lmds_dinf,
        )
        return SolverSettings(
            lam=self.lam,
            dim=self.n_components,
            tol=self.tol,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
            init=self.init,
            seed=self.seed,
            variant=variant,
        )

    def _as_tensor(self, X) -> tuple[DistanceTensor, bool]:
        if isinstance(X, DistanceTensor):
            return X, False
        arr = np.asarray(X, dtype=float)
        single = arr.ndim == 2
        if single:
            arr = arr[None, :, :]
        grid = HyperparameterGrid(np.arange(arr.shape[0], dtype=float))
        return validate_distance_tensor(arr, grid), single

    def fit(self, X, y=None):
        """Fit curves to a distance tensor.

        Parameters
        ----------
        X : DistanceTensor or array-like of shape (T, N, N) or (N, N)
            Precomputed dissimilarities.
        y : ignored
        """
        tensor, single = self._as_tensor(X)
        result = cmds(tensor, self._settings())
        self.result_ = result
        self.curves_ = result.curves
        coords = result.curves.coords
        self.embedding_ = coords[0] if single else coords
        self.cost_trace_ = result.cost_trace
        self.converged_ = result.converged
        self.n_features_in_ = tensor.n_items
        return self

    def fit_transform(self, X, y=None):
        """Fit and return the embedded coordinates."""
        return self.fit(X).embedding_
