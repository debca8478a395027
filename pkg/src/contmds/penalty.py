"""Curve-roughness penalties and the factorized curve-update systems.

The roughness of a discrete curve is the squared norm of its second
differences, ``x^T M x`` with ``M = D2^T D2``.  Grid values are treated as
equally spaced indices; the recorded values are labels only.  For grids
shorter than three points no second difference exists and the penalty is
identically zero, so a single-slice solve reduces to plain MDS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import FactorizationFailure, GridTooShort, ShapeMismatch
from .model import HyperparameterGrid


@dataclass(frozen=True)
class RoughnessOperator:
    """Symmetric PSD penalty matrix, either per-axis or the two-axis sum."""

    matrix: np.ndarray
    provenance: str  # "single-axis" | "composite"

    def __post_init__(self):
        m = np.ascontiguousarray(np.asarray(self.matrix, dtype=float))
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def second_difference_operator(n_slices: int) -> np.ndarray:
    """The ``(T-2, T)`` matrix taking a sequence to its second differences.

    Row ``r`` holds ``(1, -2, 1)`` at columns ``(r, r+1, r+2)``.  Raises
    GridTooShort for ``T < 3``; callers wanting a penalty on such grids
    should use :func:`roughness_matrix`, which degrades to zero.
    """
    if n_slices < 3:
        raise GridTooShort(f"second differences need T >= 3, got T={n_slices}")
    op = np.zeros((n_slices - 2, n_slices))
    rows = np.arange(n_slices - 2)
    op[rows, rows] = 1.0
    op[rows, rows + 1] = -2.0
    op[rows, rows + 2] = 1.0
    return op


def roughness_matrix(n_slices: int) -> RoughnessOperator:
    """``M = D2^T D2`` for ``T >= 3``; the zero matrix for ``T`` in {1, 2}."""
    if n_slices < 1:
        raise GridTooShort(f"T must be >= 1, got {n_slices}")
    if n_slices < 3:
        return RoughnessOperator(np.zeros((n_slices, n_slices)), "single-axis")
    d2 = second_difference_operator(n_slices)
    return RoughnessOperator(d2.T @ d2, "single-axis")


def composite_roughness_matrix(n_alpha: int, n_beta: int) -> RoughnessOperator:
    """Separable penalty for a two-axis grid flattened alpha-fastest.

    With slices indexed ``p = k_beta * T_alpha + k_alpha`` the matrix is
    ``kron(M_beta, E_alpha) + kron(E_beta, M_alpha)``: second differences
    along each axis independently, summed.
    """
    m_a = roughness_matrix(n_alpha).matrix
    m_b = roughness_matrix(n_beta).matrix
    mat = np.kron(m_b, np.eye(n_alpha)) + np.kron(np.eye(n_beta), m_a)
    return RoughnessOperator(mat, "composite")


def grid_roughness_operator(grid: HyperparameterGrid) -> RoughnessOperator:
    """Penalty matrix appropriate for a grid (single-axis or composite)."""
    if grid.two_axis:
        return composite_roughness_matrix(grid.n_alpha, grid.n_beta)
    return roughness_matrix(grid.n_alpha)


def roughness(curve: np.ndarray, op: RoughnessOperator | np.ndarray) -> float:
    """Quadratic roughness of one curve, summed over coordinate dimensions.

    Parameters
    ----------
    curve : ndarray, shape (T, d) or (T,)
        Coordinate trajectory of one item over the grid.
    op : RoughnessOperator or (T, T) ndarray
    """
    mat = op.matrix if isinstance(op, RoughnessOperator) else np.asarray(op)
    curve = np.asarray(curve, dtype=float)
    if curve.ndim == 1:
        curve = curve[:, None]
    if curve.shape[0] != mat.shape[0]:
        raise ShapeMismatch(
            f"curve has {curve.shape[0]} slices, penalty matrix is {mat.shape[0]}x{mat.shape[1]}"
        )
    return float(np.sum(curve * (mat @ curve)))


@dataclass(frozen=True)
class UpdateSystem:
    """Factorization of ``diag(c) (x) E_d + lam * M (x) E_d``.

    The full system over a vectorized curve is block diagonal per
    coordinate dimension under the package's stacking order, so only the
    ``(T, T)`` base matrix ``diag(c) + lam * M`` is factorized; solves with
    ``d`` right-hand sides cost ``O(T^2 d)``.  When ``lam * M`` vanishes
    the solve is an exact division by ``c``.
    """

    coeff: np.ndarray  # per-slice diagonal coefficients, shape (T,)
    lam: float
    dim: int
    base: np.ndarray  # the (T, T) per-dimension system matrix
    chol: tuple | None  # scipy cho_factor output, None when lam*M == 0

    @property
    def n_slices(self) -> int:
        return self.coeff.shape[0]

    def dense_matrix(self) -> np.ndarray:
        """The full ``(T*d, T*d)`` matrix in vectorized-curve order."""
        return np.kron(self.base, np.eye(self.dim))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve against a ``(T, d)`` block or a flat ``(T*d,)`` vector."""
        rhs = np.asarray(rhs, dtype=float)
        flat = rhs.ndim == 1
        block = rhs.reshape(self.n_slices, self.dim) if flat else rhs
        if self.chol is None:
            out = block / self.coeff[:, None]
        else:
            out = scipy.linalg.cho_solve(self.chol, block)
        return out.ravel() if flat else out


def build_update_system(
    c, lam: float, op: RoughnessOperator | np.ndarray, dim: int
) -> UpdateSystem:
    """Factorize the curve-update system for coefficients ``c`` and penalty
    weight ``lam``.

    Parameters
    ----------
    c : float or ndarray, shape (T,)
        Per-slice diagonal coefficient (total pair weight of the curve
        being updated).  A scalar is broadcast over slices.
    lam : float
        Penalty weight multiplying the roughness matrix.
    op : RoughnessOperator or (T, T) ndarray
    dim : int
        Embedding dimension (block count).

    The matrix is symmetric positive definite whenever ``c > 0``; the
    factorization is computed once and reused for every solve.
    """
    mat = op.matrix if isinstance(op, RoughnessOperator) else np.asarray(op, dtype=float)
    n = mat.shape[0]
    coeff = np.broadcast_to(np.asarray(c, dtype=float), (n,)).copy()
    if lam < 0:
        raise FactorizationFailure(f"penalty weight must be >= 0, got {lam}")
    if lam == 0.0 or not mat.any():
        if (coeff <= 0).any():
            k = int(np.flatnonzero(coeff <= 0)[0])
            raise FactorizationFailure(
                f"zero diagonal coefficient at slice {k} with no penalty coupling"
            )
        return UpdateSystem(coeff=coeff, lam=lam, dim=dim, base=np.diag(coeff), chol=None)
    base = np.diag(coeff) + lam * mat
    try:
        chol = scipy.linalg.cho_factor(base, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"update system is not positive definite: {exc}") from exc
    return UpdateSystem(coeff=coeff, lam=lam, dim=dim, base=base, chol=chol)
