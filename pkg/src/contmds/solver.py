"""Curve-by-curve optimizer for penalized multi-slice scaling.

The total cost is the full-matrix weighted stress summed over slices plus
``lam`` times the total curve roughness.  It is minimized coordinate-wise
over curves: the conditional cost of curve ``i`` (all other curves fixed)
is an inner majorize-minimize loop.  Majorization linearizes the concave
part of the stress through surrogate points placed at the target distance
from each partner along the direction of the current iterate; minimizing
the resulting quadratic bound is a penalized least-squares solve against a
factorization reused across iterations.  Each update minimizes the bound
exactly, so the recorded total cost never increases.

Accounting note: every unordered pair contributes two terms to the total
cost (one per orientation), and both belong to the conditional cost of
each endpoint curve, while the roughness of curve ``i`` appears there only
once.  The per-curve update system therefore carries the penalty weight
``lam / 2`` against the plain pair-weight coefficients; equivalently, the
conditional cost is twice the one-sided stress plus ``lam`` times the
curve's roughness.

Per outer sweep the work is ``O(d T^2 N^2)``: each of the ``N`` inner
loops costs ``O(d T (N + T))`` per iteration once the system is
factorized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DescentViolationWarning,
    InvalidSettings,
    ShapeMismatch,
    SingularSystem,
    ZeroDistanceWithReciprocalWeight,
)
from .initialization import initial_curves
from .metrics import total_cost
from .model import (
    DistanceTensor,
    EmbeddingCurves,
    SolverSettings,
    VariantSpec,
    WeightTensor,
)
from .penalty import RoughnessOperator, build_update_system, grid_roughness_operator, roughness

# Pairs closer than this times the slice's coordinate scale are treated as
# coincident and get a random unit direction instead of a normalized one.
COINCIDENCE_RTOL = 1e-12

# Relative-change floor protecting the inner stopping test at the zero curve.
CHANGE_FLOOR = 1e-12

# Absolute slack allowed before a recorded cost increase is flagged.
DESCENT_SLACK = 1e-10


def _cost_noise_floor(coords: np.ndarray, lam: float, op) -> float:
    """Roundoff bound for evaluating the total cost at this configuration.

    The roughness quadratic form cancels almost completely for near-affine
    curves, so its absolute evaluation error stays at the scale of the
    non-cancelling sum |x|^T |M| |x|; multiplied by an extreme ``lam`` that
    noise can exceed the nominal descent slack even though the iteration
    itself is monotone.
    """
    if lam == 0.0:
        return DESCENT_SLACK
    mat = np.abs(op.matrix if isinstance(op, RoughnessOperator) else np.asarray(op))
    absc = np.abs(coords)
    magnitude = float(np.einsum("tnd,tnd->", absc, np.tensordot(mat, absc, axes=(1, 0))))
    return max(DESCENT_SLACK, 64.0 * np.finfo(float).eps * lam * magnitude)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solve.

    ``cost_trace`` holds the total cost before iterating and after each
    outer sweep; it is non-increasing up to numerical slack.
    ``final_subgradient_residuals`` holds per-curve gradient norms of the
    conditional cost at the final configuration (NaN where a curve sits
    exactly on another item and the gradient is undefined).
    """

    curves: EmbeddingCurves
    cost_trace: np.ndarray
    inner_iteration_counts: list[list[int]]
    converged: bool
    final_subgradient_residuals: np.ndarray
    settings: SolverSettings


def _coords_of(curves) -> np.ndarray:
    if isinstance(curves, EmbeddingCurves):
        return curves.coords
    arr = np.asarray(curves, dtype=float)
    if arr.ndim != 3:
        raise ShapeMismatch(f"expected (T, N, d) coordinates, got {arr.shape}")
    return arr


def _effective(tensor, weights: WeightTensor | None) -> np.ndarray:
    if isinstance(tensor, DistanceTensor):
        if weights is not None:
            return weights.effective_distances(tensor)
        return tensor.entries
    return np.asarray(tensor, dtype=float)


def build_weights(tensor: DistanceTensor, spec: VariantSpec | str = "raw") -> WeightTensor:
    """Construct the weight tensor selecting a solver variant.

    raw
        Unit weight on every off-diagonal pair.
    sammon / elastic
        Reciprocal (``1/d``) or squared-reciprocal (``1/d^2``) weights;
        zero off-diagonal distances are rejected.
    unfolding
        Unit weight within each group of items, zero across groups.
    lmds
        Unit weight and true distance for k-nearest-neighbor pairs (per
        slice, a pair counts if either item is a neighbor of the other);
        every other pair gets a small weight and the repulsion target
        ``d_infinity`` instead of its distance.
    """
    if isinstance(spec, str):
        spec = VariantSpec(tag=spec)
    d = tensor.entries
    n_slices, n = d.shape[0], d.shape[1]
    eye = np.eye(n, dtype=bool)
    offdiag = ~eye

    if spec.tag == "raw":
        w = np.broadcast_to(offdiag.astype(float), d.shape).copy()
        return WeightTensor(variant="raw", entries=w)

    if spec.tag in ("sammon", "elastic"):
        zero = (d == 0) & offdiag[None, :, :]
        if zero.any():
            k, i, j = np.argwhere(zero)[0]
            raise ZeroDistanceWithReciprocalWeight(
                f"zero distance at slice {k}, entry ({i}, {j}) cannot take a reciprocal weight"
            )
        w = np.zeros_like(d)
        power = 1 if spec.tag == "sammon" else 2
        w[:, offdiag] = 1.0 / d[:, offdiag] ** power
        return WeightTensor(variant=spec.tag, entries=w)

    if spec.tag == "unfolding":
        if len(spec.groups) != n:
            raise ShapeMismatch(f"{len(spec.groups)} group labels for {n} items")
        groups = np.asarray(spec.groups)
        same = (groups[:, None] == groups[None, :]) & offdiag
        w = np.broadcast_to(same.astype(float), d.shape).copy()
        return WeightTensor(variant="unfolding", entries=w)

    # lmds
    k_eff = min(spec.k, n - 1)
    blocked = d.copy()
    blocked[:, eye] = np.inf
    order = np.argsort(blocked, axis=2, kind="stable")
    nbr = np.zeros(d.shape, dtype=bool)
    rows = np.arange(n)[None, :, None]
    slc = np.arange(n_slices)[:, None, None]
    nbr[slc, rows, order[:, :, :k_eff]] = True
    nbr |= nbr.transpose(0, 2, 1)

    d_max = float(d.max())
    d_inf = spec.d_infinity if spec.d_infinity is not None else 2.0 * d_max
    if not d_inf > d_max:
        raise InvalidSettings(
            f"lmds substitute distance {d_inf} must exceed the largest observed distance {d_max}"
        )
    far_w = spec.far_weight if spec.far_weight is not None else 1.0 / n
    if not far_w > 0:
        raise InvalidSettings(f"lmds far-pair weight must be > 0, got {far_w}")
    far = offdiag[None, :, :] & ~nbr
    w = np.where(nbr, 1.0, far_w)
    w[:, eye] = 0.0
    return WeightTensor(
        variant="lmds", entries=w, far_pair=far, d_infinity=float(d_inf), far_weight=float(far_w)
    )


def _surrogates(coords: np.ndarray, deff: np.ndarray, i: int, rng) -> np.ndarray:
    """Surrogate targets for curve ``i``: each partner shifted to its
    target distance along the direction toward the current iterate.
    Column ``i`` carries the iterate itself (its pair weight is zero)."""
    xi = coords[:, i, :]
    diff = xi[:, None, :] - coords  # (T, N, d)
    norms = np.linalg.norm(diff, axis=2)  # (T, N)
    scale = np.maximum(1.0, np.abs(coords).max(axis=(1, 2)))
    coincident = norms <= COINCIDENCE_RTOL * scale[:, None]
    coincident[:, i] = False
    safe = np.where(norms > 0, norms, 1.0)
    dirs = diff / safe[:, :, None]
    if coincident.any():
        # Coinciding with a partner leaves the descent direction free; a
        # random unit vector makes a fixed point there a null event.
        idx = np.argwhere(coincident)
        draws = rng.standard_normal((idx.shape[0], coords.shape[2]))
        draws /= np.linalg.norm(draws, axis=1, keepdims=True)
        dirs[idx[:, 0], idx[:, 1]] = draws
    surr = coords + deff[:, i, :][:, :, None] * dirs
    surr[:, i, :] = xi
    return surr


def surrogate_points(curves, tensor, weights: WeightTensor | None, i: int, rng) -> np.ndarray:
    """Public wrapper around the surrogate construction; see
    :func:`_surrogates` for the geometry."""
    coords = _coords_of(curves)
    if not 0 <= i < coords.shape[1]:
        raise ShapeMismatch(f"item index {i} outside [0, {coords.shape[1]})")
    return _surrogates(coords, _effective(tensor, weights), i, np.random.default_rng(rng) if isinstance(rng, int) else rng)


def update_curve(surrogates: np.ndarray, weight_row: np.ndarray, system) -> np.ndarray:
    """Exact minimizer of the surrogate bound: solve the factorized system
    against the weight-combined surrogates.  Returns a ``(T, d)`` curve."""
    rhs = np.einsum("tn,tnd->td", weight_row, surrogates)
    return system.solve(rhs)


def single_curve_cost(curves, tensor, weights: WeightTensor | None, i: int, lam: float, op) -> float:
    """Conditional total cost of curve ``i`` with all other curves fixed:
    both orientations of each pair term plus the curve's own roughness."""
    coords = _coords_of(curves)
    deff = _effective(tensor, weights)
    xi = coords[:, i, :]
    norms = np.linalg.norm(xi[:, None, :] - coords, axis=2)
    w_row = _weight_row(weights, coords, i)
    stress = 2.0 * float(np.sum(w_row * (norms - deff[:, i, :]) ** 2))
    return stress + lam * roughness(xi, op)


def _weight_row(weights: WeightTensor | None, coords: np.ndarray, i: int) -> np.ndarray:
    if weights is not None:
        return weights.entries[:, i, :]
    row = np.ones((coords.shape[0], coords.shape[1]))
    row[:, i] = 0.0
    return row


def surrogate_upper_bound(
    curves, tensor, weights: WeightTensor | None, i: int, new_curve: np.ndarray, lam: float, op, rng=None
) -> float:
    """Value of the quadratic majorizer of the conditional cost, built at
    the current curve and evaluated at ``new_curve``.

    The bound dominates the conditional cost everywhere and touches it at
    the current curve; both properties are exercised by the tests.
    """
    coords = _coords_of(curves)
    deff = _effective(tensor, weights)
    if rng is None:
        rng = np.random.default_rng(0)
    z = coords[:, i, :]
    x = np.asarray(new_curve, dtype=float)
    w_row = _weight_row(weights, coords, i)
    d_row = deff[:, i, :]

    norms_z = np.linalg.norm(z[:, None, :] - coords, axis=2)
    surr = _surrogates(coords, deff, i, rng)

    diff_x = x[:, None, :] - coords
    vex = 2.0 * float(np.sum(w_row * np.einsum("tnd,tnd->tn", diff_x, diff_x)))
    vex += lam * roughness(x, op)
    cave_at_z = -4.0 * float(np.sum(w_row * d_row * norms_z))
    step = np.einsum("td,tnd->tn", x - z, surr - coords)
    linear = -4.0 * float(np.sum(w_row * step))
    const = 2.0 * float(np.sum(w_row * d_row**2))
    return vex + cave_at_z + linear + const


def curve_gradient(curves, tensor, weights: WeightTensor | None, i: int, lam: float, op) -> np.ndarray | None:
    """Analytic gradient of the conditional cost at curve ``i``; ``None``
    when the curve coincides with a partner somewhere (nondifferentiable)."""
    coords = _coords_of(curves)
    deff = _effective(tensor, weights)
    xi = coords[:, i, :]
    diff = xi[:, None, :] - coords
    norms = np.linalg.norm(diff, axis=2)
    scale = np.maximum(1.0, np.abs(coords).max(axis=(1, 2)))
    mask = norms <= COINCIDENCE_RTOL * scale[:, None]
    mask[:, i] = False
    if mask.any():
        return None
    norms[:, i] = 1.0  # self pair carries zero weight
    w_row = _weight_row(weights, coords, i)
    factor = w_row * (1.0 - deff[:, i, :] / norms)
    mat = op.matrix if isinstance(op, RoughnessOperator) else np.asarray(op)
    return 4.0 * np.einsum("tn,tnd->td", factor, diff) + 2.0 * lam * (mat @ xi)


def subgradient_residual(curves, tensor, weights: WeightTensor | None, lam: float, op, i: int) -> float:
    """Norm of the conditional-cost gradient at curve ``i``; NaN flags a
    coincident (nondifferentiable) configuration."""
    grad = curve_gradient(curves, tensor, weights, i, lam, op)
    if grad is None:
        return float("nan")
    return float(np.linalg.norm(grad))


def _mm_inner(
    coords: np.ndarray,
    deff: np.ndarray,
    w_entries: np.ndarray,
    i: int,
    system,
    tol: float,
    max_inner: int,
    rng,
) -> int:
    """In-place inner loop on curve ``i``; returns the iteration count."""
    w_row = w_entries[:, i, :]
    count = 0
    for _ in range(max_inner):
        z = coords[:, i, :].copy()
        surr = _surrogates(coords, deff, i, rng)
        x_new = update_curve(surr, w_row, system)
        coords[:, i, :] = x_new
        count += 1
        change = np.linalg.norm(x_new - z) / max(np.linalg.norm(z), CHANGE_FLOOR)
        if change <= tol:
            break
    return count


def mm_inner_loop(
    curves, tensor, weights: WeightTensor | None, i: int, settings: SolverSettings, rng
) -> tuple[np.ndarray, int]:
    """Run the majorize-minimize loop for one curve against fixed partners.

    Returns the updated ``(T, d)`` curve and the number of iterations
    taken; the stopping test is the relative Frobenius change of the curve
    against ``settings.tol``.
    """
    coords = np.array(_coords_of(curves))
    deff = _effective(tensor, weights)
    if isinstance(tensor, DistanceTensor):
        op = grid_roughness_operator(tensor.grid)
    else:
        op = grid_roughness_operator(curves.grid) if isinstance(curves, EmbeddingCurves) else None
    if op is None:
        raise InvalidSettings("cannot infer the penalty operator; pass a DistanceTensor")
    w_row = _weight_row(weights, coords, i)
    system = _system_for_pattern(
        w_row.sum(axis=1), settings.lam, op, coords.shape[2], {}, i
    )
    w_entries = weights.entries if weights is not None else _unit_weights(coords.shape[0], coords.shape[1])
    rng = np.random.default_rng(rng) if isinstance(rng, int) else rng
    count = _mm_inner(coords, deff, w_entries, i, system, settings.tol, settings.max_inner, rng)
    return coords[:, i, :], count


def _unit_weights(n_slices: int, n: int) -> np.ndarray:
    w = np.ones((n_slices, n, n))
    idx = np.arange(n)
    w[:, idx, idx] = 0.0
    return w


def _system_for_pattern(c_vec: np.ndarray, lam: float, op, dim: int, cache: dict, item: int):
    """Factorized update system for a per-slice coefficient pattern, cached
    by the pattern bytes so repeated patterns share one factorization."""
    penalty_active = lam > 0 and op.matrix.any()
    if not penalty_active and (c_vec <= 0).any():
        k = int(np.flatnonzero(c_vec <= 0)[0])
        raise SingularSystem(
            f"curve {item}: total pair weight is zero at slice {k} and the penalty "
            "provides no coupling (lambda = 0 or single/double slice grid)"
        )
    key = c_vec.tobytes()
    system = cache.get(key)
    if system is None:
        # Penalty enters the per-curve system at half weight; each pair term
        # is counted twice in the conditional cost, the roughness once.
        system = build_update_system(c_vec, 0.5 * lam, op, dim)
        cache[key] = system
    return system


def cmds(
    tensor: DistanceTensor, settings: SolverSettings, weights: WeightTensor | None = None
) -> SolveResult:
    """Embed a distance tensor as smooth curves.

    Sweeps the curves in index order (updates visible immediately), runs
    the inner majorize-minimize loop on each, and stops once the total
    cost changes by at most ``tol * max(cost, 1)`` over a sweep or the
    outer cap is reached.  Non-convergence is reported in the result, not
    raised.

    Parameters
    ----------
    tensor : DistanceTensor
        Validated input distances.
    settings : SolverSettings
        Dimension, penalty weight, variant, initialization and caps; the
        seed fixes the random initialization and any tie-breaking draws.
    weights : WeightTensor, optional
        Override the weights built from ``settings.variant`` (used by
        tests and by callers with custom weighting schemes).
    """
    rng = np.random.default_rng(settings.seed)
    op = grid_roughness_operator(tensor.grid)
    if weights is None:
        weights = build_weights(tensor, settings.variant)
    elif weights.entries.shape != tensor.entries.shape:
        raise ShapeMismatch(
            f"weights shape {weights.entries.shape} does not match tensor {tensor.entries.shape}"
        )
    deff = weights.effective_distances(tensor)
    n = tensor.n_items

    coords = initial_curves(tensor, settings.dim, settings.init, rng).coords.copy()
    cache: dict = {}
    trace = [total_cost(coords, tensor, weights, settings.lam, op)]
    inner_counts: list[list[int]] = []
    converged = False

    for _ in range(settings.max_outer):
        counts = []
        for i in range(n):
            c_vec = weights.entries[:, i, :].sum(axis=1)
            system = _system_for_pattern(c_vec, settings.lam, op, settings.dim, cache, i)
            counts.append(
                _mm_inner(coords, deff, weights.entries, i, system, settings.tol, settings.max_inner, rng)
            )
        inner_counts.append(counts)
        cost = total_cost(coords, tensor, weights, settings.lam, op)
        if cost > trace[-1] + _cost_noise_floor(coords, settings.lam, op):
            warnings.warn(
                f"total cost increased from {trace[-1]!r} to {cost!r}",
                DescentViolationWarning,
                stacklevel=2,
            )
        change = trace[-1] - cost
        trace.append(cost)
        if abs(change) <= settings.tol * max(abs(cost), 1.0):
            converged = True
            break

    residuals = np.array(
        [subgradient_residual(coords, tensor, weights, settings.lam, op, i) for i in range(n)]
    )
    curves = EmbeddingCurves(grid=tensor.grid, coords=coords)
    return SolveResult(
        curves=curves,
        cost_trace=np.array(trace),
        inner_iteration_counts=inner_counts,
        converged=converged,
        final_subgradient_residuals=residuals,
        settings=settings,
    )
