import numpy as np
import pytest

from contmds.exceptions import (
    SingularSystem,
    ZeroDistanceWithReciprocalWeight,
)
from contmds.families import (
    ClusterToyConfig,
    collapsing_clusters_toy,
    euclidean_distances,
)
from contmds.metrics import procrustes_align, stress_per_slice, total_cost
from contmds.model import (
    HyperparameterGrid,
    SolverSettings,
    VariantSpec,
    WeightTensor,
    validate_distance_tensor,
)
from contmds.penalty import build_update_system, grid_roughness_operator, roughness_matrix
from contmds.solver import (
    build_weights,
    cmds,
    curve_gradient,
    mm_inner_loop,
    single_curve_cost,
    subgradient_residual,
    surrogate_points,
    surrogate_upper_bound,
    update_curve,
)


def tensor_from_slices(slices, alphas=None):
    slices = np.asarray(slices, dtype=float)
    if alphas is None:
        alphas = np.arange(len(slices), dtype=float)
    return validate_distance_tensor(slices, HyperparameterGrid(alphas))


def random_tensor(rng, n_slices, n, ambient=3):
    slices = [euclidean_distances(rng.standard_normal((n, ambient))) for _ in range(n_slices)]
    return tensor_from_slices(slices)


class TestBuildWeights:
    def setup_method(self):
        rng = np.random.default_rng(0)
        self.tensor = random_tensor(rng, 2, 5)

    def test_raw_all_ones_offdiagonal(self):
        w = build_weights(self.tensor, "raw")
        off = ~np.eye(5, dtype=bool)
        assert (w.entries[:, off] == 1.0).all()
        assert (w.entries[:, ~off] == 0.0).all()

    def test_sammon_reciprocal(self):
        d = np.array([[0.0, 2.0], [2.0, 0.0]])
        t = tensor_from_slices([d])
        w = build_weights(t, "sammon")
        assert w.entries[0, 0, 1] == pytest.approx(0.5)

    def test_elastic_squared_reciprocal(self):
        d = np.array([[0.0, 2.0], [2.0, 0.0]])
        w = build_weights(tensor_from_slices([d]), "elastic")
        assert w.entries[0, 0, 1] == pytest.approx(0.25)

    def test_reciprocal_rejects_zero_distance(self):
        d = np.zeros((1, 3, 3))
        d[0, 0, 1] = d[0, 1, 0] = 1.0
        t = tensor_from_slices(d)
        with pytest.raises(ZeroDistanceWithReciprocalWeight):
            build_weights(t, "sammon")

    def test_unfolding_between_group_zero(self):
        spec = VariantSpec(tag="unfolding", groups=("a", "a", "b", "b", "b"))
        w = build_weights(self.tensor, spec)
        assert w.entries[0, 0, 1] == 1.0
        assert w.entries[0, 0, 2] == 0.0
        assert w.entries[0, 2, 3] == 1.0

    def test_lmds_three_collinear_points(self):
        d = euclidean_distances(np.array([[0.0], [1.0], [10.0]]))
        t = tensor_from_slices([d])
        spec = VariantSpec(tag="lmds", k=1)
        w = build_weights(t, spec)
        # mutual neighbors (0, 1) keep weight one and the true distance
        assert w.entries[0, 0, 1] == 1.0
        assert not w.far_pair[0, 0, 1]
        # 2's nearest neighbor is 1, so (1, 2) counts through the union rule
        assert w.entries[0, 1, 2] == 1.0
        # (0, 2) is a far pair: small weight, substitute distance
        assert w.entries[0, 0, 2] == pytest.approx(1.0 / 3.0)
        assert w.far_pair[0, 0, 2]
        deff = w.effective_distances(t)
        assert deff[0, 0, 2] == pytest.approx(2.0 * 10.0)
        assert deff[0, 0, 1] == 1.0

    def test_lmds_dinf_must_exceed_max(self):
        with pytest.raises(Exception, match="exceed"):
            build_weights(self.tensor, VariantSpec(tag="lmds", k=1, d_infinity=0.1))


class TestSurrogatePoints:
    def test_hand_value(self):
        coords = np.array([[[0.0, 0.0], [1.0, 0.0]]])  # T=1, N=2, d=2
        d = np.array([[[0.0, 2.0], [2.0, 0.0]]])
        t = tensor_from_slices(d, alphas=[0.0])
        surr = surrogate_points(coords, t, None, 0, np.random.default_rng(0))
        np.testing.assert_allclose(surr[0, 1], [-1.0, 0.0])

    def test_satisfied_pair_lands_on_iterate(self):
        coords = np.array([[[0.0, 0.0], [3.0, 4.0]]])
        d = np.array([[[0.0, 5.0], [5.0, 0.0]]])
        t = tensor_from_slices(d, alphas=[0.0])
        surr = surrogate_points(coords, t, None, 0, np.random.default_rng(0))
        np.testing.assert_allclose(surr[0, 1], [0.0, 0.0], atol=1e-12)

    def test_coincident_norm_constraint_and_uniform_direction(self):
        coords = np.zeros((1, 2, 2))  # both points at the origin
        d = np.array([[[0.0, 3.0], [3.0, 0.0]]])
        t = tensor_from_slices(d, alphas=[0.0])
        dirs = []
        for seed in range(200):
            surr = surrogate_points(coords, t, None, 0, np.random.default_rng(seed))
            step = surr[0, 1] - coords[0, 1]
            assert np.linalg.norm(step) == pytest.approx(3.0, rel=1e-12)
            dirs.append(step / 3.0)
        dirs = np.array(dirs)
        # uniform directions average out near zero
        assert np.linalg.norm(dirs.mean(axis=0)) < 0.2


class TestUpdateCurve:
    def test_mean_of_surrogates_lambda_zero(self):
        rng = np.random.default_rng(1)
        surr = rng.standard_normal((1, 6, 2))
        w_row = np.ones((1, 6))
        w_row[0, 0] = 0.0  # item 0 updating itself
        system = build_update_system(5.0, 0.0, roughness_matrix(1), dim=2)
        new = update_curve(surr, w_row, system)
        np.testing.assert_allclose(new[0], surr[0, 1:].mean(axis=0), rtol=1e-12)

    def test_two_point_exact_fit(self):
        coords = np.array([[[5.0, 1.0], [0.0, 0.0]]])
        d = np.array([[[0.0, 2.0], [2.0, 0.0]]])
        t = tensor_from_slices(d, alphas=[0.0])
        surr = surrogate_points(coords, t, None, 0, np.random.default_rng(0))
        w_row = np.array([[0.0, 1.0]])
        system = build_update_system(1.0, 0.0, roughness_matrix(1), dim=2)
        new = update_curve(surr, w_row, system)
        np.testing.assert_allclose(new[0], surr[0, 1])
        moved = coords.copy()
        moved[:, 0, :] = new
        assert stress_per_slice(moved, t)[0] == pytest.approx(0.0, abs=1e-20)

    def test_huge_lambda_straightens(self):
        rng = np.random.default_rng(2)
        n_slices, n, dim = 8, 7, 2
        surr = rng.standard_normal((n_slices, n, dim))
        w_row = np.ones((n_slices, n))
        w_row[:, 0] = 0.0
        op = roughness_matrix(n_slices)
        low = update_curve(surr, w_row, build_update_system(float(n - 1), 0.0, op, dim))
        stress_scale = float(np.sum(surr**2))
        lam_big = 1e6 * stress_scale
        smooth = update_curve(surr, w_row, build_update_system(float(n - 1), lam_big, op, dim))
        from contmds.penalty import roughness

        assert roughness(smooth, op) <= 1e-6 * roughness(low, op)


class TestUpperBound:
    def test_dominates_and_touches(self):
        rng = np.random.default_rng(3)
        t = random_tensor(rng, 4, 6)
        op = grid_roughness_operator(t.grid)
        w = build_weights(t, "raw")
        lam = 3.0
        for _ in range(50):
            coords = rng.standard_normal((4, 6, 2))
            i = int(rng.integers(6))
            x_new = rng.standard_normal((4, 2))
            moved = coords.copy()
            moved[:, i, :] = x_new
            u = surrogate_upper_bound(coords, t, w, i, x_new, lam, op)
            f = single_curve_cost(moved, t, w, i, lam, op)
            assert u >= f - 1e-10
            u_self = surrogate_upper_bound(coords, t, w, i, coords[:, i, :], lam, op)
            f_self = single_curve_cost(coords, t, w, i, lam, op)
            assert abs(u_self - f_self) <= 1e-10


class TestInnerLoop:
    def test_single_iteration_when_converged(self):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((5, 2))
        t = tensor_from_slices([euclidean_distances(pts)], alphas=[0.0])
        settings = SolverSettings(dim=2, lam=0.0, tol=1e-3, max_inner=50)
        # starting from the exact configuration, the first step moves nowhere
        curve, count = mm_inner_loop(pts[None].copy(), t, build_weights(t, "raw"), 0, settings, rng=0)
        assert count == 1
        np.testing.assert_allclose(curve[0], pts[0], atol=1e-9)

    def test_conditional_cost_nonincreasing(self):
        rng = np.random.default_rng(5)
        t = random_tensor(rng, 5, 7)
        op = grid_roughness_operator(t.grid)
        w = build_weights(t, "sammon")
        lam = 2.0
        coords = rng.standard_normal((5, 7, 2))
        # replay the loop by hand to watch the conditional cost per iteration
        from contmds.penalty import build_update_system
        from contmds.solver import _mm_inner, _surrogates

        i = 2
        c_vec = w.entries[:, i, :].sum(axis=1)
        system = build_update_system(c_vec, 0.5 * lam, op, 2)
        rng2 = np.random.default_rng(0)
        prev = single_curve_cost(coords, t, w, i, lam, op)
        deff = w.effective_distances(t)
        for _ in range(15):
            surr = _surrogates(coords, deff, i, rng2)
            coords[:, i, :] = update_curve(surr, w.entries[:, i, :], system)
            cur = single_curve_cost(coords, t, w, i, lam, op)
            assert cur <= prev + 1e-10
            prev = cur

    def test_three_point_line_recovered(self):
        pts = np.array([[0.0], [1.0], [3.0]])
        t = tensor_from_slices([euclidean_distances(pts)], alphas=[0.0])
        settings = SolverSettings(dim=1, lam=0.0, tol=1e-12, max_outer=200, max_inner=50, init="per-slice")
        result = cmds(t, settings)
        _, resid = procrustes_align(pts, result.curves.coords[0])
        assert resid <= 1e-6
        assert stress_per_slice(result.curves, t)[0] <= 1e-12


class TestCmds:
    def test_exact_single_slice(self):
        rng = np.random.default_rng(6)
        pts = rng.standard_normal((10, 2))
        t = tensor_from_slices([euclidean_distances(pts)], alphas=[0.0])
        result = cmds(t, SolverSettings(dim=2, lam=0.0, init="per-slice", tol=1e-10))
        assert result.converged
        assert stress_per_slice(result.curves, t)[0] <= 1e-6

    def test_constant_tensor_constant_curves(self):
        rng = np.random.default_rng(7)
        d = euclidean_distances(rng.standard_normal((8, 2)))
        t = tensor_from_slices([d] * 5)
        result = cmds(t, SolverSettings(dim=2, lam=1.0, init="aggregated", tol=1e-9))
        op = grid_roughness_operator(t.grid)
        from contmds.metrics import roughness_per_curve

        assert roughness_per_curve(result.curves, op).sum() <= 1e-8
        assert stress_per_slice(result.curves, t).max() <= 1e-6

    def test_monotone_trace(self):
        rng = np.random.default_rng(8)
        t = random_tensor(rng, 6, 9)
        for lam in (0.0, 1.0, 100.0):
            result = cmds(t, SolverSettings(dim=2, lam=lam, init="random", seed=3, tol=1e-7, max_outer=25))
            assert (np.diff(result.cost_trace) <= 1e-10).all()

    def test_seeded_determinism_bit_exact(self):
        rng = np.random.default_rng(9)
        t = random_tensor(rng, 4, 7)
        settings = SolverSettings(dim=2, lam=2.0, init="random", seed=42, tol=1e-8, max_outer=20)
        a = cmds(t, settings)
        b = cmds(t, settings)
        np.testing.assert_array_equal(a.curves.coords, b.curves.coords)
        np.testing.assert_array_equal(a.cost_trace, b.cost_trace)
        assert a.inner_iteration_counts == b.inner_iteration_counts

    def test_not_converged_reported(self):
        rng = np.random.default_rng(10)
        t = random_tensor(rng, 5, 8)
        result = cmds(t, SolverSettings(dim=1, lam=0.0, init="random", seed=0, tol=1e-14, max_outer=2))
        assert not result.converged
        assert len(result.cost_trace) == 3  # initial cost + two sweeps

    def test_single_slice_lambda_irrelevant(self):
        rng = np.random.default_rng(11)
        t = random_tensor(rng, 1, 7)
        a = cmds(t, SolverSettings(dim=2, lam=0.0, init="per-slice", seed=1))
        b = cmds(t, SolverSettings(dim=2, lam=5.0, init="per-slice", seed=1))
        np.testing.assert_allclose(a.curves.coords, b.curves.coords, atol=1e-9)

    def test_all_ones_weights_bit_identical_to_raw(self):
        rng = np.random.default_rng(12)
        t = random_tensor(rng, 3, 6)
        settings = SolverSettings(dim=2, lam=1.5, init="random", seed=5, max_outer=10)
        raw = cmds(t, settings)
        ones = np.ones_like(t.entries)
        idx = np.arange(t.n_items)
        ones[:, idx, idx] = 0.0
        manual = cmds(t, settings, weights=WeightTensor(variant="raw", entries=ones))
        np.testing.assert_array_equal(raw.curves.coords, manual.curves.coords)
        np.testing.assert_array_equal(raw.cost_trace, manual.cost_trace)

    def test_coincident_start_recovers(self):
        rng = np.random.default_rng(13)
        t = random_tensor(rng, 1, 5)
        # zero-scale random init puts every point at the origin: the random
        # direction branch must fire and the solve still descend
        from contmds.initialization import init_random
        from contmds.model import EmbeddingCurves

        settings = SolverSettings(dim=2, lam=0.0, init="random", seed=7, tol=1e-8, max_outer=30)
        curves0 = init_random(t, 2, rng=7, scale=0.0)
        assert (curves0.coords == 0).all()
        result = cmds(t, settings)  # random init, may or may not coincide
        assert (np.diff(result.cost_trace) <= 1e-10).all()

        # force the degenerate start through the solver internals
        from contmds.penalty import grid_roughness_operator
        from contmds.solver import _mm_inner, _system_for_pattern

        coords = np.zeros((1, 5, 2))
        w = build_weights(t, "raw")
        system = _system_for_pattern(w.entries[:, 0, :].sum(axis=1), 0.0, grid_roughness_operator(t.grid), 2, {}, 0)
        count = _mm_inner(coords, t.entries, w.entries, 0, system, 1e-8, 20, np.random.default_rng(0))
        assert np.linalg.norm(coords[0, 0]) > 0

    def test_unfolding_singleton_group_singular(self):
        rng = np.random.default_rng(14)
        t = random_tensor(rng, 1, 4)
        spec = VariantSpec(tag="unfolding", groups=("a", "a", "a", "lonely"))
        with pytest.raises(SingularSystem):
            cmds(t, SolverSettings(dim=1, lam=0.0, variant=spec, init="random", seed=0))

    def test_grid_search_oracle_three_points(self):
        # exhaustive check that the solver's cost is globally minimal for a
        # small one-dimensional instance
        rng = np.random.default_rng(15)
        pts = np.sort(rng.standard_normal(3))[:, None]
        t = tensor_from_slices([euclidean_distances(pts)], alphas=[0.0])
        result = cmds(t, SolverSettings(dim=1, lam=0.0, init="per-slice", tol=1e-12, max_outer=100))
        op = grid_roughness_operator(t.grid)
        w = build_weights(t, "raw")
        solver_cost = total_cost(result.curves, t, w, 0.0, op)

        d = t.entries[0]
        box = 1.5 * d.max()
        step = 1e-3
        x2 = np.arange(0.0, box + step, step)  # reflection gauge: x2 >= 0
        x3 = np.arange(-box, box + step, step)
        best = np.inf
        for chunk in np.array_split(x2, 20):
            a = chunk[:, None]
            b = x3[None, :]
            cost = 2 * (
                (np.abs(a) - d[0, 1]) ** 2
                + (np.abs(b) - d[0, 2]) ** 2
                + (np.abs(b - a) - d[1, 2]) ** 2
            )
            best = min(best, float(cost.min()))
        assert solver_cost <= best + 1e-4


class TestTwoAxisGrid:
    def make_tensor(self, rng, n_alpha=3, n_beta=2, n=6):
        grid = HyperparameterGrid(np.arange(float(n_alpha)), beta=np.arange(float(n_beta)))
        slices = [
            euclidean_distances(rng.standard_normal((n, 2))) for _ in range(n_alpha * n_beta)
        ]
        return validate_distance_tensor(np.array(slices), grid)

    def test_solve_monotone_with_composite_penalty(self):
        rng = np.random.default_rng(20)
        t = self.make_tensor(rng)
        result = cmds(t, SolverSettings(dim=2, lam=3.0, init="random", seed=1, tol=1e-7, max_outer=25))
        assert (np.diff(result.cost_trace) <= 1e-10).all()
        assert result.curves.n_slices == 6

    def test_huge_lambda_flattens_both_axes(self):
        rng = np.random.default_rng(21)
        t = self.make_tensor(rng, n_alpha=4, n_beta=3)
        op = grid_roughness_operator(t.grid)
        result = cmds(t, SolverSettings(dim=1, lam=1e10, init="random", seed=2, tol=1e-8, max_outer=15))
        from contmds.metrics import roughness_per_curve

        assert roughness_per_curve(result.curves, op).sum() <= 1e-8


class TestSubgradientResidual:
    def test_zero_at_two_point_optimum(self):
        d = np.array([[[0.0, 2.0], [2.0, 0.0]]])
        t = tensor_from_slices(d, alphas=[0.0])
        coords = np.array([[[0.0, 0.0], [2.0, 0.0]]])
        op = grid_roughness_operator(t.grid)
        w = build_weights(t, "raw")
        assert subgradient_residual(coords, t, w, 0.0, op, 0) == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(16)
        t = random_tensor(rng, 4, 6)
        op = grid_roughness_operator(t.grid)
        w = build_weights(t, "elastic")
        lam = 1.3
        for _ in range(10):
            coords = rng.standard_normal((4, 6, 2))
            i = int(rng.integers(6))
            grad = curve_gradient(coords, t, w, i, lam, op)
            h = 1e-6
            fd = np.zeros_like(grad)
            for k in range(4):
                for dd in range(2):
                    up = coords.copy()
                    up[k, i, dd] += h
                    dn = coords.copy()
                    dn[k, i, dd] -= h
                    fd[k, dd] = (
                        single_curve_cost(up, t, w, i, lam, op)
                        - single_curve_cost(dn, t, w, i, lam, op)
                    ) / (2 * h)
            assert np.linalg.norm(grad - fd) <= 1e-5 * max(np.linalg.norm(fd), 1.0)

    def test_coincident_flagged_nan(self):
        t = tensor_from_slices(np.array([[[0.0, 1.0], [1.0, 0.0]]]), alphas=[0.0])
        coords = np.zeros((1, 2, 2))
        op = grid_roughness_operator(t.grid)
        val = subgradient_residual(coords, t, None, 0.0, op, 0)
        assert np.isnan(val)

    def test_small_after_convergence(self):
        rng = np.random.default_rng(17)
        pts = rng.standard_normal((10, 2))
        t = tensor_from_slices([euclidean_distances(pts)], alphas=[0.0])
        result = cmds(t, SolverSettings(dim=2, lam=0.0, init="per-slice", tol=1e-12, max_outer=100))
        mean_d = t.entries[0][~np.eye(10, dtype=bool)].mean()
        assert np.nanmax(result.final_subgradient_residuals) <= 1e-4 * (10 * mean_d)


class TestSammonScaleRelation:
    def test_weighted_stress_scales_linearly(self):
        rng = np.random.default_rng(18)
        pts = rng.standard_normal((8, 3))
        d = euclidean_distances(pts)
        t = tensor_from_slices([d], alphas=[0.0])
        t10 = tensor_from_slices([10.0 * d], alphas=[0.0])
        result = cmds(t, SolverSettings(dim=2, lam=0.0, variant="sammon", init="per-slice", tol=1e-10))
        coords = result.curves.coords
        from contmds.metrics import weighted_stress_per_slice

        w = build_weights(t, "sammon")
        w10 = build_weights(t10, "sammon")
        s = weighted_stress_per_slice(coords, t, w)[0]
        s10 = weighted_stress_per_slice(10.0 * coords, t10, w10)[0]
        assert s10 == pytest.approx(10.0 * s, rel=1e-8)
