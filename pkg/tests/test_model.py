import numpy as np
import pytest

from contmds.exceptions import (
    AsymmetryTooLarge,
    IndexOutOfRange,
    InvalidSettings,
    NegativeDistance,
    NonFiniteEntry,
    NonZeroDiagonal,
    ShapeMismatch,
)
from contmds.model import (
    DistanceTensor,
    EmbeddingCurves,
    HyperparameterGrid,
    SolverSettings,
    VariantSpec,
    devectorize_curve,
    settings_from_dict,
    settings_to_dict,
    validate_distance_tensor,
    vectorize_curve,
)


def grid1():
    return HyperparameterGrid([0.0])


class TestGrid:
    def test_single_point_grid(self):
        g = HyperparameterGrid([0.5])
        assert g.n_slices == 1
        assert not g.two_axis

    def test_strictly_increasing_required(self):
        with pytest.raises(InvalidSettings):
            HyperparameterGrid([0.0, 0.0, 1.0])
        with pytest.raises(InvalidSettings):
            HyperparameterGrid([1.0, 0.5])

    def test_two_axis_slice_count_and_order(self):
        g = HyperparameterGrid([0.0, 1.0, 2.0], beta=[10.0, 20.0])
        assert g.n_slices == 6
        vals = g.slice_values()
        # alpha runs fastest
        assert vals[0] == (0.0, 10.0)
        assert vals[1] == (1.0, 10.0)
        assert vals[3] == (0.0, 20.0)

    def test_empty_axis_rejected(self):
        with pytest.raises(ShapeMismatch):
            HyperparameterGrid([])


class TestValidateDistanceTensor:
    def test_minimal_metric_unchanged(self):
        t = validate_distance_tensor([[[0.0, 1.0], [1.0, 0.0]]], grid1())
        np.testing.assert_array_equal(t.entries, [[[0.0, 1.0], [1.0, 0.0]]])

    def test_negative_entry_rejected(self):
        with pytest.raises(NegativeDistance, match=r"slice 0.*\(1, 0\)"):
            validate_distance_tensor([[[0.0, 1.0], [-1.0, 0.0]]], grid1())

    def test_tiny_asymmetry_averaged(self):
        t = validate_distance_tensor([[[0.0, 1.0 + 1e-12], [1.0, 0.0]]], grid1())
        # averaging (d + d^T)/2 applied by hand
        assert t.entries[0, 0, 1] == 1.0 + 5e-13
        assert t.entries[0, 1, 0] == 1.0 + 5e-13

    def test_large_asymmetry_rejected(self):
        with pytest.raises(AsymmetryTooLarge, match="slice 0"):
            validate_distance_tensor([[[0.0, 1.0], [2.0, 0.0]]], grid1())

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteEntry, match="slice 0"):
            validate_distance_tensor([[[0.0, np.nan], [np.nan, 0.0]]], grid1())

    def test_diagonal_noise_zeroed(self):
        t = validate_distance_tensor([[[1e-12, 1.0], [1.0, 1e-12]]], grid1())
        assert t.entries[0, 0, 0] == 0.0

    def test_large_diagonal_rejected(self):
        with pytest.raises(NonZeroDiagonal):
            validate_distance_tensor([[[0.5, 1.0], [1.0, 0.0]]], grid1())

    def test_slice_count_must_match_grid(self):
        with pytest.raises(ShapeMismatch):
            validate_distance_tensor(
                np.zeros((2, 3, 3)), HyperparameterGrid([0.0])
            )

    def test_single_item_rejected(self):
        with pytest.raises(ShapeMismatch):
            validate_distance_tensor(np.zeros((1, 1, 1)), grid1())

    def test_validated_invariants_hold_exactly(self):
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((3, 6, 2))
        raw = np.linalg.norm(pts[:, :, None, :] - pts[:, None, :, :], axis=-1)
        t = validate_distance_tensor(raw, HyperparameterGrid([0.0, 1.0, 2.0]))
        for k in range(3):
            s = t.entries[k]
            np.testing.assert_array_equal(s, s.T)
            np.testing.assert_array_equal(np.diag(s), np.zeros(6))
            assert (s >= 0).all()

    def test_entries_are_readonly(self):
        t = validate_distance_tensor([[[0.0, 1.0], [1.0, 0.0]]], grid1())
        with pytest.raises(ValueError):
            t.entries[0, 0, 1] = 5.0


class TestVectorize:
    def test_stacking_order(self):
        coords = np.array([[[1.0, 2.0]], [[3.0, 4.0]]])  # T=2, N=1, d=2
        curves = EmbeddingCurves(HyperparameterGrid([0.0, 1.0]), coords)
        np.testing.assert_array_equal(vectorize_curve(curves, 0), [1.0, 2.0, 3.0, 4.0])

    def test_roundtrip(self):
        rng = np.random.default_rng(3)
        coords = rng.standard_normal((4, 5, 3))
        for i in range(5):
            vec = vectorize_curve(coords, i)
            np.testing.assert_array_equal(devectorize_curve(vec, 4, 3), coords[:, i, :])

    def test_single_slice(self):
        coords = np.array([[[7.0, 8.0], [9.0, 10.0]]])
        curves = EmbeddingCurves(HyperparameterGrid([0.0]), coords)
        np.testing.assert_array_equal(vectorize_curve(curves, 1), [9.0, 10.0])

    def test_bad_index(self):
        coords = np.zeros((1, 2, 1))
        with pytest.raises(IndexOutOfRange):
            vectorize_curve(coords, 2)


class TestSettings:
    def test_bounds_enforced(self):
        with pytest.raises(InvalidSettings):
            SolverSettings(lam=-1.0)
        with pytest.raises(InvalidSettings):
            SolverSettings(dim=0)
        with pytest.raises(InvalidSettings):
            SolverSettings(tol=0.0)
        with pytest.raises(InvalidSettings):
            SolverSettings(init="magic")

    def test_variant_tag_normalized(self):
        s = SolverSettings(variant="sammon")
        assert isinstance(s.variant, VariantSpec)
        assert s.variant.tag == "sammon"

    def test_unfolding_needs_groups(self):
        with pytest.raises(InvalidSettings):
            VariantSpec(tag="unfolding")

    def test_lmds_bounds(self):
        with pytest.raises(InvalidSettings):
            VariantSpec(tag="lmds", k=0)
        with pytest.raises(InvalidSettings):
            VariantSpec(tag="lmds", far_weight=0.0)

    def test_dict_roundtrip(self):
        s = SolverSettings(lam=2.0, dim=3, seed=9, variant=VariantSpec("lmds", k=4, far_weight=0.1, d_infinity=50.0))
        doc = settings_to_dict(s)
        assert settings_from_dict(doc) == s

    def test_unknown_keys_rejected(self):
        with pytest.raises(InvalidSettings, match="bogus"):
            settings_from_dict({"bogus": 1})
