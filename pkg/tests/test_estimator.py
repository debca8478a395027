import numpy as np
import pytest
from sklearn.base import clone

from contmds import ContinuousMDS
from contmds.exceptions import InvalidSettings
from contmds.families import collapsing_clusters_toy, ClusterToyConfig, euclidean_distances


def test_single_matrix_roundtrip():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((9, 2))
    d = euclidean_distances(pts)
    est = ContinuousMDS(n_components=2, init="per-slice", tol=1e-9)
    coords = est.fit_transform(d)
    assert coords.shape == (9, 2)
    rebuilt = euclidean_distances(coords)
    np.testing.assert_allclose(rebuilt, d, atol=1e-5)
    assert est.converged_


def test_tensor_input_keeps_slices():
    data = collapsing_clusters_toy(ClusterToyConfig(n_slices=4, seed=2))
    est = ContinuousMDS(n_components=2, lam=1.0, seed=3, max_outer=10)
    coords = est.fit_transform(data.tensor)
    assert coords.shape == (4, 50, 2)
    assert est.cost_trace_.ndim == 1
    assert (np.diff(est.cost_trace_) <= 1e-10).all()


def test_get_set_params_clone():
    est = ContinuousMDS(n_components=3, lam=2.0, variant="sammon", seed=7)
    params = est.get_params()
    assert params["lam"] == 2.0
    twin = clone(est)
    assert twin.get_params() == params


def test_deterministic_given_seed():
    data = collapsing_clusters_toy(ClusterToyConfig(n_slices=3, seed=1))
    a = ContinuousMDS(n_components=1, init="random", seed=11, max_outer=8).fit_transform(data.tensor)
    b = ContinuousMDS(n_components=1, init="random", seed=11, max_outer=8).fit_transform(data.tensor)
    np.testing.assert_array_equal(a, b)


def test_invalid_params_raise_at_fit():
    d = euclidean_distances(np.random.default_rng(0).standard_normal((5, 2)))
    with pytest.raises(InvalidSettings):
        ContinuousMDS(lam=-1.0).fit(d)
    with pytest.raises(InvalidSettings):
        ContinuousMDS(init="bogus").fit(d)
