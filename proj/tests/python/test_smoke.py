"""End-to-end sanity checks for the python bindings."""

import numpy as np
import pytest

import emperor


def two_blob_points(n=400, seed=7):
    weights = np.array([0.5, 0.5])
    means = [np.array([-3.0, 0.0]), np.array([3.0, 0.0])]
    covs = [np.eye(2), np.eye(2)]
    return emperor.sample_gmm(weights, means, covs, n, seed)


def test_describe_shapes_and_determinism():
    pts = two_blob_points()
    d1 = emperor.describe(pts, slices=8, components=2, seed=3)
    d2 = emperor.describe(pts, slices=8, components=2, seed=3)

    assert d1.dimension == 2
    assert d1.slice_count == 8
    assert d1.components == 2
    assert d1.directions.shape == (8, 2)
    assert d1.weights.shape == (8, 2)
    assert d1.flatten().shape == (3 * 2 * 8,)
    np.testing.assert_array_equal(d1.flatten(), d2.flatten())

    # Row order of the input must not matter.
    rng = np.random.default_rng(0)
    shuffled = pts[rng.permutation(len(pts))]
    d3 = emperor.describe(shuffled, slices=8, components=2, seed=3)
    np.testing.assert_array_equal(d1.flatten(), d3.flatten())


def test_descriptor_json_round_trip():
    pts = two_blob_points(n=120)
    d = emperor.describe(pts, slices=4, components=2, seed=1)
    back = emperor.Descriptor.from_json(d.to_json())
    np.testing.assert_array_equal(d.flatten(), back.flatten())
    np.testing.assert_array_equal(d.directions, back.directions)


def test_moment_recovery_close_to_truth():
    pts = two_blob_points(n=4000, seed=11)
    d = emperor.describe(pts, slices=16, components=2, seed=5)
    exponents, values, residual = emperor.recover_moments(d, 2)

    assert exponents.shape == (3, 2)
    assert values.shape == (3,)
    assert residual >= 0.0

    # E[x^2] = 9 + 1 = 10 for the +-3 blobs, E[xy] = 0, E[y^2] = 1.
    lookup = {tuple(e): v for e, v in zip(map(tuple, exponents), values)}
    assert lookup[(2, 0)] == pytest.approx(10.0, rel=0.15)
    assert lookup[(1, 1)] == pytest.approx(0.0, abs=0.5)
    assert lookup[(0, 2)] == pytest.approx(1.0, rel=0.35)


def test_exact_moments_and_slices():
    weights = np.array([1.0])
    means = [np.zeros(2)]
    covs = [np.eye(2)]
    exponents, values = emperor.gmm_moments(weights, means, covs, 2)
    lookup = {tuple(e): v for e, v in zip(map(tuple, exponents), values)}
    assert lookup[(2, 0)] == pytest.approx(1.0)
    assert lookup[(1, 1)] == pytest.approx(0.0, abs=1e-15)

    theta = np.array([0.6, 0.8])
    m4 = emperor.sliced_moment(weights, means, covs, theta, 4)
    assert m4 == pytest.approx(3.0)


def test_fit_gmm1d_recovers_two_modes():
    x = np.concatenate([
        np.random.default_rng(1).normal(-10.0, 1.0, 2500),
        np.random.default_rng(2).normal(10.0, 1.0, 2500),
    ])
    fit = emperor.fit_gmm1d(x, components=2, restarts=3, seed=4)
    assert fit["converged"]
    assert sorted(fit["means"]) == pytest.approx([-10.0, 10.0], abs=0.2)
    assert fit["weights"] == pytest.approx([0.5, 0.5], abs=0.05)
    trace = fit["loglik_trace"]
    assert trace[-1] == pytest.approx(fit["final_loglik"])


def test_hankel_and_carleman():
    is_psd, min_eig = emperor.hankel_psd([1.0, 0.0, 1.0, 0.0, 3.0], 2)
    assert is_psd
    bad_psd, bad_eig = emperor.hankel_psd([1.0, 0.0, -1.0], 1)
    assert not bad_psd
    assert bad_eig < 0.0
    assert emperor.carleman_partial_sum([1.0, 3.0], 2) > 1.0


def test_pool_and_directions():
    pts = np.array([[1.0, -2.0], [3.0, 4.0]])
    np.testing.assert_allclose(emperor.pool(pts, "gap"), [2.0, 1.0])
    np.testing.assert_allclose(emperor.pool(pts, "max"), [3.0, 4.0])

    dirs = emperor.directions(3, 5, seed=2)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)


def test_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        emperor.describe(np.zeros((3, 2)), slices=0)
    with pytest.raises(ValueError):
        emperor.pool(np.zeros((2, 2)), "median")
    with pytest.raises(ValueError):
        emperor.hankel_psd([1.0, 0.0], 1)  # needs 2n+1 moments
