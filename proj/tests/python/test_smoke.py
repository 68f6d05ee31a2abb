import numpy as np
import pytest

import gwire


def test_version():
    assert gwire.__version__


def test_sym_eig_reconstructs():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 6))
    a = (a + a.T) / 2
    values, vectors = gwire.sym_eig(a)
    assert np.all(np.diff(values) <= 0)
    np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, a, atol=1e-12)


def test_distances():
    assert gwire.distance({"type": "euclidean", "values": [0, 0]}, {"type": "euclidean", "values": [3, 4]}) == 5.0
    assert gwire.distance({"type": "gaussian_loc", "mu": 1.3, "sigma": 1}, {"type": "gaussian_loc", "mu": 0.1,
                                                                             "sigma": 1}) == pytest.approx(1.2)
    d = gwire.pairwise_distances([1.0, 2.0, 4.0], bound=True)
    np.testing.assert_allclose(d, [[0, 0.5, 0.75], [0.5, 0, 2 / 3], [0.75, 2 / 3, 0]])


def test_kernels_match_numpy():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((40, 3))
    y = x[:, 0] + 0.1 * rng.standard_normal(40)
    xc = x - x.mean(axis=0)
    np.testing.assert_allclose(gwire.sample_covariance(x), xc.T @ xc / 40, atol=1e-12)
    d = np.abs(y[:, None] - y[None, :])
    np.testing.assert_allclose(gwire.wire_kernel(x, d), -(xc.T @ d @ xc) / (40 * 39), atol=1e-12)


def test_fit_example1():
    data = gwire.generate(1, 100, 30, seed=3)
    x = data["x"]
    d = gwire.pairwise_distances(data["responses"], bound=True)
    sigma = gwire.sample_covariance(x)
    lam_hat = gwire.wire_kernel(x, d)
    neighbors, weights = gwire.neighborhoods_from_precision(gwire.precision("sigma1", 30))
    lmax = gwire.lambda_max(lam_hat, "gwire", neighbors, weights)
    fit = gwire.fit(sigma, lam_hat, 0.3 * lmax, "gwire", neighbors, weights, d=1)
    assert fit["active_set"] == list(range(10))
    assert gwire.general_loss(fit["directions"], data["beta"]) < 0.5
    empty = gwire.fit(sigma, lam_hat, lmax, "gwire", neighbors, weights)
    assert empty["active_set"] == []


def test_errors_carry_codes():
    with pytest.raises(gwire.GwireError) as info:
        gwire.sym_inv_sqrt(np.zeros((2, 2)))
    assert info.value.code == "singular-matrix"
    assert info.value.numerical
    with pytest.raises(gwire.GwireError) as info:
        gwire.sample_covariance(np.zeros((1, 3)))
    assert not info.value.numerical


def test_run_scenario():
    report = gwire.run_scenario("example = 3\nn = 100\np = 30\nmethod = gsir\nreplicates = 1\nfolds = 5\n"
                                "grid_size = 5\n")
    assert report["failed"] == 0
    assert len(report["records"]) == 1
