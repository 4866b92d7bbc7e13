import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rollcall_pdm.spectral import (
    EPS_NUM,
    build_graph,
    correlation,
    eigendecompose,
    laplacian,
    spherical_affinity,
)

from conftest import random_votes


def charpoly_roots(a):
    """Eigenvalues via the Leibniz expansion of det(A - x I); brute force, n <= 5."""
    n = a.shape[0]
    total = np.polynomial.Polynomial([0.0])
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = np.polynomial.Polynomial([(-1.0) ** inversions])
        for i, j in enumerate(perm):
            term = term * np.polynomial.Polynomial([a[i, j], -1.0 if i == j else 0.0])
        total = total + term
    return np.sort(total.roots().real)


def test_correlation_examples():
    corr, active = correlation([[1, 1, -1], [1, 1, -1], [-1, -1, 1]])
    assert corr[0, 1] == pytest.approx(1.0)
    assert corr[0, 2] == pytest.approx(-1.0)
    corr, _ = correlation([[1, -1, 1, -1], [1, 1, -1, -1]])
    # centered dot product 1 - 1 - 1 + 1 = 0
    assert corr[0, 1] == pytest.approx(0.0, abs=1e-15)


def test_correlation_drops_constant_rows():
    corr, active = correlation([[1, -1, 1], [0, 0, 0], [1, 1, 1], [-1, 1, 1]])
    np.testing.assert_array_equal(active, [0, 3])
    assert corr.shape == (2, 2)


def test_correlation_matches_numpy():
    x = random_votes(12, 30, 1, p_abstain=0.2)
    corr, active = correlation(x)
    np.testing.assert_allclose(corr, np.corrcoef(x[active]), atol=1e-14)


def test_spherical_affinity_values():
    s = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    d, a = spherical_affinity(s, 1.0)
    assert d[0, 1] == pytest.approx(1.0)                  # sin(pi/2)
    assert a[0, 1] == pytest.approx(math.exp(-1))         # 0.3679
    assert d[0, 2] == pytest.approx(math.sqrt(0.5))       # sin(pi/4)
    assert a[0, 2] == pytest.approx(math.exp(-0.5))       # 0.6065
    assert d[0, 0] == 0.0
    assert np.all(np.diag(a) == 0.0)


def test_spherical_affinity_clamps_roundoff():
    d, a = spherical_affinity(np.array([[1 + 1e-15, -1 - 1e-15], [-1 - 1e-15, 1]]))
    assert np.all(np.isfinite(d)) and np.all(np.isfinite(a))


@pytest.mark.parametrize("sigma", [0.0, -1.0])
def test_sigma_must_be_positive(sigma):
    with pytest.raises(ValueError):
        spherical_affinity(np.eye(2), sigma)


def test_laplacian_two_nodes():
    lap, deg = laplacian(np.array([[0.0, 0.3], [0.3, 0.0]]))
    np.testing.assert_allclose(lap, [[1, -1], [-1, 1]])
    vals, vecs = eigendecompose(lap)
    np.testing.assert_allclose(vals, [0, 2], atol=1e-14)
    np.testing.assert_allclose(vecs[:, 1], np.array([1, -1]) / math.sqrt(2))


def test_laplacian_triangle():
    a = np.ones((3, 3)) - np.eye(3)
    vals, _ = eigendecompose(laplacian(0.5 * a)[0])
    np.testing.assert_allclose(vals, [0, 1.5, 1.5], atol=1e-14)


def test_laplacian_isolated_node():
    with pytest.raises(ValueError, match="isolated"):
        laplacian(np.zeros((2, 2)))


def test_null_vector_is_sqrt_degree():
    g = build_graph(random_votes(10, 40, 3))
    v0 = g.eigenvectors[:, 0]
    expected = np.sqrt(g.degree) / np.linalg.norm(np.sqrt(g.degree))
    np.testing.assert_allclose(np.abs(v0), expected, atol=1e-10)
    assert abs(g.eigenvalues[0]) <= EPS_NUM


def test_eigendecompose_identity_and_reconstruction():
    vals, _ = eigendecompose(np.eye(4))
    np.testing.assert_allclose(vals, 1.0)
    g = build_graph(random_votes(15, 50, 4))
    recon = (g.eigenvectors * g.eigenvalues) @ g.eigenvectors.T
    assert np.linalg.norm(recon - g.laplacian) <= 1e-8


def test_eigendecompose_rejects_nonsymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        eigendecompose(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_eigenvector_sign_convention():
    g = build_graph(random_votes(12, 40, 5))
    idx = np.argmax(np.abs(g.eigenvectors), axis=0)
    assert np.all(g.eigenvectors[idx, np.arange(12)] > 0)


def test_degenerate_rows_excluded():
    vals = random_votes(8, 30, 6)
    vals[2] = 0
    vals[5] = 1
    g = build_graph(vals)
    np.testing.assert_array_equal(g.no_signal_rows, [2, 5])
    assert g.laplacian.shape == (6, 6)
    assert np.isnan(g.expand(g.fiedler_vector)[2])


def _check_invariants(vals):
    g = build_graph(vals)
    lap = g.laplacian
    assert np.array_equal(lap, lap.T)
    assert g.eigenvalues[0] <= 1e-8
    assert np.all(g.eigenvalues >= -1e-8)
    assert np.all(np.diff(g.eigenvalues) >= 0)
    resid = lap @ g.eigenvectors - g.eigenvectors * g.eigenvalues
    assert np.abs(resid).max() <= 1e-8
    assert np.allclose(g.eigenvectors.T @ g.eigenvectors, np.eye(lap.shape[0]), atol=1e-8)
    assert np.all(np.diag(g.affinity) == 0.0)
    assert np.allclose(np.diag(g.corr), 1.0)
    assert np.abs(g.corr).max() <= 1 + 1e-8
    return g


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 30), st.integers(5, 80), st.integers(0, 2**31), st.floats(0, 0.3))
def test_spectral_invariants(n, m, seed, p_abs):
    vals = random_votes(n, m, seed, p_abs)
    try:
        _check_invariants(vals)
    except ValueError:
        # every row constant: nothing to build
        assert np.sum(np.ptp(vals, axis=1) > 0) < 2


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_eigenvalues_match_charpoly_oracle(n, seed):
    vals = random_votes(n, 12, seed, 0.2)
    if np.sum(np.ptp(vals, axis=1) > 0) < 2:
        return
    g = build_graph(vals)
    np.testing.assert_allclose(g.eigenvalues, charpoly_roots(g.laplacian), atol=1e-6)


def test_fiedler_equivariant_under_permutation():
    vals = random_votes(20, 60, 8)
    perm = np.random.default_rng(0).permutation(20)
    g, gp = build_graph(vals), build_graph(vals[perm])
    np.testing.assert_allclose(gp.fiedler_vector, g.fiedler_vector[perm], atol=1e-10)
    np.testing.assert_allclose(gp.eigenvalues, g.eigenvalues, atol=1e-12)
