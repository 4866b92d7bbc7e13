import itertools

import numpy as np
import pytest

from rollcall_pdm.selection import (
    choose_k0,
    cluster,
    column_permuted,
    null_fiedler_values,
    select_k0,
    select_l,
    spectral_embedding,
)
from rollcall_pdm.spectral import build_graph

from conftest import random_votes, two_bloc_values


def test_choose_k0_clear_winner():
    assert choose_k0([(2, 100.0), (3, 80.0), (4, 120.0)]) == 3


def test_choose_k0_tie_window_takes_median():
    curve = [(2, 200.0), (3, 150.0), (4, 100.0), (5, 101.0), (6, 130.0), (7, 103.0)]
    assert choose_k0(curve) == 5


def test_choose_k0_even_tie_takes_lower_median():
    assert choose_k0([(2, 100.0), (3, 101.0), (4, 300.0)]) == 2


def test_choose_k0_shifts_negative_scores():
    # raw -200 vs -195 would be a 2.5% gap; after the shift it is 1 vs 6
    assert choose_k0([(2, -200.0), (3, -195.0)]) == 2


def test_select_k0_two_groups():
    rng = np.random.default_rng(0)
    f = np.concatenate([-0.1 + 0.005 * rng.standard_normal(40), 0.1 + 0.005 * rng.standard_normal(40)])
    assert select_k0(f, rng_seed=0)[0] == 2


def test_select_k0_three_groups():
    rng = np.random.default_rng(1)
    f = np.concatenate([c + 0.005 * rng.standard_normal(40) for c in (-0.2, 0.0, 0.2)])
    assert select_k0(f, rng_seed=0)[0] == 3


def test_select_k0_needs_points():
    with pytest.raises(ValueError):
        select_k0([0.1, 0.2, 0.3], 0)


def test_column_permutation_keeps_column_multisets():
    x = random_votes(10, 20, 0, 0.2).astype(float)
    p = column_permuted(x, np.random.default_rng(0))
    np.testing.assert_array_equal(np.sort(p, axis=0), np.sort(x, axis=0))


def test_null_default_reps():
    assert null_fiedler_values(random_votes(10, 30, 0)).shape == (25,)


def test_select_l_polarized():
    vals, _ = two_bloc_values()
    vals = vals.astype(float)
    rng = np.random.default_rng(3)
    flip = rng.random(vals.shape) < 0.1
    vals[flip] *= -1
    g = build_graph(vals)
    l, threshold, nulls = select_l(g.eigenvalues, vals, rng_seed=0)
    assert l >= 1
    assert threshold == nulls.min()


def test_select_l_random_is_zero():
    zeros = 0
    for t in range(50):
        vals = random_votes(30, 80, 1000 + t)
        g = build_graph(vals)
        zeros += select_l(g.eigenvalues, vals, rng_seed=t)[0] == 0
    assert zeros >= 45


def _brute_two_partition(x):
    best = np.inf
    n = len(x)
    for mask in itertools.product([0, 1], repeat=n - 1):
        lab = np.array((0,) + mask)
        if lab.min() == lab.max():
            continue
        cost = sum(((x[lab == c] - x[lab == c].mean(axis=0)) ** 2).sum() for c in (0, 1))
        best = min(best, cost)
    return best


@pytest.mark.parametrize("seed", range(5))
def test_kmeans_matches_brute_force(seed):
    x = np.random.default_rng(seed).standard_normal((8, 2))
    res = cluster(x, 2, rng_seed=seed)
    assert res.inertia == pytest.approx(_brute_two_partition(x), rel=1e-9)


def test_cluster_identical_points():
    with pytest.raises(ValueError, match="distinct"):
        cluster(np.zeros((5, 1)), 2)


def test_cluster_k0_bounds():
    with pytest.raises(ValueError):
        cluster(np.arange(3.0), 1)
    with pytest.raises(ValueError):
        cluster(np.arange(3.0), 4)


def test_antipodal_blocs_recovered_and_labels_by_appearance():
    vals, bloc = two_bloc_values()
    g = build_graph(vals)
    res = cluster(spectral_embedding(g.eigenvectors, 1), 2, rng_seed=0)
    np.testing.assert_array_equal(res.assignment, (bloc < 0).astype(int))


def test_cluster_deterministic():
    x = np.random.default_rng(0).standard_normal((40, 3))
    a, b = cluster(x, 4, rng_seed=7), cluster(x, 4, rng_seed=7)
    np.testing.assert_array_equal(a.assignment, b.assignment)
    np.testing.assert_array_equal(a.centroids, b.centroids)
