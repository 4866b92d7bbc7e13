import json

import numpy as np
import pytest

from rollcall_pdm.data import from_array
from rollcall_pdm.engine import (
    IllConditionedMotivations,
    PDMConfig,
    decompose,
    load_decomposition,
    motivations_from_clusters,
    project,
    residual_is_random,
)
from rollcall_pdm.selection import Clustering

from conftest import planted_two_factor, random_votes, two_bloc_values


def _clustering(labels):
    labels = np.asarray(labels)
    k = labels.max() + 1
    return Clustering(labels, np.zeros((k, 1)), np.zeros((labels.size, 1)), np.arange(labels.size))


def test_motivation_is_normalized_cluster_mean():
    data = np.array([[1, 1, 0, 0], [1, 0, 0, 0], [0, 0, -1, -1]], dtype=float)
    mots, diag = motivations_from_clusters(data, _clustering([0, 0, 1]))
    np.testing.assert_allclose(mots[0].vector, np.array([2, 1, 0, 0]) / np.sqrt(5))
    np.testing.assert_allclose(mots[1].vector, np.array([0, 0, -1, -1]) / np.sqrt(2))
    assert diag == []


def test_zero_mean_cluster_yields_no_motivation():
    data = np.array([[1, -1], [-1, 1], [1, 1]], dtype=float)
    mots, diag = motivations_from_clusters(data, _clustering([0, 0, 1]))
    assert [m.source_cluster for m in mots] == [1]
    assert "zero mean" in diag[0]


def test_project_examples():
    p = np.array([1.0, 0, 0])
    w, approx = project([2.0, 0, 0], [p])
    np.testing.assert_allclose(w, [2.0])
    w, approx = project([0.0, 5, 0], [p])
    np.testing.assert_allclose(w, [0.0])
    np.testing.assert_allclose(approx, 0.0)
    w, _ = project([3.0, -4, 7], [p, [0.0, 1, 0]])
    np.testing.assert_allclose(w, [3.0, -4.0])


def test_project_nonorthogonal_is_least_squares():
    rng = np.random.default_rng(0)
    mots = rng.standard_normal((3, 10))
    x = rng.standard_normal((5, 10))
    w, approx = project(x, mots)
    np.testing.assert_allclose(w, np.linalg.lstsq(mots.T, x.T, rcond=None)[0].T, atol=1e-10)
    np.testing.assert_allclose((x - approx) @ mots.T, 0.0, atol=1e-10)


def test_project_ill_conditioned():
    p = np.array([1.0, 1.0]) / np.sqrt(2)
    with pytest.raises(IllConditionedMotivations):
        project([1.0, 0.0], [p, -p])
    w, approx = project([1.0, 1.0], [p, -p], allow_rank_deficient=True)
    np.testing.assert_allclose(approx, [1.0, 1.0])


def test_residual_is_random_on_noise():
    hits = sum(residual_is_random(random_votes(30, 80, 500 + t).astype(float), rng_seed=t)
               for t in range(50))
    assert hits >= 45


def test_residual_is_random_detects_blocs():
    vals, _ = two_bloc_values()
    noisy = vals * np.where(np.random.default_rng(0).random(vals.shape) < 0.1, -1, 1)
    assert not residual_is_random(noisy.astype(float))


def test_zero_residual_is_random():
    assert residual_is_random(np.zeros((5, 5)))


def test_polarized_single_layer(two_bloc):
    v, _ = two_bloc
    d = decompose(v)
    assert len(d.layers) == 1
    assert d.layers[0].k0 == 2
    assert d.stop_reason == "residual_random"
    np.testing.assert_allclose(d.residual, 0.0, atol=1e-10)


def test_max_layers_one():
    vals, _, _ = planted_two_factor(1)
    d = decompose(vals, max_layers=1)
    assert len(d.layers) == 1
    assert d.stop_reason in ("max_layers", "residual_random")


def test_random_matrix_has_no_layers():
    d = decompose(random_votes(30, 80, 3))
    assert d.layers == [] and d.stop_reason == "no_significant_dims"
    np.testing.assert_array_equal(d.residual, d.data)


@pytest.fixture(scope="module")
def planted():
    vals, party, region = planted_two_factor(2)
    return from_array(vals), decompose(from_array(vals))


def test_telescoping_and_orthogonality(planted):
    v, d = planted
    total = sum(layer.approximation for layer in d.layers) + d.residual
    assert np.abs(total - d.data).max() <= 1e-8
    current = d.data.copy()
    for layer in d.layers:
        rows = layer.clustering.rows
        resid = current - layer.approximation
        # every fitted row is orthogonal to its layer's motivations
        assert np.abs(resid[rows] @ layer.motivation_matrix.T).max() <= 1e-8
        assert np.linalg.matrix_rank(layer.approximation) <= layer.k0
        current = resid


def test_layer_projection_is_idempotent(planted):
    _, d = planted
    layer = d.layers[0]
    _, again = project(layer.approximation, layer.motivations)
    np.testing.assert_allclose(again, layer.approximation, atol=1e-8)


def test_decompose_deterministic(planted):
    v, d = planted
    d2 = decompose(v)
    assert d.to_dict() == d2.to_dict()


def test_different_seed_same_shape(planted):
    v, d = planted
    d2 = decompose(v, config=PDMConfig(seed=5))
    assert len(d2.layers) >= 1


def test_json_roundtrip(planted, tmp_path):
    v, d = planted
    path = tmp_path / "d.json"
    d.to_json(path)
    doc = load_decomposition(path)
    assert doc["schema_version"] == 1
    assert doc["stop_reason"] == d.stop_reason
    for stored, layer in zip(doc["approximations"], d.layers):
        np.testing.assert_allclose(stored, layer.approximation, atol=1e-12)
    json.loads(path.read_text())


def test_decompose_rejects_bad_args():
    with pytest.raises(ValueError):
        decompose(np.ones((1, 3)))
    with pytest.raises(ValueError):
        decompose(random_votes(5, 5, 0), max_layers=0)
