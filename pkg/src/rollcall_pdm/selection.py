"""Unsupervised choice of cluster count and embedding dimension, then k-means.

The cluster count comes from Gaussian mixture fits to the Fiedler vector's
values; the embedding dimension counts Laplacian eigenvalues that beat the
smallest Fiedler value seen in column-permuted null matrices.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from sklearn.mixture import GaussianMixture

from .spectral import EPS_NUM, fiedler_value

log = logging.getLogger(__name__)


@dataclass
class ClusterParams:
    k0: int
    l: int
    aic_curve: list
    null_fiedler_min: float
    null_reps: int = 25
    null_fiedler_values: list = field(default_factory=list)
    criterion: str = "aic"


@dataclass
class Clustering:
    """k-means result in the spectral embedding.

    ``assignment[i]`` labels ``rows[i]``, a row index into the layer's data
    matrix. Labels run over 0..k0-1, numbered by first appearance.
    """

    assignment: np.ndarray
    centroids: np.ndarray
    embedding: np.ndarray
    rows: np.ndarray
    inertia: float = float("nan")

    @property
    def k0(self) -> int:
        return int(self.centroids.shape[0])

    def members(self, label) -> np.ndarray:
        return self.rows[self.assignment == label]


def mixture_scores(values, seed, counts=range(2, 21), criterion="aic", n_init=3):
    """Information criterion of 1-D Gaussian mixtures for each component count.

    Counts whose fit fails, or that exceed the number of points, are skipped.
    Returns a list of ``(count, score)``.
    """
    x = np.asarray(values, dtype=float).reshape(-1, 1)
    n = x.shape[0]
    curve = []
    for c in counts:
        if c > n:
            log.debug("skipping %d components for %d points", c, n)
            continue
        gm = GaussianMixture(
            n_components=c, covariance_type="full", init_params="kmeans",
            n_init=n_init, random_state=seed,
        )
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                gm.fit(x)
        except (ValueError, np.linalg.LinAlgError) as exc:
            log.warning("mixture fit with %d components failed: %s", c, exc)
            continue
        loglik = gm.score(x) * n
        if not np.isfinite(loglik):
            log.warning("mixture fit with %d components gave non-finite likelihood", c)
            continue
        n_params = 3 * c - 1
        if criterion == "aic":
            score = 2 * n_params - 2 * loglik
        elif criterion == "bic":
            score = n_params * np.log(n) - 2 * loglik
        else:
            raise ValueError(f"unknown criterion {criterion!r}")
        curve.append((c, float(score)))
    if not curve:
        raise RuntimeError("every Gaussian mixture fit failed")
    return curve


def choose_k0(curve, window=0.05) -> int:
    """Apply the minimum-with-tie-window rule to a ``(count, score)`` curve.

    A clear winner must be at least ``window`` smaller than its nearest
    competitor; otherwise the (lower) median count among all scores within
    the window of the minimum is returned. Curves with non-positive scores
    are shifted so the minimum sits at 1 before comparing.
    """
    counts = np.array([c for c, _ in curve])
    scores = np.array([s for _, s in curve], dtype=float)
    if scores.min() <= 0:
        scores = scores - (scores.min() - 1.0)
    best = int(np.argmin(scores))
    if len(scores) == 1:
        return int(counts[best])
    within = scores * (1.0 - window) <= scores[best]
    if within.sum() == 1:
        return int(counts[best])
    tied = np.sort(counts[within])
    return int(tied[(len(tied) - 1) // 2])


def select_k0(fiedler, rng_seed, counts=range(2, 21), window=0.05, criterion="aic", n_init=3):
    """Pick the cluster count from the Fiedler vector.

    Returns ``(k0, curve)``.
    """
    fiedler = np.asarray(fiedler, dtype=float)
    if fiedler.size < 4:
        raise ValueError("need at least 4 values to choose a cluster count")
    curve = mixture_scores(fiedler, rng_seed, counts, criterion, n_init)
    return choose_k0(curve, window), curve


def column_permuted(data, rng) -> np.ndarray:
    """Shuffle every column independently, keeping each column's multiset of values."""
    return rng.permuted(np.asarray(data, dtype=float), axis=0)


def null_fiedler_values(data, null_reps=25, rng_seed=0, sigma=1.0) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    return np.array([fiedler_value(column_permuted(data, rng), sigma) for _ in range(null_reps)])


def select_l(eigenvalues, data, null_reps=25, rng_seed=0, sigma=1.0):
    """Count eigenvalues that are nonzero and below every null Fiedler value.

    Parameters
    ----------
    eigenvalues : array_like
        Ascending Laplacian spectrum of ``data``'s rows.
    data : array_like or VoteMatrix
        The rows the spectrum was built from.

    Returns
    -------
    l : int
    threshold : float
        Minimum Fiedler value over the null matrices.
    nulls : ndarray
        Each null's Fiedler value.
    """
    if hasattr(data, "as_float"):
        data = data.as_float()
    nulls = null_fiedler_values(data, null_reps, rng_seed, sigma)
    threshold = float(nulls.min())
    ev = np.asarray(eigenvalues, dtype=float)
    l = int(np.count_nonzero((ev > EPS_NUM) & (ev < threshold)))
    return l, threshold, nulls


def spectral_embedding(eigenvectors, l, row_normalize=False) -> np.ndarray:
    emb = np.asarray(eigenvectors, dtype=float)[:, 1 : l + 1].copy()
    if row_normalize:
        norms = np.linalg.norm(emb, axis=1, keepdims=True)
        emb = emb / np.where(norms > 0, norms, 1.0)
    return emb


def cluster(embedding, k0, rng_seed=0, restarts=20, rows=None) -> Clustering:
    """k-means (k-means++ seeding, best of ``restarts``) on embedding rows."""
    x = np.asarray(embedding, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[1] < 1:
        raise ValueError("embedding dimension must be at least 1")
    if k0 < 2:
        raise ValueError("k0 must be at least 2")
    if k0 > x.shape[0]:
        raise ValueError(f"k0={k0} exceeds the {x.shape[0]} points available")
    if np.unique(x, axis=0).shape[0] < k0:
        raise ValueError(f"fewer than k0={k0} distinct points; cannot form nonempty clusters")
    km = KMeans(n_clusters=k0, init="k-means++", n_init=restarts, random_state=rng_seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        labels = km.fit_predict(x)
    if np.unique(labels).size != k0:
        raise RuntimeError("k-means produced an empty cluster in every restart")
    # relabel by first appearance so labels do not depend on solver internals
    order = list(dict.fromkeys(labels.tolist()))
    remap = np.empty(k0, dtype=int)
    remap[order] = np.arange(k0)
    assignment = remap[labels]
    centroids = km.cluster_centers_[order]
    rows = np.arange(x.shape[0]) if rows is None else np.asarray(rows)
    return Clustering(assignment, centroids, x, rows, float(km.inertia_))
