"""Layered decomposition of a roll call matrix into cluster motivations.

Each layer clusters the current data (the vote matrix, then successive
residuals) in a spectral embedding, takes the normalized cluster means as
motivations, projects every row onto their span and subtracts. The loop
stops when the residual's correlation structure cannot be told apart from a
column-shuffled copy of itself.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .data import VoteMatrix
from .selection import (
    ClusterParams,
    Clustering,
    cluster,
    column_permuted,
    select_k0,
    select_l,
    spectral_embedding,
)
from .spectral import SpectralGraph, build_graph

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ZERO_TOL = 1e-9


class IllConditionedMotivations(ValueError):
    """Motivations are (nearly) linearly dependent."""


@dataclass
class PDMConfig:
    sigma: float = 1.0
    null_reps: int = 25
    gmm_counts: tuple = (2, 20)
    aic_tie_window: float = 0.05
    criterion: str = "aic"
    gmm_n_init: int = 3
    kmeans_restarts: int = 20
    row_normalize: bool = False
    # rows of a later-layer residual whose norm is below this percentile of
    # column-permuted null row norms are left out of that layer's clustering
    null_row_percentile: float = 5.0
    allow_rank_deficient: bool = True
    seed: int = 0


@dataclass
class Motivation:
    vector: np.ndarray
    source_cluster: int
    layer: int


@dataclass
class LayerModel:
    layer_index: int
    clustering: Clustering
    motivations: list
    weights: np.ndarray
    approximation: np.ndarray
    params: ClusterParams
    graph: SpectralGraph
    rows_considered: np.ndarray
    diagnostics: list = field(default_factory=list)

    @property
    def k0(self) -> int:
        return self.params.k0

    @property
    def motivation_matrix(self) -> np.ndarray:
        return np.array([mot.vector for mot in self.motivations])

    def labels(self, n) -> np.ndarray:
        """Cluster label per legislator, -1 where the legislator was not clustered."""
        out = np.full(n, -1, dtype=int)
        out[self.clustering.rows] = self.clustering.assignment
        return out


@dataclass
class Decomposition:
    layers: list
    residual: np.ndarray
    stop_reason: str
    data: np.ndarray
    config: PDMConfig
    vote_matrix: Optional[VoteMatrix] = None
    diagnostics: list = field(default_factory=list)

    def approximation(self, n_layers=None) -> np.ndarray:
        """Sum of the first ``n_layers`` layer approximations (all by default)."""
        total = np.zeros_like(self.data)
        for layer in self.layers[:n_layers]:
            total = total + layer.approximation
        return total

    def to_dict(self) -> dict:
        v = self.vote_matrix
        ids = v.ids if v is not None else [str(i) for i in range(self.data.shape[0])]
        vote_ids = list(v.vote_ids) if v is not None else [str(j) for j in range(self.data.shape[1])]
        layers = []
        for layer in self.layers:
            labels = layer.labels(self.data.shape[0])
            layers.append({
                "layer": layer.layer_index,
                "k0": layer.params.k0,
                "l": layer.params.l,
                "aic_curve": [[c, s] for c, s in layer.params.aic_curve],
                "criterion": layer.params.criterion,
                "null_fiedler_min": layer.params.null_fiedler_min,
                "null_fiedler_values": [float(x) for x in layer.params.null_fiedler_values],
                "eigenvalues": layer.graph.eigenvalues.tolist(),
                "fiedler_vector": _nan_to_none(layer.graph.expand(layer.graph.fiedler_vector)),
                "assignments": {i: (int(lab) if lab >= 0 else None) for i, lab in zip(ids, labels)},
                "motivations": [
                    {"cluster": mot.source_cluster, "vector": mot.vector.tolist()}
                    for mot in layer.motivations
                ],
                "weights": layer.weights.tolist(),
                "diagnostics": list(layer.diagnostics),
            })
        r = self.residual
        return {
            "schema_version": SCHEMA_VERSION,
            "legislator_ids": ids,
            "vote_ids": vote_ids,
            "config": _config_dict(self.config),
            "layers": layers,
            "stop_reason": self.stop_reason,
            "residual": {
                "frobenius_norm": float(np.linalg.norm(r)),
                "max_abs": float(np.abs(r).max(initial=0.0)),
                "mean_abs": float(np.abs(r).mean()) if r.size else 0.0,
                "row_norms": np.linalg.norm(r, axis=1).tolist(),
            },
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def _nan_to_none(arr):
    return [None if np.isnan(x) else float(x) for x in arr]


def _config_dict(config):
    d = asdict(config)
    d["gmm_counts"] = list(d["gmm_counts"])
    return d


def load_decomposition(path) -> dict:
    """Read a decomposition JSON and rebuild each layer's approximation matrix.

    The returned dict is the stored document plus ``"approximations"``, a list
    of n x m arrays (weights times motivations, one per layer).
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported decomposition schema {doc.get('schema_version')!r}")
    n, m = len(doc["legislator_ids"]), len(doc["vote_ids"])
    approx = []
    for layer in doc["layers"]:
        w = np.array(layer["weights"], dtype=float).reshape(n, -1)
        mots = np.array([mot["vector"] for mot in layer["motivations"]], dtype=float).reshape(-1, m)
        approx.append(w @ mots)
    doc["approximations"] = approx
    return doc


def _subseed(seed, *keys) -> int:
    return int(np.random.SeedSequence([int(seed), *keys]).generate_state(1)[0])


def motivations_from_clusters(data, clustering: Clustering, layer=1):
    """Normalized cluster means of the data rows.

    A cluster whose mean vanishes yields no motivation. Returns the list of
    motivations and a list of diagnostic strings.
    """
    data = np.asarray(data, dtype=float)
    motivations, diagnostics = [], []
    for label in range(clustering.k0):
        members = clustering.members(label)
        if members.size == 0:
            raise ValueError(f"cluster {label} is empty")
        centroid = data[members].mean(axis=0)
        norm = np.linalg.norm(centroid)
        if norm <= ZERO_TOL:
            msg = f"layer {layer}: cluster {label} has a zero mean vote vector; no motivation"
            log.warning(msg)
            diagnostics.append(msg)
            continue
        motivations.append(Motivation(centroid / norm, label, layer))
    return motivations, diagnostics


def project(rows, motivations, cond_max=1e8, allow_rank_deficient=False):
    """Least-squares coefficients of rows in the span of the motivations.

    Parameters
    ----------
    rows : array_like, shape (m,) or (n, m)
    motivations : sequence of Motivation or array_like, shape (k, m)
    cond_max : float
        Largest acceptable condition number of the Gram matrix.
    allow_rank_deficient : bool
        If true, a badly conditioned Gram matrix falls back to the
        minimum-norm solution instead of raising.

    Returns
    -------
    weights : ndarray, shape (k,) or (n, k)
    approx : ndarray, same shape as ``rows``
    """
    mots = np.array([getattr(mot, "vector", mot) for mot in motivations], dtype=float)
    x = np.asarray(rows, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if mots.size == 0:
        w = np.zeros((x.shape[0], 0))
        approx = np.zeros_like(x)
    else:
        gram = mots @ mots.T
        if np.linalg.cond(gram) > cond_max:
            if not allow_rank_deficient:
                raise IllConditionedMotivations(
                    "motivations are nearly linearly dependent "
                    f"(Gram condition number > {cond_max:g}); adjust the clustering parameters"
                )
            w = np.linalg.lstsq(mots.T, x.T, rcond=None)[0].T
        else:
            w = np.linalg.solve(gram, mots @ x.T).T
        approx = w @ mots
    if single:
        return w[0], approx[0]
    return w, approx


def null_row_mask(residual, null_reps=25, rng_seed=0, percentile=5.0) -> np.ndarray:
    """True for rows whose norm reaches the given percentile of null row norms."""
    residual = np.asarray(residual, dtype=float)
    rng = np.random.default_rng(rng_seed)
    null_norms = np.concatenate([
        np.linalg.norm(column_permuted(residual, rng), axis=1) for _ in range(null_reps)
    ])
    cutoff = np.percentile(null_norms, percentile)
    return np.linalg.norm(residual, axis=1) >= cutoff


def residual_is_random(residual, null_reps=25, rng_seed=0, sigma=1.0) -> bool:
    """True when the residual shows no eigenvalue below the null Fiedler floor."""
    residual = np.asarray(residual, dtype=float)
    if np.abs(residual).max(initial=0.0) <= ZERO_TOL:
        return True
    try:
        graph = build_graph(residual, sigma)
    except ValueError:
        return True
    if graph.active_rows.size < 4:
        return True
    l, _, _ = select_l(graph.eigenvalues, residual[graph.active_rows], null_reps, rng_seed, sigma)
    return l == 0


def decompose(v, max_layers=2, config: Optional[PDMConfig] = None) -> Decomposition:
    """Run the layered decomposition on a (filtered) vote matrix.

    ``v`` may be a VoteMatrix or a plain n x m array. The result always
    satisfies ``data == sum(layer approximations) + residual`` up to roundoff.
    """
    if max_layers < 1:
        raise ValueError("max_layers must be at least 1")
    config = config or PDMConfig()
    vote_matrix = v if isinstance(v, VoteMatrix) else None
    data = v.as_float() if vote_matrix is not None else np.asarray(v, dtype=float)
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise ValueError("need at least 2 legislators and 2 votes")
    n = data.shape[0]

    current = data.copy()
    layers, diagnostics = [], []
    stop_reason = "max_layers"
    for layer_idx in range(1, max_layers + 1):
        seed = lambda tag: _subseed(config.seed, layer_idx, tag)  # noqa: E731

        rows = np.arange(n)
        if layer_idx > 1:
            keep = null_row_mask(current, config.null_reps, seed(0), config.null_row_percentile)
            rows = np.flatnonzero(keep)
            diagnostics.append(
                f"layer {layer_idx}: {n - rows.size} rows indistinguishable from the null, not clustered"
            )
        try:
            graph = build_graph(current[rows], config.sigma)
        except ValueError as exc:
            diagnostics.append(f"layer {layer_idx}: {exc}")
            stop_reason = "no_significant_dims"
            break
        active = rows[graph.active_rows]
        if active.size < 4:
            diagnostics.append(f"layer {layer_idx}: only {active.size} rows carry signal")
            stop_reason = "no_significant_dims"
            break

        l, threshold, nulls = select_l(
            graph.eigenvalues, current[active], config.null_reps, seed(1), config.sigma
        )
        if l == 0:
            diagnostics.append(f"layer {layer_idx}: no eigenvalue below null floor {threshold:.6g}")
            stop_reason = "no_significant_dims"
            break
        lo, hi = config.gmm_counts
        k0, curve = select_k0(
            graph.fiedler_vector, seed(2), range(lo, hi + 1), config.aic_tie_window,
            config.criterion, config.gmm_n_init,
        )
        params = ClusterParams(k0, l, curve, threshold, config.null_reps, nulls.tolist(), config.criterion)

        emb = spectral_embedding(graph.eigenvectors, l, config.row_normalize)
        clustering = cluster(emb, k0, seed(3), config.kmeans_restarts, rows=active)
        motivations, layer_diag = motivations_from_clusters(current, clustering, layer_idx)

        weights = np.zeros((n, len(motivations)))
        try:
            weights[active], _ = project(current[active], motivations)
        except IllConditionedMotivations as exc:
            if not config.allow_rank_deficient:
                raise
            layer_diag.append(f"layer {layer_idx}: {exc}; using minimum-norm least squares")
            weights[active], _ = project(current[active], motivations, allow_rank_deficient=True)
        mot_matrix = np.array([mot.vector for mot in motivations]).reshape(-1, data.shape[1])
        approx = weights @ mot_matrix
        current = current - approx
        layers.append(LayerModel(
            layer_idx, clustering, motivations, weights, approx, params, graph, rows, layer_diag,
        ))
        log.info("layer %d: k0=%d l=%d", layer_idx, k0, l)

        if residual_is_random(current, config.null_reps, seed(4), config.sigma):
            stop_reason = "residual_random"
            break

    return Decomposition(layers, current, stop_reason, data, config, vote_matrix, diagnostics)
