"""Correlation graph of legislators and its normalized Laplacian spectrum."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

EPS_NUM = 1e-8
# Rows whose standard deviation falls below this carry no correlation signal.
DEGENERATE_STD = 1e-12


@dataclass
class SpectralGraph:
    """Correlation matrix, affinity, Laplacian and full spectrum.

    All matrices are indexed by position in ``active_rows``, the subset of
    input rows that survived degenerate-row exclusion. ``eigenvectors`` holds
    one eigenvector per column, ordered like ``eigenvalues`` (ascending).
    """

    corr: np.ndarray
    distance: np.ndarray
    affinity: np.ndarray
    laplacian: np.ndarray
    degree: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sigma: float
    active_rows: np.ndarray
    n_rows: int

    @property
    def fiedler_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 1]

    @property
    def fiedler_value(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def no_signal_rows(self) -> np.ndarray:
        """Input rows excluded from the graph."""
        mask = np.ones(self.n_rows, dtype=bool)
        mask[self.active_rows] = False
        return np.flatnonzero(mask)

    def expand(self, vec, fill=np.nan) -> np.ndarray:
        """Scatter a per-active-row vector back to all input rows."""
        out = np.full(self.n_rows, fill, dtype=float)
        out[self.active_rows] = vec
        return out


def correlation(rows):
    """Pearson correlation between rows.

    Constant rows have no defined correlation; they are dropped rather than
    divided by zero.

    Returns
    -------
    corr : ndarray, shape (k, k)
        Correlation among the k non-degenerate rows, unit diagonal.
    active : ndarray of int
        Indices of those rows in the input.
    """
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("correlation needs a 2-D array with at least two columns")
    std = x.std(axis=1, ddof=1)
    scale = max(1.0, float(np.abs(x).max(initial=0.0)))
    active = np.flatnonzero(std > DEGENERATE_STD * scale)
    if active.size < x.shape[0]:
        log.info("excluding %d constant rows from correlation", x.shape[0] - active.size)
    z = x[active] - x[active].mean(axis=1, keepdims=True)
    z /= std[active, None]
    corr = z @ z.T / (x.shape[1] - 1)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr, active


def spherical_affinity(corr, sigma=1.0):
    """Spherical distance ``sin(arccos(S)/2)`` and Gaussian affinity with zeroed diagonal."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    s = np.clip(np.asarray(corr, dtype=float), -1.0, 1.0)
    dist = np.sin(np.arccos(s) / 2.0)
    aff = np.exp(-(dist ** 2) / sigma ** 2)
    np.fill_diagonal(aff, 0.0)
    return dist, aff


def laplacian(affinity):
    """Normalized Laplacian ``I - D^-1/2 S1 D^-1/2``.

    Raises ``ValueError`` on a zero column sum; :func:`build_graph` removes
    isolated nodes before calling this.
    """
    a = np.asarray(affinity, dtype=float)
    deg = a.sum(axis=0)
    if np.any(deg <= 0):
        raise ValueError(f"isolated nodes (zero degree): {np.flatnonzero(deg <= 0).tolist()}")
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(a.shape[0]) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    return 0.5 * (lap + lap.T), deg


def _orient(vecs):
    # deterministic sign: the entry of largest magnitude is made positive
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eigendecompose(lap, sym_tol=1e-10):
    """Full symmetric eigendecomposition, ascending, with oriented eigenvectors."""
    lap = np.asarray(lap, dtype=float)
    asym = np.abs(lap - lap.T).max(initial=0.0)
    if asym > sym_tol * max(1.0, np.abs(lap).max(initial=0.0)):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    vals, vecs = scipy.linalg.eigh(lap)
    return vals, _orient(vecs)


def build_graph(rows, sigma=1.0) -> SpectralGraph:
    """Run correlation -> affinity -> Laplacian -> spectrum on the rows of a matrix."""
    rows = np.asarray(rows, dtype=float)
    corr, active = correlation(rows)
    dist, aff = spherical_affinity(corr, sigma)
    deg = aff.sum(axis=0)
    isolated = deg <= 0
    if isolated.any():
        log.warning("excluding %d isolated nodes", int(isolated.sum()))
        keep = ~isolated
        corr, dist, aff, active = corr[keep][:, keep], dist[keep][:, keep], aff[keep][:, keep], active[keep]
    if active.size < 2:
        raise ValueError("fewer than two rows with usable correlation signal")
    lap, deg = laplacian(aff)
    vals, vecs = eigendecompose(lap)
    return SpectralGraph(corr, dist, aff, lap, deg, vals, vecs, float(sigma), active, rows.shape[0])


def fiedler_value(rows, sigma=1.0) -> float:
    """Second-smallest Laplacian eigenvalue only; cheaper than :func:`build_graph`."""
    corr, _ = correlation(rows)
    _, aff = spherical_affinity(corr, sigma)
    keep = aff.sum(axis=0) > 0
    aff = aff[keep][:, keep]
    lap, _ = laplacian(aff)
    vals = scipy.linalg.eigh(lap, eigvals_only=True)
    above = vals[vals > EPS_NUM]
    return float(above[0]) if above.size else float("inf")


def dump_graph_csv(graph: SpectralGraph, directory) -> None:
    """Write S, S1, L and the eigenvalues as CSV files for debugging."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fmt = "%.17g"
    np.savetxt(directory / "corr.csv", graph.corr, delimiter=",", fmt=fmt)
    np.savetxt(directory / "affinity.csv", graph.affinity, delimiter=",", fmt=fmt)
    np.savetxt(directory / "laplacian.csv", graph.laplacian, delimiter=",", fmt=fmt)
    np.savetxt(directory / "eigenvalues.csv", graph.eigenvalues, delimiter=",", fmt=fmt)
    np.savetxt(directory / "active_rows.csv", graph.active_rows, delimiter=",", fmt="%d")
