"""Metric MDS by SMACOF and the stress-0.1 dimension estimate."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

STRESS_CUTOFF = 0.1
MAX_DIM = 10


@dataclass
class DimensionEstimate:
    stress_by_dim: list      # (dim, Kruskal stress-1)
    estimated_dim: float     # nan when stress never reaches the cutoff
    above_max: bool
    coords_2d: np.ndarray

    @property
    def label(self) -> str:
        return f">{MAX_DIM}" if self.above_max else f"{self.estimated_dim:.4g}"


def pairwise_distances(approx) -> np.ndarray:
    """Euclidean distances between rows."""
    x = np.asarray(approx, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2-D matrix of row vectors")
    return squareform(pdist(x))


def _check_dissimilarity(dist):
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    if not np.allclose(d, d.T, rtol=0, atol=1e-10 * max(1.0, d.max(initial=0.0))):
        raise ValueError("distance matrix must be symmetric")
    return 0.5 * (d + d.T)


def classical_mds(dist, dim) -> np.ndarray:
    """Torgerson scaling; dimensions beyond the positive spectrum are zero."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    h = np.eye(n) - 1.0 / n
    b = -0.5 * h @ (d ** 2) @ h
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1][:dim]
    vals, vecs = vals[order], vecs[:, order]
    coords = vecs * np.sqrt(np.clip(vals, 0, None))
    if coords.shape[1] < dim:
        coords = np.hstack([coords, np.zeros((n, dim - coords.shape[1]))])
    return coords


def _raw_stress(d_upper, x):
    return float(np.sum((d_upper - pdist(x)) ** 2))


def smacof(dist, init, max_iter=300, rel_tol=1e-7):
    """Unweighted SMACOF from a given start.

    Returns ``(coords, raw_stress, history)``. Raw stress is checked to be
    nonincreasing at every Guttman step.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    d_upper = squareform(d, checks=False)
    x = np.array(init, dtype=float)
    stress = _raw_stress(d_upper, x)
    history = [stress]
    for _ in range(max_iter):
        emb = squareform(pdist(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(emb > 0, d / emb, 0.0)
        b = -ratio
        b[np.diag_indices(n)] = ratio.sum(axis=1)
        x = b @ x / n
        new = _raw_stress(d_upper, x)
        if new > stress * (1 + 1e-9) + 1e-12:
            raise AssertionError(f"SMACOF stress increased: {stress!r} -> {new!r}")
        history.append(new)
        done = stress == 0 or (stress - new) / stress < rel_tol
        stress = new
        if done:
            break
    return x, stress, history


def kruskal_stress(dist, coords) -> float:
    """sqrt(sum (d - delta)^2 / sum d^2) over pairs."""
    d_upper = squareform(np.asarray(dist, dtype=float), checks=False)
    denom = float(np.sum(d_upper ** 2))
    if denom == 0:
        return 0.0
    return math.sqrt(_raw_stress(d_upper, coords) / denom)


def mds_stress(dist, dim, rng_seed=0, restarts=4, warm_start=None, max_iter=300, rel_tol=1e-7):
    """Best-of-``restarts`` SMACOF embedding in ``dim`` dimensions.

    The first start is classical MDS; ``warm_start`` (if given) is the next;
    the rest are seeded random configurations. Returns ``(coords, stress)``
    with Kruskal stress-1.
    """
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dim must be in 1..{MAX_DIM}")
    d = _check_dissimilarity(dist)
    n = d.shape[0]
    rng = np.random.default_rng(rng_seed)
    scale = d.max(initial=0.0) or 1.0
    starts = [classical_mds(d, dim)]
    if warm_start is not None:
        starts.append(np.asarray(warm_start, dtype=float))
    while len(starts) < restarts:
        starts.append(rng.normal(scale=scale, size=(n, dim)))
    best = None
    for start in starts:
        coords, raw, _ = smacof(d, start, max_iter, rel_tol)
        if best is None or raw < best[1]:
            best = (coords, raw)
    return best[0], kruskal_stress(d, best[0])


def interpolate_dimension(stress_by_dim, cutoff=STRESS_CUTOFF):
    """Real-valued dimension where stress first drops to ``cutoff``.

    Linear interpolation between the bracketing integer dimensions. Returns
    ``(estimate, above_max)``; the estimate is nan when no dimension in the
    list reaches the cutoff.
    """
    pts = sorted((int(k), float(s)) for k, s in stress_by_dim)
    if pts[0][1] <= cutoff:
        return float(pts[0][0]), False
    for (d0, s0), (d1, s1) in zip(pts, pts[1:]):
        if s0 > cutoff >= s1:
            return d0 + (d1 - d0) * (s0 - cutoff) / (s0 - s1), False
    return float("nan"), True


def estimate_dimension(dist, rng_seed=0, max_dim=MAX_DIM, restarts=4) -> DimensionEstimate:
    """Stress for dimensions 1..max_dim and the interpolated crossing of 0.1.

    Each dimension also tries the previous solution plus a small random
    extra coordinate as a start, which keeps stress nonincreasing in the
    dimension.
    """
    d = _check_dissimilarity(dist)
    rng = np.random.default_rng(rng_seed)
    seeds = rng.integers(0, 2**32, size=max_dim)
    jitter = 1e-3 * (d.max(initial=0.0) or 1.0)
    curve, coords_2d, prev = [], None, None
    for dim in range(1, max_dim + 1):
        warm = None
        if prev is not None:
            warm = np.hstack([prev, jitter * rng.standard_normal((d.shape[0], 1))])
        coords, stress = mds_stress(d, dim, int(seeds[dim - 1]), restarts, warm)
        curve.append((dim, stress))
        prev = coords
        if dim == 2:
            coords_2d = coords
    if coords_2d is None:
        coords_2d = np.hstack([prev[:, :1], np.zeros((d.shape[0], 1))])
    est, above = interpolate_dimension(curve)
    return DimensionEstimate(curve, est, above, coords_2d)


def write_plot_csv(path, vote_matrix, labels, coords) -> None:
    """Legislator id, party, region, cluster label, x, y."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "party", "region", "cluster", "x", "y"])
        for leg, lab, (x, y) in zip(vote_matrix.legislators, labels, coords[:, :2]):
            w.writerow([leg.id, leg.party, leg.region or "",
                        "" if lab < 0 else int(lab), repr(float(x)), repr(float(y))])
