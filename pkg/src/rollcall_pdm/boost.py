"""Votes that separate clusters, found by AdaBoost over single-vote stumps."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

# midpoints of the ordered vote alphabet {-1, 0, +1}
THRESHOLDS = (-0.5, 0.5)
ALPHA_CAP = 0.5 * math.log(1e8)
_TIE_TOL = 1e-12


@dataclass
class BoostResult:
    """Outcome of one two-cluster boosting run.

    ``ranked`` lists ``(vote_id, aggregate_weight, rounds_selected)`` by
    descending weight, ties in column order. ``stumps`` holds the
    ``(column, threshold, polarity)`` chosen each round.
    """

    ranked: list
    errors: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    stumps: list = field(default_factory=list)
    training_error: float = 1.0
    diagnostic: str = ""

    @property
    def error_bound(self) -> float:
        # product of the per-round normalizers; equals prod 2*sqrt(e(1-e)) for uncapped rounds
        z = [(1 - e) * math.exp(-a) + e * math.exp(a) for e, a in zip(self.errors, self.alphas)]
        return float(np.prod(z)) if z else 1.0


def adaboost_pair(values, members_a, members_b, rounds=50, vote_ids=None) -> BoostResult:
    """Discrete AdaBoost separating cluster A (+1) from cluster B (-1).

    A stump predicts ``polarity * (+1 if x > threshold else -1)`` from one
    vote column.
    """
    values = np.asarray(getattr(values, "values", values))
    if vote_ids is None:
        vote_ids = [str(j) for j in range(values.shape[1])]
    a = np.asarray(list(members_a), dtype=int)
    b = np.asarray(list(members_b), dtype=int)
    if a.size == 0 or b.size == 0:
        raise ValueError("both clusters must be nonempty")
    if np.intersect1d(a, b).size:
        raise ValueError("clusters must be disjoint")
    if rounds < 1:
        raise ValueError("rounds must be at least 1")

    x = values[np.concatenate([a, b])].astype(float)
    y = np.concatenate([np.ones(a.size), -np.ones(b.size)])
    n_samples, m = x.shape
    # signs[t] is the +1-polarity prediction of every column at threshold t
    signs = np.stack([np.where(x > t, 1.0, -1.0) for t in THRESHOLDS])
    wrong = signs != y[None, :, None]

    w = np.full(n_samples, 1.0 / n_samples)
    score = np.zeros(n_samples)
    result = BoostResult([])
    for _ in range(rounds):
        err_pos = np.einsum("i,tij->jt", w, wrong)   # (m, thresholds)
        errs = np.stack([err_pos, 1.0 - err_pos], axis=-1).reshape(-1)
        best = int(np.flatnonzero(errs <= errs.min() + _TIE_TOL)[0])
        eps = float(max(errs[best], 0.0))
        col, rest = divmod(best, 2 * len(THRESHOLDS))
        t_idx, pol_idx = divmod(rest, 2)
        polarity = 1.0 if pol_idx == 0 else -1.0
        if eps >= 0.5 - _TIE_TOL:
            result.diagnostic = "inseparable"
            log.info("boosting halted: no stump beats chance")
            break
        perfect = eps <= _TIE_TOL
        alpha = ALPHA_CAP if perfect else 0.5 * math.log((1 - eps) / eps)
        h = polarity * signs[t_idx, :, col]
        score += alpha * h
        result.errors.append(0.0 if perfect else eps)
        result.alphas.append(alpha)
        result.stumps.append((col, THRESHOLDS[t_idx], int(polarity)))
        if perfect:
            result.diagnostic = "perfect separation"
            break
        w = w * np.exp(-alpha * y * h)
        w /= w.sum()

    result.training_error = float(np.mean(np.sign(score) != y))
    weight = np.zeros(m)
    count = np.zeros(m, dtype=int)
    for (col, _, _), alpha in zip(result.stumps, result.alphas):
        weight[col] += alpha
        count[col] += 1
    chosen = np.flatnonzero(count)
    order = sorted(chosen, key=lambda j: (-weight[j], j))
    result.ranked = [(vote_ids[j], float(weight[j]), int(count[j])) for j in order]
    return result


@dataclass
class SeparatingVotes:
    pairs: list          # (label_a, label_b, BoostResult)
    selected: list       # vote ids, in column order
    clusters: list       # cluster labels, table row order
    yea_table: np.ndarray  # clusters x selected votes, integer percent or nan

    def to_dict(self) -> dict:
        return {
            "pairs": [
                {
                    "clusters": [int(la), int(lb)],
                    "votes": [{"vote_id": v, "weight": wt, "rounds": r} for v, wt, r in res.ranked],
                    "training_error": res.training_error,
                    "error_bound": res.error_bound,
                    "diagnostic": res.diagnostic,
                }
                for la, lb, res in self.pairs
            ],
            "selected_votes": list(self.selected),
            "clusters": [int(c) for c in self.clusters],
            "yea_percent": [
                [None if np.isnan(x) else int(x) for x in row] for row in self.yea_table
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    def write_table_csv(self, path) -> None:
        """Votes as rows, clusters as columns, integer yea percentages."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["vote_id"] + [f"cluster_{c}" for c in self.clusters])
            for j, vid in enumerate(self.selected):
                col = self.yea_table[:, j]
                w.writerow([vid] + ["" if np.isnan(x) else int(x) for x in col])


def yea_percentages(values, labels, clusters, columns) -> np.ndarray:
    """Percent yea among members casting yea or nay, rounded half up."""
    values = np.asarray(values)
    labels = np.asarray(labels)
    table = np.full((len(clusters), len(columns)), np.nan)
    for r, c in enumerate(clusters):
        sub = values[labels == c][:, columns]
        yea = (sub == 1).sum(axis=0)
        cast = (sub != 0).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            pct = np.floor(100.0 * yea / cast + 0.5)
        table[r] = np.where(cast > 0, pct, np.nan)
    return table


def explain_clusters(v, labels, rounds=50, top_k=10) -> SeparatingVotes:
    """One-vs-one boosting over every cluster pair plus the yea-percentage table.

    ``labels`` gives each legislator's cluster; negative labels are ignored.
    """
    values = np.asarray(v.values)
    vote_ids = list(v.vote_ids)
    labels = np.asarray(labels)
    clusters = sorted(int(c) for c in np.unique(labels[labels >= 0]))
    if len(clusters) < 2:
        raise ValueError("need at least two clusters to explain")
    for c in clusters:
        if np.sum(labels == c) == 1:
            log.warning("cluster %d has a single member; separating votes are anecdotal", c)
    pairs, chosen = [], set()
    col_of = {vid: j for j, vid in enumerate(vote_ids)}
    for ca, cb in itertools.combinations(clusters, 2):
        res = adaboost_pair(values, np.flatnonzero(labels == ca), np.flatnonzero(labels == cb),
                            rounds, vote_ids)
        pairs.append((ca, cb, res))
        chosen.update(col_of[vid] for vid, _, _ in res.ranked[:top_k])
    columns = sorted(chosen)
    table = yea_percentages(values, labels, clusters, columns)
    return SeparatingVotes(pairs, [vote_ids[j] for j in columns], clusters, table)
