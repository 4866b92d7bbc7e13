"""Sign prediction of votes and its scoring against the minority and random baselines."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class EvalReport:
    model_name: str
    percent_correct: float
    apre: Optional[float]
    n_cast: int
    per_vote_errors: dict = field(default_factory=dict)
    percent_correct_min: Optional[float] = None
    percent_correct_max: Optional[float] = None
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _values(v):
    return np.asarray(getattr(v, "values", v))


def outcome(values) -> np.ndarray:
    """Winning side of each vote, +1 on a tie."""
    values = _values(values)
    yea = (values == 1).sum(axis=0)
    nay = (values == -1).sum(axis=0)
    return np.where(yea >= nay, 1, -1)


def predict_signs(approx, v) -> np.ndarray:
    """Sign of each approximation entry; exact zeros take the vote's outcome."""
    approx = np.asarray(approx, dtype=float)
    pred = np.sign(approx).astype(int)
    fallback = np.broadcast_to(outcome(v), pred.shape)
    return np.where(pred == 0, fallback, pred)


def minority_model(v) -> np.ndarray:
    values = _values(v)
    return np.broadcast_to(outcome(values), values.shape).copy()


def random_model(v, rng_seed=0) -> np.ndarray:
    """Shuffle each vote's column across legislators.

    Abstentions in the shuffled column are filled with yea or nay in
    proportion to that vote's cast margin (yea when nobody cast a vote).
    """
    values = _values(v)
    rng = np.random.default_rng(rng_seed)
    out = rng.permuted(values, axis=0).astype(int)
    yea = (values == 1).sum(axis=0)
    cast = (values != 0).sum(axis=0)
    p_yea = np.where(cast > 0, yea / np.maximum(cast, 1), 1.0)
    fill = np.where(rng.random(values.shape) < p_yea, 1, -1)
    return np.where(out == 0, fill, out)


def score(pred, v, model_name="model", vote_ids=None) -> EvalReport:
    """Percent correct and APRE over cast (+1/-1) entries only."""
    values = _values(v)
    pred = np.asarray(pred)
    if pred.shape != values.shape:
        raise ValueError(f"prediction shape {pred.shape} != vote shape {values.shape}")
    if vote_ids is None:
        vote_ids = list(getattr(v, "vote_ids", [str(j) for j in range(values.shape[1])]))
    cast = values != 0
    errors = ((pred != values) & cast).sum(axis=0)
    n_cast = int(cast.sum())
    minority = np.minimum((values == 1).sum(axis=0), (values == -1).sum(axis=0))
    total_minority = int(minority.sum())
    pct = 100.0 * (n_cast - int(errors.sum())) / n_cast if n_cast else float("nan")
    if total_minority == 0:
        apre, diag = None, "every vote unanimous; APRE undefined"
        log.warning(diag)
    else:
        apre, diag = float((total_minority - int(errors.sum())) / total_minority), ""
    return EvalReport(model_name, pct, apre, n_cast,
                      {vid: int(e) for vid, e in zip(vote_ids, errors)}, diagnostic=diag)


def random_model_report(v, n_instances=10, rng_seed=0) -> EvalReport:
    """Mean APRE and percent correct over seeded random-model instances, with the range."""
    children = np.random.SeedSequence(rng_seed).spawn(n_instances)
    reports = [score(random_model(v, np.random.default_rng(c)), v, "random") for c in children]
    pcts = [r.percent_correct for r in reports]
    apres = [r.apre for r in reports if r.apre is not None]
    return EvalReport(
        "random",
        float(np.mean(pcts)),
        float(np.mean(apres)) if apres else None,
        reports[0].n_cast,
        percent_correct_min=float(min(pcts)),
        percent_correct_max=float(max(pcts)),
        diagnostic=f"{n_instances} instances",
    )


def evaluate_decomposition(decomp, v, rng_seed=0, n_random=10) -> list:
    """Reports for the minority and random baselines and each cumulative layer count."""
    reports = [score(minority_model(v), v, "minority"), random_model_report(v, n_random, rng_seed)]
    names = {1: "pdm_one_layer", 2: "pdm_two_layer"}
    approx = np.zeros(np.asarray(v.values).shape)
    for k, layer_approx in enumerate(_layer_approximations(decomp), start=1):
        approx = approx + layer_approx
        reports.append(score(predict_signs(approx, v), v, names.get(k, f"pdm_{k}_layer")))
    return reports


def _layer_approximations(decomp):
    if isinstance(decomp, dict):
        return decomp["approximations"]
    return [layer.approximation for layer in decomp.layers]


_CSV_FIELDS = ("model", "percent_correct", "apre", "n_cast", "percent_correct_min", "percent_correct_max")


def write_eval_csv(reports, path) -> None:
    """Models as rows, metrics as columns, full precision."""
    def fmt(x):
        return "" if x is None else (repr(float(x)) if isinstance(x, float) else str(x))

    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_CSV_FIELDS)
        for r in reports:
            w.writerow([r.model_name, fmt(r.percent_correct), fmt(r.apre), r.n_cast,
                        fmt(r.percent_correct_min), fmt(r.percent_correct_max)])


def write_eval_json(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=1)
        fh.write("\n")
