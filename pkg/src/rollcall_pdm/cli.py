"""Command line entry point: ``rollcall-pdm analyze | simulate | eval``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .boost import explain_clusters
from .data import VoteDataError, filter_minority, load_voteview, load_wide_csv, write_wide_csv
from .engine import PDMConfig, decompose, load_decomposition
from .evaluate import evaluate_decomposition, write_eval_csv, write_eval_json
from .mds import estimate_dimension, pairwise_distances, write_plot_csv
from .simulate import alpha_grid, run_experiment
from .spectral import dump_graph_csv

log = logging.getLogger("rollcall_pdm")


@dataclass
class RunConfig:
    input: Optional[str] = None
    members: Optional[str] = None
    votes: Optional[str] = None
    format: str = "wide_csv"
    minority_threshold: float = 0.025
    sigma: float = 1.0
    null_reps: int = 25
    max_layers: int = 2
    rounds: int = 50
    top_k: int = 10
    seed: int = 0
    out: str = "pdm_out"
    dump_spectral: bool = False
    extra: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return x


def parse_grid(text):
    """``start:stop:step`` (inclusive) or a comma-separated list of alphas."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            grid = alpha_grid(start, stop, step)
        else:
            grid = np.array([float(p) for p in text.split(",") if p.strip()])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad alpha grid {text!r}: {exc}") from None
    if grid.size == 0:
        raise argparse.ArgumentTypeError("alpha grid is empty")
    if np.any(grid <= 0):
        raise argparse.ArgumentTypeError("alpha values must be positive")
    return grid


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rollcall-pdm", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="master seed (falls back to $PDM_SEED, then 0)")
        sp.add_argument("--out", default="pdm_out", help="output directory")

    def data_args(sp):
        sp.add_argument("--input", help="wide CSV vote matrix")
        sp.add_argument("--members", help="Voteview members CSV")
        sp.add_argument("--votes", help="Voteview votes CSV")
        sp.add_argument("--format", choices=("wide_csv", "voteview"), default=None)
        sp.add_argument("--threshold", type=float, default=0.025,
                        help="minority-side fraction below which votes are dropped")

    a = sub.add_parser("analyze", help="decompose a vote matrix and write all reports")
    data_args(a)
    common(a)
    a.add_argument("--sigma", type=_positive_float, default=1.0)
    a.add_argument("--null-reps", type=int, default=25)
    a.add_argument("--max-layers", type=int, default=2)
    a.add_argument("--rounds", type=int, default=50)
    a.add_argument("--top-k", type=int, default=10)
    a.add_argument("--dump-spectral", action="store_true",
                   help="also write layer-1 S, S1, L and eigenvalues as CSV")

    s = sub.add_parser("simulate", help="party-loyalty simulation sweep")
    common(s)
    s.add_argument("--alpha-grid", type=parse_grid, default=parse_grid("1:30:0.3"))
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--n-members", type=int, default=100)
    s.add_argument("--n-votes", type=int, default=500)

    e = sub.add_parser("eval", help="re-score a stored decomposition")
    data_args(e)
    common(e)
    e.add_argument("--decomposition", help="decomposition.json (default: OUT/decomposition.json)")
    return p


def resolve_seed(arg) -> int:
    if arg is not None:
        return int(arg)
    env = os.environ.get("PDM_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"PDM_SEED must be an integer, got {env!r}") from None
    return 0


def load_input(args):
    fmt = args.format or ("voteview" if args.members or args.votes else "wide_csv")
    if fmt == "voteview":
        if not (args.members and args.votes):
            raise UsageError("voteview format needs --members and --votes")
        v = load_voteview(args.members, args.votes)
    else:
        if not args.input:
            raise UsageError("wide_csv format needs --input")
        v = load_wide_csv(args.input)
    return filter_minority(v, args.threshold)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_analyze(args) -> int:
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    v = load_input(args)
    config = PDMConfig(sigma=args.sigma, null_reps=args.null_reps, seed=seed)
    decomp = decompose(v, args.max_layers, config)
    decomp.to_json(out / "decomposition.json")
    write_wide_csv(v, out / "votes_filtered.csv")
    files = ["decomposition.json", "votes_filtered.csv"]

    if args.dump_spectral and decomp.layers:
        dump_graph_csv(decomp.layers[0].graph, out / "spectral_layer1")
        files.append("spectral_layer1/")

    series = [(f"layer{layer.layer_index}", layer.approximation, layer.labels(v.n))
              for layer in decomp.layers]
    if len(decomp.layers) >= 2:
        series.append(("combined", decomp.approximation(2), decomp.layers[0].labels(v.n)))
    dim_rows = []
    for k, (name, approx, labels) in enumerate(series):
        est = estimate_dimension(pairwise_distances(approx), rng_seed=seed + k)
        dim_rows.append([name, "" if est.above_max else repr(est.estimated_dim),
                         int(est.above_max)] + [repr(s) for _, s in est.stress_by_dim])
        write_plot_csv(out / f"plot_{name}.csv", v, labels, est.coords_2d)
        files.append(f"plot_{name}.csv")
    with (out / "dims.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series", "estimated_dim", "above_max"] + [f"stress_{d}" for d in range(1, 11)])
        w.writerows(dim_rows)
    files.append("dims.csv")

    for layer in decomp.layers:
        if layer.k0 < 2:
            continue
        sep = explain_clusters(v, layer.labels(v.n), args.rounds, args.top_k)
        stem = "separating_votes" if layer.layer_index == 1 else f"separating_votes_layer{layer.layer_index}"
        sep.write_table_csv(out / f"{stem}.csv")
        sep.to_json(out / f"{stem}.json")
        files += [f"{stem}.csv", f"{stem}.json"]

    reports = evaluate_decomposition(decomp, v, rng_seed=seed)
    write_eval_csv(reports, out / "eval.csv")
    write_eval_json(reports, out / "eval.json")
    files += ["eval.csv", "eval.json"]

    _write_json(out / "manifest.json", {
        "command": "analyze",
        "version": __version__,
        "seed": seed,
        "config": {
            "input": args.input, "members": args.members, "votes": args.votes,
            "format": args.format, "minority_threshold": args.threshold,
            "sigma": args.sigma, "null_reps": args.null_reps, "max_layers": args.max_layers,
            "rounds": args.rounds, "top_k": args.top_k,
        },
        "n_legislators": v.n,
        "n_votes": v.m,
        "n_layers": len(decomp.layers),
        "stop_reason": decomp.stop_reason,
        "files": files,
    })
    log.info("wrote %d artifacts to %s", len(files), out)
    return 0


def cmd_simulate(args) -> int:
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    summary = run_experiment(args.alpha_grid, args.trials, seed, args.n_members, args.n_votes)
    summary.write_csv(out)
    _write_json(out / "sim_stats.json", {
        "seed": seed,
        "trials": args.trials,
        "alphas": [float(a) for a in args.alpha_grid],
        "mean_abs_corr": summary.mean_abs_corr,
        "var_abs_corr": summary.var_abs_corr,
        "per_alpha_mean": {repr(k): v for k, v in summary.per_alpha_mean.items()},
        "per_alpha_party_var": {repr(k): v for k, v in summary.per_alpha_party_var.items()},
    })
    return 0


def cmd_eval(args) -> int:
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    path = Path(args.decomposition) if args.decomposition else out / "decomposition.json"
    if not path.exists():
        raise FileNotFoundError(f"decomposition file not found: {path}")
    doc = load_decomposition(path)
    if args.input or args.members:
        v = load_input(args)
    else:
        v = load_wide_csv(path.parent / "votes_filtered.csv")
    if list(v.vote_ids) != doc["vote_ids"] or v.ids != doc["legislator_ids"]:
        raise VoteDataError("vote matrix does not match the stored decomposition")
    reports = evaluate_decomposition(doc, v, rng_seed=seed)
    out.mkdir(parents=True, exist_ok=True)
    write_eval_csv(reports, out / "eval.csv")
    write_eval_json(reports, out / "eval.json")
    return 0


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "eval": cmd_eval}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except Exception as exc:  # reported as JSON for callers that parse stderr
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
