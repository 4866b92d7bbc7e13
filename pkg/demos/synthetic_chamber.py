"""
Analyzing a synthetic chamber end to end
========================================

Build a vote matrix, filter near-unanimous votes, decompose it, and look at
each piece of output: clusters, the separating votes, the MDS dimension and
prediction scores against the two baselines.
"""
import numpy as np

from rollcall_pdm import (
    SimConfig,
    decompose,
    estimate_dimension,
    evaluate_decomposition,
    explain_clusters,
    filter_minority,
    pairwise_distances,
    simulate,
)

v = simulate(SimConfig(n_members=80, n_votes=300, alpha=6.0, rng_seed=3)).vote_matrix
v = filter_minority(v)
print("%d legislators, %d votes after filtering" % (v.n, v.m))

d = decompose(v, max_layers=2)
print("layers:", len(d.layers), "stop:", d.stop_reason)
for layer in d.layers:
    p = layer.params
    print("  layer %d  k0=%d  l=%d  null floor %.4f" % (layer.layer_index, p.k0, p.l, p.null_fiedler_min))
    for msg in layer.diagnostics:
        print("    note:", msg)

###############################################################################
# Cluster sizes against the simulated party labels

labels = d.layers[0].labels(v.n)
for c in np.unique(labels):
    parties = [v.parties[i] for i in np.flatnonzero(labels == c)]
    print("cluster %2d: %3d members, party A share %.2f" % (c, len(parties), parties.count("A") / len(parties)))

###############################################################################
# Which votes separate the clusters, and how each cluster voted on them

sep = explain_clusters(v, labels, rounds=50, top_k=3)
print("\nvote     " + " ".join("c%-4d" % c for c in sep.clusters))
for j, vid in enumerate(sep.selected[:8]):
    print("%-8s " % vid + " ".join("%-5s" % ("" if np.isnan(x) else int(x)) for x in sep.yea_table[:, j]))

###############################################################################
# Dimensionality of the layer-1 approximation

est = estimate_dimension(pairwise_distances(d.approximation(1)), max_dim=5)
print("\nstress by dimension:", ", ".join("%d: %.4f" % ds for ds in est.stress_by_dim))
print("estimated dimension:", est.label)

###############################################################################
# Scores

for r in evaluate_decomposition(d, v):
    apre = "n/a" if r.apre is None else "%.3f" % r.apre
    print("%-15s %6.2f%% correct  APRE %s" % (r.model_name, r.percent_correct, apre))
