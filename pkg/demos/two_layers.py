"""
Recovering a second, weaker factor
==================================

Legislators split by party on most votes and by region on a smaller set
that cuts across party lines. The first layer should find the parties; once
that structure is subtracted, the second layer should find the regions.
"""
import numpy as np
from sklearn.metrics import adjusted_rand_score

from rollcall_pdm import decompose

rng = np.random.default_rng(7)
n, m_party, m_region = 240, 300, 100
party = np.repeat([1, -1], n // 2)
region = np.tile([1, -1], n // 2)

party_votes = np.where(rng.random((n, m_party)) < 0.98, 1, -1) * party[:, None] * rng.choice([-1, 1], m_party)
region_votes = np.where(rng.random((n, m_region)) < 0.85, 1, -1) * region[:, None] * rng.choice([-1, 1], m_region)
values = np.hstack([party_votes, region_votes])

d = decompose(values, max_layers=2)
for layer in d.layers:
    rows = layer.clustering.rows
    truth = party if layer.layer_index == 1 else region
    print("layer %d: k0=%d, %d rows clustered, ARI vs %s = %.3f" % (
        layer.layer_index, layer.k0, rows.size,
        "party" if layer.layer_index == 1 else "region",
        adjusted_rand_score(truth[rows], layer.clustering.assignment)))

# The pieces add back up exactly
total = sum(layer.approximation for layer in d.layers) + d.residual
print("max |V - sum(A) - R| = %.2e" % np.abs(total - values).max())

# Each layer explains a share of the squared norm
norm2 = (values.astype(float) ** 2).sum()
for layer in d.layers:
    print("layer %d share of ||V||^2: %.3f" % (layer.layer_index, (layer.approximation ** 2).sum() / norm2))
print("residual share: %.3f" % ((d.residual ** 2).sum() / norm2))
