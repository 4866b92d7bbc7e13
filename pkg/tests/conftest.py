import numpy as np
import pytest

from rollcall_pdm.data import from_array


def two_bloc_values(n=40, m=60, seed=0):
    """Two equal blocs voting exactly opposite on every roll call."""
    rng = np.random.default_rng(seed)
    line = rng.choice([-1, 1], size=m)
    bloc = np.where(np.arange(n) < n // 2, 1, -1)
    return (bloc[:, None] * line[None, :]).astype(np.int8), bloc


def planted_two_factor(seed, n=240, m_party=300, m_region=100, p_party=0.98, p_region=0.85):
    """Party votes plus a weaker set of region votes that cut across parties.

    Each party is split evenly between two regions. On party votes members
    follow their party line with probability ``p_party``; on region votes
    they follow their region's line with probability ``p_region``.
    Returns ``(values, party, region)``.
    """
    rng = np.random.default_rng(seed)
    party = np.repeat([1, -1], n // 2)
    region = np.tile([0, 1], n // 2)
    region_sign = np.where(region == 0, 1, -1)
    party_line = rng.choice([-1, 1], m_party)
    region_line = rng.choice([-1, 1], m_region)
    a = np.where(rng.random((n, m_party)) < p_party, 1, -1) * party[:, None] * party_line
    b = np.where(rng.random((n, m_region)) < p_region, 1, -1) * region_sign[:, None] * region_line
    return np.hstack([a, b]).astype(np.int8), party, region


def random_votes(n, m, seed, p_abstain=0.0):
    rng = np.random.default_rng(seed)
    vals = rng.choice([-1, 1], size=(n, m))
    if p_abstain:
        vals[rng.random((n, m)) < p_abstain] = 0
    return vals.astype(np.int8)


@pytest.fixture
def two_bloc():
    vals, bloc = two_bloc_values()
    return from_array(vals, party=["A" if b > 0 else "B" for b in bloc]), bloc


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
