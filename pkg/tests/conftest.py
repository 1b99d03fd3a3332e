import math
import random

import pytest

from incsp.graph import DynGraph


def random_graph(n, m, W, seed, zero_prob=0.05):
    rng = random.Random(seed)
    edges = []
    for _ in range(m):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        w = 0.0 if rng.random() < zero_prob else float(rng.randint(1, W))
        edges.append((u, v, w))
    return DynGraph(n, edges)


def ratio_ok(est, dist, factor):
    if dist == math.inf:
        return est == math.inf
    return dist <= est <= factor * dist


@pytest.fixture
def rng():
    return random.Random(12345)


def chain_state(n, seed, xi=0.05, W=20):
    """A SourceSSSP whose estimates along a long chain each sit just inside
    the slack bound, so certification levels grow with the chain length."""
    from incsp.graph import Digraph
    from incsp.sssp import SourceSSSP

    rng = random.Random(seed)
    chain = rng.sample(range(1, n), n // 2)
    rest = [v for v in range(1, n) if v not in chain]
    edges, F = [], []
    c = float(rng.randint(1, W))
    edges.append((0, chain[0], c))
    for a, b in zip(chain, chain[1:]):
        w = float(rng.randint(1, W))
        c = (1 + xi) * (c + w) * (1 - xi / 100)
        edges.append((0, b, c))
        F.append((a, b, w))
    for _ in range(2 * n):
        u, v = rng.randrange(n), rng.choice(rest)
        if u != v:
            edges.append((u, v, float(rng.randint(1, W))))
    ds = SourceSSSP(Digraph.from_edges(n, edges), 0, xi, W=2 * n * W)
    ds.batch_insert(F, len(F))
    return ds


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
