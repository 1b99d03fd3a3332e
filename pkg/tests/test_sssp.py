import math
import random

import numpy as np
import pytest

from conftest import chain_state, random_graph
from incsp.graph import Digraph, DynGraph, generate_random_sequence
from incsp.oracle import check_certified, exact_sssp, rank_certificates_hold
from incsp.propagate import relaxedness_violations, slack_violations
from incsp.sssp import SourceSSSP, default_xi

INF = math.inf


def test_exact_init():
    ds = SourceSSSP(DynGraph(3, [(0, 1, 2), (1, 2, 3)]), 0, 0.1)
    assert ds.d == [0, 2, 5]
    assert ds.rank == [0, 0, 0] and ds.r == 0 and ds.rho == 0


def test_unreachable():
    ds = SourceSSSP(DynGraph(3, [(0, 1, 2)]), 0, 0.1)
    assert not ds.reachable(2)
    assert ds.estimate(2) == INF
    assert ds.estimate(0) == 0


def test_init_matches_oracle():
    g = random_graph(64, 256, 100, seed=3)
    ds = SourceSSSP(g, 0, 0.01)
    assert ds.d == exact_sssp(g, 0)


def test_xi_range():
    with pytest.raises(ValueError):
        SourceSSSP(DynGraph(2), 0, 1.0)
    with pytest.raises(ValueError):
        SourceSSSP(DynGraph(2), 0, 2.0**-21)


def test_source_insert_lowers():
    ds = SourceSSSP(DynGraph(2, [(0, 1, 100)]), 0, 0.1)
    assert ds.source_insert(1, 5)
    assert ds.d[1] == 5


def test_source_insert_guard():
    ds = SourceSSSP(DynGraph(2, [(0, 1, 5)]), 0, 0.1)
    ranks = list(ds.rank)
    assert not ds.source_insert(1, 4.9)
    assert ds.d == [0, 5] and ds.rank == ranks
    assert ds.source_weight(1) == 4.9


def test_source_insert_reaches_new_vertices():
    ds = SourceSSSP(DynGraph(3, [(1, 2, 4)]), 0, 0.1)
    ds.source_insert(1, 3)
    assert ds.d == [0, 3, 7]


def test_synchronize_two_classes():
    # deg = 1 + outdeg: C0 = {0, 2} has degree 3, C1 = {1, 3} has degree 5
    g = Digraph.from_edges(4, [(1, 2, 1), (1, 3, 1), (2, 3, 1), (3, 2, 1)])
    ds = SourceSSSP(g, 0, 0.1)
    ds._set_rank(1, 1)
    ds._set_rank(3, 1)
    ds._trim()
    assert ds.class_degree == [3, 5]
    calls = []
    ds.on_propagate = calls.append
    ds.synchronize()
    assert len(calls) == 1 and calls[0] == {0, 1, 2, 3}
    assert ds.rank == [0, 0, 0, 0] and ds.r == 0


def test_synchronize_noop_at_rank_zero():
    ds = SourceSSSP(random_graph(10, 20, 5, seed=1), 0, 0.1)
    calls = []
    ds.on_propagate = calls.append
    ds.synchronize()
    assert calls == [] and ds.r == 0


def replay_sources(n, m, W, delta, seed, eps):
    g, ups = generate_random_sequence(n, m, W, delta, seed, source=0)
    xi = default_xi(eps, n + m + delta)
    ds = SourceSSSP(g, 0, xi, W=W)
    return g.copy(), ups, ds


@pytest.mark.parametrize("seed", range(3))
def test_replay_bounds(seed):
    truth, ups, ds = replay_sources(64, 256, 100, 200, seed, 0.5)
    touched_ok = []
    ds.on_propagate = lambda t: touched_ok.append(not relaxedness_violations(ds.view, ds.d, t))
    for upd in ups:
        truth.apply_update(upd)
        ds.source_insert(upd.head, upd.weight)
        dist = exact_sssp(truth, 0)
        bound = (1 + ds.xi) ** ds.bound_exponent()
        for v in range(64):
            assert dist[v] <= ds.d[v] <= bound * dist[v] or dist[v] == ds.d[v] == INF
        assert slack_violations(ds.view, ds.d, ds.xi) == []
        assert ds.class_balance_ok()
        recount = [sum(ds.view.degree(v) for v in c) for c in ds.classes]
        assert recount == ds.class_degree
    assert all(touched_ok) and touched_ok


def test_rank_certificates_after_inserts():
    truth, ups, ds = replay_sources(24, 60, 20, 60, 4, 0.5)
    for i, upd in enumerate(ups):
        ds.source_insert(upd.head, upd.weight)
        if i % 10 == 0:
            assert rank_certificates_hold(ds)
    assert check_certified(ds, ds.rho + ds.r)


def test_certified_after_new():
    ds = SourceSSSP(random_graph(20, 60, 10, seed=2), 0, 0.1)
    assert check_certified(ds, 0)


def test_batch_insert_empty():
    ds = SourceSSSP(random_graph(8, 16, 5, seed=1), 0, 0.1)
    ds.rho = 7
    before = list(ds.d)
    ds.batch_insert([], 0)
    assert ds.rho == 0 and ds.d == before


def test_batch_insert_guard_blocks_propagation():
    ds = SourceSSSP(DynGraph(3, [(0, 1, 1), (0, 2, 2)]), 0, 0.1)
    calls = []
    ds.on_propagate = calls.append
    ds.batch_insert([(1, 2, 1)], 5)
    assert calls == [] and ds.d == [0, 1, 2] and ds.rho == 5
    assert dict(ds.view.base.out_edges(1)) == {2: 1.0}


def test_batch_insert_propagates():
    ds = SourceSSSP(DynGraph(3, [(0, 1, 1), (0, 2, 20)]), 0, 0.1)
    ds.batch_insert([(1, 2, 1)], 3)
    assert ds.d == [0, 1, 2]


def test_det_reset():
    ds = chain_state(64, 0)
    assert not check_certified(ds, 4)
    ds.rho = 12
    ds.det_reset()
    assert ds.rho == 0 and ds.r == 0
    assert check_certified(ds, 0)


def test_det_reset_fresh_is_noop():
    g = random_graph(32, 100, 10, seed=5)
    ds = SourceSSSP(g, 0, 0.1)
    before = list(ds.d)
    ds.det_reset()
    assert ds.d == before


def test_rand_reset_deterministic_under_seed():
    a, b = chain_state(64, 3), chain_state(64, 3)
    za = a.rand_reset(16, np.random.default_rng(9))
    zb = b.rand_reset(16, np.random.default_rng(9))
    assert za == zb and a.d == b.d


def test_rand_reset_at_ell():
    ds = chain_state(32, 1)
    ds.rand_reset(ds.ell, np.random.default_rng(0))
    assert ds.rho == ds.ell


def test_rand_reset_lambda_range():
    ds = chain_state(16, 1)
    with pytest.raises(ValueError):
        ds.rand_reset(0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        ds.rand_reset(ds.ell + 1, np.random.default_rng(0))


def test_rand_reset_certifies_error_states():
    lam, before, after = 8, 0, 0
    for t in range(100):
        ds = chain_state(64, t)
        before += check_certified(ds, lam)
        ds.rand_reset(lam, np.random.default_rng(t))
        after += check_certified(ds, lam)
    # the constructed states really need the reset
    assert before <= 10
    assert after >= 95


def test_interval_degree_matches_scan():
    ds = chain_state(64, 2)
    rng = random.Random(0)
    for _ in range(50):
        lo = rng.uniform(-5, 80)
        hi = lo + rng.uniform(0, 40)
        deg, members = ds._interval_members(lo, hi)
        base = 1 + ds.xi
        expect = [v for v in range(64) if base**lo <= ds.d[v] <= base**hi]
        assert sorted(members()) == expect
        assert deg == sum(ds.view.degree(v) for v in expect)


def test_drop_and_rank_increase_counts():
    truth, ups, ds = replay_sources(64, 256, 256, 300, 5, 0.1)
    for upd in ups:
        ds.source_insert(upd.head, upd.weight)
    for v in range(64):
        assert ds.rank_increases[v] <= ds.est.drop_count[v] <= ds.ell
