"""Ground truth and replay verification.

Everything here recomputes from scratch and shares no code with the
structures it checks.
"""
from __future__ import annotations

import heapq
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .graph import DynGraph, Update, UpdateKind
from .propagate import relaxedness_violations, slack_violations

INF = math.inf


def _dijkstra(n: int, adj: list[list[tuple[int, float]]], s: int, skip: int | None = None) -> list[float]:
    dist = [INF] * n
    dist[s] = 0.0
    heap = [(0.0, s)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for v, w in adj[u]:
            if v == skip:
                continue
            if du + w < dist[v]:
                dist[v] = du + w
                heapq.heappush(heap, (du + w, v))
    return dist


def _adjacency(n: int, edges: Iterable[tuple[int, int, float]]) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
    return adj


def exact_sssp(g: DynGraph, s: int, version: int | None = None) -> list[float]:
    """Exact distances from ``s`` in the current graph or in version ``version``."""
    return _dijkstra(g.n, _adjacency(g.n, g.snapshot(version)), s)


def bellman_ford(n: int, edges: list[tuple[int, int, float]], s: int) -> list[float]:
    dist = [INF] * n
    dist[s] = 0.0
    for _ in range(n - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    return dist


def floyd_warshall(n: int, edges: Iterable[tuple[int, int, float]]) -> np.ndarray:
    D = np.full((n, n), INF)
    np.fill_diagonal(D, 0.0)
    for u, v, w in edges:
        if w < D[u, v]:
            D[u, v] = w
    for k in range(n):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return D


def exact_apsp(g: DynGraph) -> np.ndarray:
    return floyd_warshall(g.n, g.snapshot())


def sandwich_ratio(est: float, dist: float) -> float:
    """est / dist with the conventions 0/0 = 1 and inf/inf = 1; nan flags est < dist."""
    if est < dist:
        return math.nan
    if dist == INF:
        return 1.0
    if dist == 0:
        return 1.0 if est == 0 else INF
    return est / dist


# certification --------------------------------------------------------------

def check_certified(ds, k: float, sample: float | None = None, rng: random.Random | None = None) -> bool:
    """Every vertex ``k``-certified in the structure's graph with the source removed.

    Runs one Dijkstra per vertex. Above 10^7 operation-equivalents only a 10%
    sample of start vertices is checked unless ``sample`` overrides it.
    """
    n, s = ds.n, ds.source
    d = ds.d
    if k == 0:
        # relaxed edges compose along paths, so one edge scan decides 0-certification
        return all(
            d[v] <= d[u] + w
            for u in range(n) if u != s
            for v, w in ds.view.base.out[u].items() if v != s
        )
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    edge_total = 0
    for u in range(n):
        if u == s:
            continue
        for v, w in ds.view.base.out[u].items():
            if v != s:
                adj[u].append((v, w))
                edge_total += 1
    starts = [u for u in range(n) if u != s and d[u] < INF]
    if sample is None and n * max(edge_total, 1) > 10**7:
        sample = 0.1
    if sample is not None:
        rng = rng or random.Random(0)
        starts = rng.sample(starts, max(1, int(len(starts) * sample))) if starts else []
    factor = (1.0 + ds.xi) ** k
    for u in starts:
        dist = _dijkstra(n, adj, u, skip=s)
        du = d[u]
        for v in range(n):
            if dist[v] < INF and d[v] > factor * (du + dist[v]):
                return False
    return True


def rank_certificates_hold(ds) -> bool:
    """Each vertex ``v`` is ``(rho + rank(v))``-certified."""
    n, s = ds.n, ds.source
    d = ds.d
    adj = [[(v, w) for v, w in ds.view.base.out[u].items() if v != s] if u != s else [] for u in range(n)]
    base = 1.0 + ds.xi
    for u in range(n):
        if u == s or d[u] == INF:
            continue
        factor = base ** (ds.rho + ds.rank[u])
        dist = _dijkstra(n, adj, u, skip=s)
        for v in range(n):
            if dist[v] < INF and d[v] > factor * (d[u] + dist[v]):
                return False
    return True


# reports --------------------------------------------------------------------

@dataclass
class Check:
    check: str
    location: object
    bound: float
    observed: float
    ok: bool


@dataclass
class OracleReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, check: str, location, bound: float, observed: float, ok: bool) -> bool:
        self.checks.append(Check(check, location, bound, observed, bool(ok)))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.ok), None)

    def to_jsonl(self) -> str:
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return str(x)
            return x

        lines = []
        for c in self.checks:
            rec = {key: clean(val) for key, val in asdict(c).items()}
            lines.append(json.dumps(rec))
        return "\n".join(lines) + ("\n" if lines else "")


def _worst_ratio(est: np.ndarray, dist: np.ndarray) -> tuple[float, object]:
    """Largest est/dist over pairs, or nan (with its location) if any est < dist."""
    under = est < dist
    if under.any():
        idx = tuple(int(i) for i in np.argwhere(under)[0])
        return math.nan, idx
    finite = np.isfinite(dist) & (dist > 0)
    zero_bad = (dist == 0) & (est != 0)
    if zero_bad.any():
        return INF, tuple(int(i) for i in np.argwhere(zero_bad)[0])
    if not finite.any():
        return 1.0, None
    ratio = np.where(finite, est / np.where(finite, dist, 1.0), 1.0)
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return float(ratio[idx]), tuple(int(i) for i in idx)


def _sandwich(report: OracleReport, name: str, step, est, dist, eps: float) -> bool:
    est = np.asarray(est, dtype=float)
    dist = np.asarray(dist, dtype=float)
    worst, where = _worst_ratio(est, dist)
    ok = not math.isnan(worst) and worst <= 1.0 + eps
    return report.add(name, {"update": step, "at": where}, 1.0 + eps, worst, ok)


# replay ---------------------------------------------------------------------

def verify_sssp(g0: DynGraph, updates: list[Update], eps: float, source: int = 0,
                check_every: int = 1, report: OracleReport | None = None) -> OracleReport:
    from .sssp import SourceSSSP, default_xi

    report = report or OracleReport()
    truth = g0.copy()
    m_final = g0.n + g0.m + len(updates)
    W = max([1.0, g0.max_weight()] + [u.weight for u in updates])
    ds = SourceSSSP(g0, source, default_xi(eps, m_final), W=W)
    _sandwich(report, "sssp.sandwich", 0, ds.d, exact_sssp(truth, source), eps)
    for i, upd in enumerate(updates, 1):
        if upd.tail != source:
            report.add("sssp.source_edge", {"update": i}, source, upd.tail, False)
            break
        truth.apply_update(upd)
        ds.source_insert(upd.head, upd.weight)
        if i % check_every and i != len(updates):
            continue
        ok = _sandwich(report, "sssp.sandwich", i, ds.d, exact_sssp(truth, source), eps)
        slack = slack_violations(ds.view, ds.d, ds.xi)
        ok &= report.add("sssp.slack_invariant", {"update": i}, 0, len(slack), not slack)
        ok &= report.add("sssp.rank_bound", {"update": i}, math.log2(ds.m), ds.r, ds.class_balance_ok())
        if not ok:
            break
    return report


def shortcut_invariant_failures(x) -> list[tuple]:
    """Shortcut invariants at quiescence for an :class:`IncAPSP`."""
    bad = []
    slots = x.phase.slots
    for s, ss in slots.items():
        for t, ts in slots.items():
            if s == t:
                continue
            em = x.A.emitted(ss, ts)
            if x.D[s].source_weight(t) > em:
                bad.append(("dense->forward", s, t))
            if x.DR[t].source_weight(s) > em:
                bad.append(("dense->reverse", s, t))
    for t in slots:
        for s in range(x.n):
            if s != t and x.D[s].source_weight(t) > x.DR[t].estimate(s):
                bad.append(("reverse->forward", s, t))
    for s in slots:
        for t in range(x.n):
            if s != t and x.DR[t].source_weight(s) > x.D[s].estimate(t):
                bad.append(("forward->reverse", s, t))
    return bad


def shortcut_soundness_failures(x, dist: np.ndarray) -> list[tuple]:
    """Shortcuts shorter than the true distance between their endpoints."""
    bad = []
    for s in range(x.n):
        for t, w in x.D[s].view.source_out.items():
            if w < dist[s, t]:
                bad.append(("forward", s, t))
        for u, w in x.DR[s].view.source_out.items():
            if w < dist[u, s]:
                bad.append(("reverse", u, s))
    return bad


def cascade_failures(x, dist: np.ndarray) -> list[tuple]:
    """Per-component error exponents at quiescence, checked against exact distances."""
    base = 1.0 + x.xi
    k = x.phase.k
    lvl = x.rho_star + k * 4 * x.y
    bad = []
    slots = x.phase.slots
    for s, ss in slots.items():
        for t, ts in slots.items():
            if s != t and x.A.emitted(ss, ts) > base ** (lvl + x.y) * dist[s, t]:
                bad.append(("dense", s, t))
    fwd = np.array([ds.d for ds in x.D])
    rev = np.array([ds.d for ds in x.DR]).T  # rev[s, t] = DR_t(s)
    lim = base ** (lvl + 3 * x.y) * dist
    with np.errstate(invalid="ignore"):
        for name, M in (("forward", fwd), ("reverse", rev)):
            over = np.argwhere((M > lim) & np.isfinite(dist))
            bad.extend((name, int(a), int(b)) for a, b in over)
    return bad


def verify_apsp(g0: DynGraph, updates: list[Update], eps: float, variant: str = "det", seed: int = 0,
                check_every: int = 1, report: OracleReport | None = None, deep: bool = False) -> OracleReport:
    from .apsp import IncAPSP

    report = report or OracleReport()
    truth = g0.copy()
    x = IncAPSP(g0, eps, variant=variant, seed=seed, m_hint=g0.m + len(updates),
                W=max([1.0, g0.max_weight()] + [u.weight for u in updates]))
    _sandwich(report, "apsp.sandwich", 0, x.matrix(), exact_apsp(truth), eps)
    for i, upd in enumerate(updates, 1):
        truth.apply_update(upd)
        x.update(upd)
        if i % check_every and i != len(updates):
            continue
        dist = exact_apsp(truth)
        ok = _sandwich(report, "apsp.sandwich", i, x.matrix(), dist, eps)
        inv = shortcut_invariant_failures(x)
        ok &= report.add("apsp.shortcut_invariants", {"update": i, "at": inv[:1]}, 0, len(inv), not inv)
        if deep:
            rec = exact_apsp(x.graph)
            snd = shortcut_soundness_failures(x, rec)
            ok &= report.add("apsp.shortcut_soundness", {"update": i, "at": snd[:1]}, 0, len(snd), not snd)
            cas = cascade_failures(x, rec)
            ok &= report.add("apsp.cascade", {"update": i, "at": cas[:1]}, 0, len(cas), not cas)
        if not ok:
            break
    return report


def verify_offline(g0: DynGraph, updates: list[Update], eps: float, source: int = 0,
                   queries: list[tuple[int, int]] | None = None, check_every: int = 1,
                   report: OracleReport | None = None) -> OracleReport:
    from .offline import OfflineSSSP

    report = report or OracleReport()
    o = OfflineSSSP.build(g0, updates, eps, source)
    g = o.graph
    if queries is None:
        queries = [(v, j) for j in range(0, len(updates) + 1, check_every) for v in range(g.n)]
    by_version: dict[int, list[int]] = {}
    for v, j in queries:
        by_version.setdefault(j, []).append(v)
    for j in sorted(by_version):
        dist = exact_sssp(g, source, j)
        vs = by_version[j]
        if not _sandwich(report, "offline.sandwich", j, [o.query(v, j) for v in vs], [dist[v] for v in vs], eps):
            break
    return report


def verify_replay(kind: str, instance, eps: float, check_every: int = 1, *, variant: str = "det",
                  seed: int = 0, source: int = 0) -> OracleReport:
    """Replay ``instance`` through the structure named by ``kind`` with oracle checks."""
    g0, updates = instance.graph(), instance.updates
    if kind == "sssp":
        return verify_sssp(g0, updates, eps, source, check_every)
    if kind == "apsp":
        return verify_apsp(g0, updates, eps, variant, seed, check_every)
    if kind == "offline":
        return verify_offline(g0, updates, eps, source, check_every=check_every)
    raise ValueError(f"unknown structure kind {kind!r}")


# adversary -------------------------------------------------------------------

Strategy = Callable[[np.ndarray, np.ndarray, random.Random, float], tuple[int, int, float]]


def worst_ratio_strategy(est: np.ndarray, dist: np.ndarray, rng: random.Random, W: float) -> tuple[int, int, float]:
    """Insert a cheap edge across the pair whose estimate is currently loosest."""
    n = len(dist)
    finite = np.isfinite(dist) & (dist > 0)
    ratio = np.where(finite, est / np.where(finite, dist, 1.0), 0.0)
    np.fill_diagonal(ratio, 0.0)
    best = ratio.max()
    if best > 1.0:
        cands = np.argwhere(ratio == best)
        u, v = (int(i) for i in cands[rng.randrange(len(cands))])
        if rng.random() < 0.5:
            return u, v, float(max(1, math.floor(dist[u, v] / 2)))
        # feed the loose pair from a random vertex so its slack gets reused
        a = rng.randrange(n)
        if a != u:
            return a, u, 1.0
    u = rng.randrange(n)
    v = (u + 1 + rng.randrange(n - 1)) % n
    return u, v, float(rng.randint(1, int(W)))


def adaptive_adversary(x, rounds: int, seed: int, strategy: Strategy = worst_ratio_strategy,
                       truth: DynGraph | None = None, report: OracleReport | None = None) -> OracleReport:
    """Each round: read every answer, pick an insertion from them, re-verify."""
    report = report or OracleReport()
    rng = random.Random(seed)
    truth = truth.copy() if truth is not None else x.graph.copy()
    W = max(1.0, truth.max_weight(), getattr(x, "W", 1.0))
    for r in range(1, rounds + 1):
        est = x.matrix()
        dist = exact_apsp(truth)
        u, v, w = strategy(est, dist, rng, W)
        upd = Update(UpdateKind.INSERT, u, v, w)
        truth.apply_update(upd)
        x.update(upd)
        if not _sandwich(report, "adversary.sandwich", r, x.matrix(), exact_apsp(truth), x.eps):
            break
    return report


def version_distances(g0: DynGraph, updates: list[Update], source: int) -> list[list[float]]:
    """Exact distances from ``source`` in every version 0..len(updates)."""
    g = g0.copy()
    out = [exact_sssp(g, source)]
    for upd in updates:
        g.apply_update(upd)
        out.append(exact_sssp(g, source))
    return out


__all__ = [
    "Check",
    "OracleReport",
    "adaptive_adversary",
    "bellman_ford",
    "cascade_failures",
    "check_certified",
    "exact_apsp",
    "exact_sssp",
    "floyd_warshall",
    "rank_certificates_hold",
    "relaxedness_violations",
    "shortcut_invariant_failures",
    "shortcut_soundness_failures",
    "slack_violations",
    "verify_apsp",
    "verify_offline",
    "verify_replay",
    "verify_sssp",
    "version_distances",
    "worst_ratio_strategy",
]
