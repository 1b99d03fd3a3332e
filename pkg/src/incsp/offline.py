"""Offline incremental (1+eps)-approximate SSSP over all versions of a graph.

Given the whole update sequence up front, exact distances are computed for
the first and last versions, then a divide-and-conquer search over version
ranges stores extra estimates only for vertices whose bracketing estimates
are more than a (1+xi) factor apart. A query ``(v, j)`` returns the smallest
estimate stored for ``v`` at any version ``<= j``.
"""
from __future__ import annotations

import bisect
import heapq
import math
from typing import Iterable, TextIO

from .graph import DynGraph, Update
from .propagate import INF


class EstimateCollection:
    """Per-vertex lists of ``(version, estimate)`` sorted by version."""

    def __init__(self, n: int):
        self.entries: list[list[tuple[int, float]]] = [[] for _ in range(n)]

    def add(self, v: int, ts: int, value: float) -> None:
        bisect.insort(self.entries[v], (ts, value))

    def prefix_min(self, v: int, alpha: int) -> float:
        best = INF
        for ts, val in self.entries[v]:
            if ts > alpha:
                break
            if val < best:
                best = val
        return best

    def suffix_max(self, v: int, beta: int) -> float:
        lst = self.entries[v]
        i = bisect.bisect_left(lst, (beta, -INF))
        return max((val for _, val in lst[i:]), default=-INF)

    def size(self, v: int) -> int:
        return len(self.entries[v])


def _dijkstra_version(g: DynGraph, s: int, t: int) -> list[float]:
    dist = [INF] * g.n
    dist[s] = 0.0
    heap = [(0.0, s)]
    edges = g.edges
    while heap:
        du, u = heapq.heappop(heap)
        if du != dist[u]:
            continue
        for eid in g.out_adjacency[u]:
            w = edges[eid].weight_at(t)
            if w is not None and du + w < dist[edges[eid].head]:
                dist[edges[eid].head] = du + w
                heapq.heappush(heap, (du + w, edges[eid].head))
    return dist


class OfflineSSSP:
    def __init__(self, n: int, source: int, delta: int, xi: float, collection: EstimateCollection):
        self.n = n
        self.source = source
        self.delta = delta
        self.xi = xi
        self.D = collection
        self.costly = [0] * n
        self.calls = 0
        self.max_depth = 0

    @classmethod
    def build(cls, g0: DynGraph, updates: Iterable[Update], eps: float, source: int = 0) -> "OfflineSSSP":
        if not 0 < eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        g = g0.copy()
        base_time = g.current_time
        updates = list(updates)
        for upd in updates:
            g.apply_update(upd)
        if base_time:
            raise ValueError("initial graph must be version 0")
        delta = len(updates)
        xi = eps / (2 * math.log2(max(delta, 1)) + 2)
        out = cls(g.n, source, delta, xi, EstimateCollection(g.n))
        out.graph = g
        first = _dijkstra_version(g, source, 0)
        last = first if delta == 0 else _dijkstra_version(g, source, delta)
        for v in range(g.n):
            out.D.add(v, 0, first[v])
            if delta:
                out.D.add(v, delta, last[v])
        out._search(0, delta, range(g.n), 0)
        return out

    def _search(self, alpha: int, beta: int, candidates: Iterable[int], depth: int) -> None:
        if alpha > beta:
            return
        self.calls += 1
        self.max_depth = max(self.max_depth, depth)
        if not candidates:
            # children would only ever see subsets of the empty X
            return
        D = self.D
        slack = 1.0 + self.xi
        X = [u for u in candidates if D.prefix_min(u, alpha) > slack * D.suffix_max(u, beta)]
        gamma = (alpha + beta) // 2
        if X:
            for u in X:
                self.costly[u] += 1
            for v, val in self._solve_version(X, alpha, gamma).items():
                D.add(v, gamma, val)
        self._search(alpha, gamma - 1, X, depth + 1)
        self._search(gamma + 1, beta, X, depth + 1)

    def _solve_version(self, X: list[int], alpha: int, gamma: int) -> dict[int, float]:
        """Dijkstra on version ``gamma`` restricted to ``X``, seeded from outside ``X``."""
        g = self.graph
        edges = g.edges
        inside = set(X)
        dist = {}
        heap = []
        for v in X:
            best = INF
            for eid in g.in_adjacency[v]:
                rec = edges[eid]
                if rec.tail in inside:
                    continue
                w = rec.weight_at(gamma)
                if w is not None:
                    cand = self.D.prefix_min(rec.tail, alpha) + w
                    if cand < best:
                        best = cand
            dist[v] = best
            if best < INF:
                heap.append((best, v))
        heapq.heapify(heap)
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done or du != dist[u]:
                continue
            done.add(u)
            for eid in g.out_adjacency[u]:
                rec = edges[eid]
                v = rec.head
                if v not in inside:
                    continue
                w = rec.weight_at(gamma)
                if w is not None and du + w < dist[v]:
                    dist[v] = du + w
                    heapq.heappush(heap, (du + w, v))
        return dist

    def query(self, v: int, j: int) -> float:
        if not 0 <= j <= self.delta:
            raise ValueError(f"version {j} outside [0, {self.delta}]")
        return self.D.prefix_min(v, j)

    def costly_bound(self, W: float) -> float:
        """Per-vertex bound on costly calls: (1 + log_{1+xi}(nW)) * log2(delta)."""
        return (1 + math.log(self.n * W) / math.log1p(self.xi)) * math.log2(max(self.delta, 2))

    # serialization -------------------------------------------------------

    def dump(self, fh: TextIO) -> None:
        fh.write(f"{self.n} {self.delta} {self.xi!r} {self.source}\n")
        for v in range(self.n):
            items = " ".join(f"{ts} {val!r}" for ts, val in self.D.entries[v])
            fh.write(f"{v} {self.D.size(v)} {items}\n".rstrip() + "\n")

    @classmethod
    def load(cls, fh: TextIO) -> "OfflineSSSP":
        header = fh.readline().split()
        n, delta, xi = int(header[0]), int(header[1]), float(header[2])
        source = int(header[3]) if len(header) > 3 else 0
        coll = EstimateCollection(n)
        for _ in range(n):
            toks = fh.readline().split()
            v, k = int(toks[0]), int(toks[1])
            coll.entries[v] = [(int(toks[2 + 2 * i]), float(toks[3 + 2 * i])) for i in range(k)]
        return cls(n, source, delta, xi, coll)
