"""Estimate vectors and the slack-tolerant Dijkstra propagation.

``propagate_dijkstra`` lowers estimates like Dijkstra's algorithm but leaves a
vertex alone unless its estimate would drop by more than a factor ``1 + xi``
(or it is already queued). Every structure in the package is built on it.

Graphs are duck-typed: anything with ``out_edges(u)`` yielding ``(v, w)`` pairs.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

INF = math.inf
XI_MIN = 2.0**-20


def ell(n: int, W: float, xi: float) -> int:
    """Number of (1+xi)-factor drops an estimate in {0} ∪ [1, nW] can take."""
    return max(1, math.ceil(math.log(max(n * W, 2.0)) / math.log1p(xi)))


@dataclass
class PDStats:
    pops: int = 0
    pushes: int = 0
    edge_scans: int = 0
    touched_degree_sum: int = 0
    inputs: int = 0
    calls: int = 0


class EstimateVector:
    """Per-vertex estimates that never increase.

    ``drop_count[v]`` counts the times ``d[v]`` fell by more than ``1 + xi`` in
    one step (including the first drop from the unreachable sentinel).
    ``listener(v, old, new)`` is called on every change.
    """

    def __init__(self, d: Iterable[float], listener: Callable[[int, float, float], None] | None = None):
        self.d = [float(x) for x in d]
        self.drop_count = [0] * len(self.d)
        self.listener = listener

    def __len__(self) -> int:
        return len(self.d)

    def __getitem__(self, v: int) -> float:
        return self.d[v]

    def lower(self, v: int, value: float, drop: bool) -> None:
        old = self.d[v]
        if not value < old:
            raise AssertionError(f"estimate of {v} would not decrease ({old} -> {value})")
        self.d[v] = value
        if drop:
            self.drop_count[v] += 1
        if self.listener is not None:
            self.listener(v, old, value)


def propagate_dijkstra(graph, est: EstimateVector, inputs: Iterable[int], xi: float,
                       stats: PDStats | None = None, degree: Callable[[int], int] | None = None) -> set[int]:
    """Run the propagation seeded with ``inputs``; return every vertex ever queued.

    Ties between equal keys pop the smaller vertex id first. Decrease-key is
    done by re-pushing and skipping stale heap entries.
    """
    d = est.d
    slack = 1.0 + xi
    touched = set(inputs)
    heap = [(d[v], v) for v in touched]
    heapq.heapify(heap)
    popped: set[int] = set()
    pops = pushes = scans = degsum = 0
    while heap:
        key, u = heapq.heappop(heap)
        if u in popped or key != d[u]:
            continue
        popped.add(u)
        pops += 1
        du = d[u]
        if degree is not None:
            degsum += degree(u)
        for v, w in graph.out_edges(u):
            scans += 1
            cand = du + w
            if v in touched:
                if v not in popped and cand < d[v]:
                    est.lower(v, cand, drop=False)
                    heapq.heappush(heap, (cand, v))
            elif d[v] > slack * cand:
                est.lower(v, cand, drop=True)
                touched.add(v)
                pushes += 1
                heapq.heappush(heap, (cand, v))
    if stats is not None:
        stats.pops += pops
        stats.pushes += pushes
        stats.edge_scans += scans
        stats.touched_degree_sum += degsum
        stats.inputs += len(touched) - pushes
        stats.calls += 1
    return touched


def relax_insert(graph, est: EstimateVector, u: int, v: int, w: float, xi: float,
                 stats: PDStats | None = None, degree: Callable[[int], int] | None = None) -> set[int]:
    """Handle a freshly inserted edge ``uv`` (already present in ``graph``).

    Lowers ``d[v]`` to ``d[u] + w`` and propagates only when the slack
    condition is broken; otherwise nothing changes and an empty set is returned.
    """
    cand = est.d[u] + w
    if est.d[v] > (1.0 + xi) * cand:
        est.lower(v, cand, drop=True)
        return propagate_dijkstra(graph, est, (v,), xi, stats, degree)
    return set()


def slack_violations(graph, d, xi: float, vertices: Iterable[int] | None = None) -> list[tuple[int, int, float]]:
    """Edges ``uv`` with ``d[v] > (1 + xi) * (d[u] + w)``."""
    slack = 1.0 + xi
    bad = []
    for u in range(len(d)) if vertices is None else vertices:
        du = d[u]
        for v, w in graph.out_edges(u):
            if d[v] > slack * (du + w):
                bad.append((u, v, w))
    return bad


def relaxedness_violations(graph, d, touched: Iterable[int]) -> list[tuple[int, int, float]]:
    """Edges inside ``touched`` that are not relaxed (``d[v] > d[u] + w``)."""
    inside = set(touched)
    bad = []
    for u in inside:
        du = d[u]
        for v, w in graph.out_edges(u):
            if v in inside and d[v] > du + w:
                bad.append((u, v, w))
    return bad
