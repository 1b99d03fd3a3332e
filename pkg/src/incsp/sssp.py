"""Incremental SSSP under insertions of edges leaving the source.

Estimates are kept within ``(1 + xi) ** (1 + rho + log2 m)`` of the true
distances by tracking, for each vertex, a rank ``k`` such that the vertex is
``(rho + k)``-certified, and by rebalancing rank classes whenever a low class
gets lighter (in total degree) than everything above it.

Unreachable vertices hold ``inf``. Because the slack invariant forces every
edge out of a reachable vertex to make its head finite, reachability is
maintained by the propagation itself and needs no separate structure.
"""
from __future__ import annotations

import heapq
import math
from typing import Callable, Iterable

import numpy as np

from .graph import Digraph, DynGraph
from .propagate import (
    INF,
    XI_MIN,
    EstimateVector,
    PDStats,
    ell,
    propagate_dijkstra,
    relax_insert,
)


def dijkstra(graph, n: int, s: int) -> list[float]:
    """Exact distances from ``s`` over any graph exposing ``out_edges``."""
    dist = [INF] * n
    dist[s] = 0.0
    heap = [(0.0, s)]
    while heap:
        du, u = heapq.heappop(heap)
        if du != dist[u]:
            continue
        for v, w in graph.out_edges(u):
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def default_xi(eps: float, m: int) -> float:
    """Per-step slack giving overall (1+eps) accuracy when ranks stay below log2 m."""
    return eps / (2 * math.log2(max(m, 2)) + 2)


class _SourceView:
    """The structure's graph: a (possibly shared) base plus its own source edges."""

    __slots__ = ("base", "source", "source_out")

    def __init__(self, base: Digraph, source: int):
        self.base = base
        self.source = source
        self.source_out: dict[int, float] = {}

    def out_edges(self, u: int):
        if u == self.source:
            yield from self.base.out[u].items()
            yield from self.source_out.items()
        else:
            yield from self.base.out[u].items()

    def degree(self, u: int) -> int:
        # +1 stands for the virtual source edge into u, so every vertex has degree >= 1
        deg = 1 + len(self.base.out[u])
        if u == self.source:
            deg += len(self.source_out)
        return deg


class SourceSSSP:
    """Approximate distances from ``source`` under source-edge insertions.

    ``graph`` may be a :class:`DynGraph` (copied) or a :class:`Digraph`
    (used in place, so several structures can share one base graph).
    """

    def __init__(self, graph: DynGraph | Digraph, source: int, xi: float, W: float | None = None):
        if not XI_MIN <= xi < 1:
            raise ValueError(f"xi must lie in [2^-20, 1), got {xi}")
        if isinstance(graph, DynGraph):
            base = Digraph.from_edges(graph.n, graph.snapshot())
        else:
            base = graph
        self.n = n = base.n
        self.source = source
        self.xi = xi
        self.view = _SourceView(base, source)
        if W is None:
            W = max([1.0] + [w for row in base.out for w in row.values()])
        self.W = W
        self.ell = ell(n, W, xi)
        self.stats = PDStats()

        self.rank = [0] * n
        self.rank_increases = [0] * n
        self.classes: list[set[int]] = [set(range(n))]
        self._deg = [self.view.degree(v) for v in range(n)]
        self.class_degree = [sum(self._deg)]
        self.r = 0
        self.rho = 0
        self.sync_inputs = 0

        self._log_base = math.log1p(xi)
        self.buckets: dict[int, set[int]] = {}
        self.bucket_degree: dict[int, int] = {}
        self.changed: set[int] = set()
        # test hooks: called with the touched set after each propagation,
        # and with no arguments whenever Synchronize completes
        self.on_propagate: Callable[[set[int]], None] | None = None
        self.on_synchronize: Callable[[], None] | None = None

        self.est = EstimateVector(dijkstra(self.view, n, source), listener=self._on_change)
        for v in range(n):
            self._bucket_add(v, self.est.d[v])

    # bookkeeping ---------------------------------------------------------

    @property
    def graph(self) -> _SourceView:
        return self.view

    @property
    def d(self) -> list[float]:
        return self.est.d

    @property
    def m(self) -> int:
        """Total degree; the edge count including one virtual source edge per vertex."""
        return sum(self.class_degree)

    def _bucket_index(self, x: float) -> int | None:
        if x == INF:
            return None
        if x == 0:
            return -1
        return math.floor(math.log(x) / self._log_base)

    def _bucket_add(self, v: int, x: float) -> None:
        b = self._bucket_index(x)
        if b is not None:
            self.buckets.setdefault(b, set()).add(v)
            self.bucket_degree[b] = self.bucket_degree.get(b, 0) + self._deg[v]

    def _bucket_remove(self, v: int, x: float) -> None:
        b = self._bucket_index(x)
        if b is not None:
            members = self.buckets[b]
            members.discard(v)
            self.bucket_degree[b] -= self._deg[v]
            if not members:
                del self.buckets[b]
                del self.bucket_degree[b]

    def _on_change(self, v: int, old: float, new: float) -> None:
        self.changed.add(v)
        ob, nb = self._bucket_index(old), self._bucket_index(new)
        if ob != nb:
            self._bucket_remove(v, old)
            self._bucket_add(v, new)

    def _refresh_degree(self, v: int) -> None:
        new = self.view.degree(v)
        delta = new - self._deg[v]
        if delta:
            b = self._bucket_index(self.est.d[v])
            self._deg[v] = new
            self.class_degree[self.rank[v]] += delta
            if b is not None:
                self.bucket_degree[b] += delta

    def _set_rank(self, v: int, k: int) -> None:
        old = self.rank[v]
        if old == k:
            return
        while len(self.classes) <= k:
            self.classes.append(set())
            self.class_degree.append(0)
        self.classes[old].discard(v)
        self.class_degree[old] -= self._deg[v]
        self.classes[k].add(v)
        self.class_degree[k] += self._deg[v]
        self.rank[v] = k
        if k > old:
            self.rank_increases[v] += 1

    def _trim(self) -> None:
        r = len(self.classes) - 1
        while r > 0 and not self.classes[r]:
            self.classes.pop()
            self.class_degree.pop()
            r -= 1
        self.r = r

    def _propagate(self, inputs: Iterable[int]) -> set[int]:
        touched = propagate_dijkstra(self.view, self.est, inputs, self.xi, self.stats, self._deg.__getitem__)
        if self.on_propagate is not None:
            self.on_propagate(touched)
        return touched

    def pop_changes(self) -> set[int]:
        """Vertices whose estimate changed since the previous call."""
        out, self.changed = self.changed, set()
        return out

    # public operations ---------------------------------------------------

    def estimate(self, v: int) -> float:
        return self.est.d[v]

    def reachable(self, v: int) -> bool:
        return self.est.d[v] < INF

    def source_weight(self, v: int) -> float:
        return self.view.source_out.get(v, INF)

    def source_insert(self, v: int, w: float) -> bool:
        """Insert (or lower) the source edge ``s -> v``.

        Returns True when the estimate of ``v`` dropped and propagation ran.
        """
        w = float(w)
        if not (w == 0 or w >= 1) or math.isnan(w):
            raise ValueError(f"weight {w} outside {{0}} ∪ [1, W]")
        if v == self.source or w == INF:
            return False
        so = self.view.source_out
        old = so.get(v)
        if old is None:
            so[v] = w
            self._refresh_degree(self.source)
        elif w < old:
            so[v] = w
        d = self.est.d
        if not d[v] > (1.0 + self.xi) * w:
            return False
        self.est.lower(v, w, drop=True)
        touched = self._propagate((v,))
        self.r += 1
        for u in touched:
            self._set_rank(u, self.r)
        self._trim()
        self.synchronize()
        return True

    def _unbalanced_class(self) -> int | None:
        # largest k with deg(C_k) <= deg(C_{k+1}) + ... + deg(C_r)
        suffix = 0
        for k in range(self.r, -1, -1):
            if self.class_degree[k] <= suffix:
                return k
            suffix += self.class_degree[k]
        return None

    def synchronize(self) -> None:
        while (k := self._unbalanced_class()) is not None:
            inputs = set().union(*self.classes[k:])
            self.sync_inputs += len(inputs)
            touched = self._propagate(inputs)
            for u in touched:
                self._set_rank(u, k)
            self._trim()
        if self.on_synchronize is not None:
            self.on_synchronize()

    def class_balance_ok(self) -> bool:
        """deg(C_k) > sum of higher classes for every k <= r."""
        return self._unbalanced_class() is None and self.r <= math.log2(self.m)

    def batch_insert(self, edges: Iterable[tuple[int, int, float]], alpha: int, *, in_graph: bool = False) -> None:
        """Insert arbitrary edges, given that estimates are already
        ``(1 + xi) ** alpha``-accurate for the graph with those edges added.

        With ``in_graph=True`` the edges are assumed to be in the (shared)
        base graph already and only the estimates are repaired.
        """
        edges = list(edges)
        base = self.view.base
        if not in_graph:
            for u, v, w in edges:
                base.add(u, v, w)
        for u in {u for u, _, _ in edges}:
            self._refresh_degree(u)
        for u, v, w in edges:
            touched = relax_insert(self.view, self.est, u, v, w, self.xi, self.stats, self._deg.__getitem__)
            if touched and self.on_propagate is not None:
                self.on_propagate(touched)
        self.rho = int(alpha)

    def _zero_ranks(self) -> None:
        for v in range(self.n):
            self._set_rank(v, 0)
        self._trim()

    def det_reset(self) -> None:
        """Propagate from every vertex, making all of them 0-certified."""
        self._propagate(range(self.n))
        self._zero_ranks()
        self.rho = 0

    def _interval_members(self, lo_exp: float, hi_exp: float) -> tuple[int, Callable[[], list[int]]]:
        """Total degree of ``{v : (1+xi)^lo <= d(v) <= (1+xi)^hi}`` and a thunk listing it."""
        base = 1.0 + self.xi
        lo, hi = base**lo_exp, base**hi_exp
        ilo, ihi = math.floor(lo_exp), math.floor(hi_exp)
        d = self.est.d
        inner: list[int] = []
        edge_members: list[int] = []
        degree = 0
        for b, members in self.buckets.items():
            if b == -1:
                continue  # zero estimates lie below every interval
            if ilo + 2 <= b <= ihi - 2:
                inner.append(b)
                degree += self.bucket_degree[b]
            elif ilo - 1 <= b <= ihi + 1:
                for v in members:
                    if lo <= d[v] <= hi:
                        edge_members.append(v)
                        degree += self._deg[v]

        def materialize() -> list[int]:
            out = list(edge_members)
            for b in inner:
                out.extend(self.buckets[b])
            return out

        return degree, materialize

    def rand_reset(self, lam: int, rng: np.random.Generator, c: float = 2.0) -> set[int]:
        """Randomized reset leaving every vertex ``lam``-certified with high probability.

        Returns the propagated set ``Z``.
        """
        lam = int(lam)
        if not 1 <= lam <= self.ell:
            raise ValueError(f"lambda must lie in [1, {self.ell}], got {lam}")
        iterations = math.ceil(c * (25 * self.ell / lam) * math.log2(max(self.n, 2)))
        js = np.unique(rng.integers(0, lam // 8 + 1, size=iterations))
        width = 8 * self.ell / lam
        limit = 400 * self.m * self.ell / lam**2
        Z: set[int] = set()
        for j in js.tolist():
            degree, members = self._interval_members(j * width, (j + 2) * width)
            if degree <= limit:
                Z.update(members())
        self._propagate(Z)
        self.rho = lam
        return Z

    # diagnostics -----------------------------------------------------------

    def bound_exponent(self) -> float:
        """Exponent e with d(v) <= (1+xi)^e dist(s, v) guaranteed right now."""
        return 1 + self.rho + self.r
