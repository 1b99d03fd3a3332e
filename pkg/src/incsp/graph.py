"""Dynamic weighted digraphs under insertions and weight decreases.

Every edge keeps its full weight history so that any earlier version of the
graph can be reconstructed; the offline structure depends on this.
"""
from __future__ import annotations

import bisect
import enum
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class UpdateError(ValueError):
    """Raised when an update is malformed or would increase a weight."""


class UpdateKind(enum.Enum):
    INSERT = "+"
    DECREASE = "~"


@dataclass(frozen=True)
class Update:
    kind: UpdateKind
    tail: int
    head: int
    weight: float

    @classmethod
    def insert(cls, tail: int, head: int, weight: float) -> "Update":
        return cls(UpdateKind.INSERT, tail, head, float(weight))

    @classmethod
    def decrease(cls, tail: int, head: int, weight: float) -> "Update":
        return cls(UpdateKind.DECREASE, tail, head, float(weight))


UpdateSequence = list  # list[Update]


def valid_weight(w: float, W: float | None = None) -> bool:
    """True if ``w`` lies in {0} ∪ [1, W]."""
    if not math.isfinite(w):
        return False
    if w == 0:
        return True
    return w >= 1 and (W is None or w <= W)


@dataclass
class EdgeRecord:
    tail: int
    head: int
    history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def weight(self) -> float:
        return self.history[-1][1]

    @property
    def inserted_at(self) -> int:
        return self.history[0][0]

    def weight_at(self, t: int) -> float | None:
        # history timestamps are strictly increasing
        i = bisect.bisect_right(self.history, (t, math.inf)) - 1
        if i < 0:
            return None
        return self.history[i][1]


class DynGraph:
    """Adjacency-list digraph on vertices ``0..n-1`` with parallel edges.

    ``current_time`` counts applied updates; the initial graph is version 0.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = ()):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        self.edges: list[EdgeRecord] = []
        self.out_adjacency: list[list[int]] = [[] for _ in range(n)]
        self.in_adjacency: list[list[int]] = [[] for _ in range(n)]
        self._pairs: dict[tuple[int, int], list[int]] = {}
        self.current_time = 0
        for u, v, w in edges:
            self.add_edge(u, v, w)

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise UpdateError(f"vertex {v} out of range [0, {self.n})")

    def add_edge(self, u: int, v: int, w: float) -> int:
        """Insert an edge stamped with the current time; returns its index."""
        self._check_vertex(u)
        self._check_vertex(v)
        w = float(w)
        if not valid_weight(w):
            raise UpdateError(f"weight {w} outside {{0}} ∪ [1, W]")
        eid = len(self.edges)
        self.edges.append(EdgeRecord(u, v, [(self.current_time, w)]))
        self.out_adjacency[u].append(eid)
        self.in_adjacency[v].append(eid)
        self._pairs.setdefault((u, v), []).append(eid)
        return eid

    def lightest_edge(self, u: int, v: int) -> int | None:
        eids = self._pairs.get((u, v))
        if not eids:
            return None
        return min(eids, key=lambda e: (self.edges[e].weight, e))

    def pair_weight(self, u: int, v: int) -> float:
        eid = self.lightest_edge(u, v)
        return math.inf if eid is None else self.edges[eid].weight

    def apply_update(self, upd: Update) -> int:
        """Apply ``upd`` as the next version and return the affected edge."""
        self._check_vertex(upd.tail)
        self._check_vertex(upd.head)
        if not valid_weight(upd.weight):
            raise UpdateError(f"weight {upd.weight} outside {{0}} ∪ [1, W]")
        if upd.kind is UpdateKind.INSERT:
            self.current_time += 1
            return self.add_edge(upd.tail, upd.head, upd.weight)
        eid = self.lightest_edge(upd.tail, upd.head)
        if eid is None:
            raise UpdateError(f"decrease of missing edge ({upd.tail}, {upd.head})")
        rec = self.edges[eid]
        if not upd.weight < rec.weight:
            raise UpdateError(
                f"decrease of ({upd.tail}, {upd.head}) to {upd.weight} "
                f"does not lower current weight {rec.weight}"
            )
        self.current_time += 1
        rec.history.append((self.current_time, float(upd.weight)))
        return eid

    def weight_at(self, eid: int, t: int) -> float | None:
        return self.edges[eid].weight_at(t)

    def out_edges(self, u: int) -> Iterator[tuple[int, float]]:
        for eid in self.out_adjacency[u]:
            rec = self.edges[eid]
            yield rec.head, rec.weight

    def in_edges(self, v: int) -> Iterator[tuple[int, float]]:
        for eid in self.in_adjacency[v]:
            rec = self.edges[eid]
            yield rec.tail, rec.weight

    @property
    def m(self) -> int:
        return len(self.edges)

    def max_weight(self) -> float:
        return max((rec.weight for rec in self.edges), default=0.0)

    def copy(self) -> "DynGraph":
        g = DynGraph(self.n)
        g.current_time = self.current_time
        for rec in self.edges:
            eid = len(g.edges)
            g.edges.append(EdgeRecord(rec.tail, rec.head, list(rec.history)))
            g.out_adjacency[rec.tail].append(eid)
            g.in_adjacency[rec.head].append(eid)
            g._pairs.setdefault((rec.tail, rec.head), []).append(eid)
        return g

    def snapshot(self, t: int | None = None) -> list[tuple[int, int, float]]:
        """Edge list of version ``t`` (default: current)."""
        out = []
        for rec in self.edges:
            w = rec.weight if t is None else rec.weight_at(t)
            if w is not None:
                out.append((rec.tail, rec.head, w))
        return out

    def check_invariants(self) -> None:
        """Raise AssertionError if internal bookkeeping is inconsistent."""
        outs = sorted(e for lst in self.out_adjacency for e in lst)
        ins = sorted(e for lst in self.in_adjacency for e in lst)
        assert outs == ins == list(range(len(self.edges)))
        for eid, rec in enumerate(self.edges):
            assert eid in self.out_adjacency[rec.tail]
            assert eid in self.in_adjacency[rec.head]
            ts = [t for t, _ in rec.history]
            ws = [w for _, w in rec.history]
            assert all(a < b for a, b in zip(ts, ts[1:])), rec
            assert all(a > b for a, b in zip(ws, ws[1:])), rec
            assert all(valid_weight(w) for w in ws), rec
            assert ts[-1] <= self.current_time


class Digraph:
    """Plain current-weight adjacency with parallel edges collapsed to the minimum.

    This is the representation the online structures propagate over.
    """

    def __init__(self, n: int):
        self.n = n
        self.out: list[dict[int, float]] = [{} for _ in range(n)]
        self.edge_count = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], reverse: bool = False) -> "Digraph":
        g = cls(n)
        for u, v, w in edges:
            if reverse:
                u, v = v, u
            g.add(u, v, w)
        return g

    def add(self, u: int, v: int, w: float) -> bool:
        """Add or lower edge ``uv``; returns True if a new pair appeared."""
        row = self.out[u]
        old = row.get(v)
        if old is None:
            row[v] = float(w)
            self.edge_count += 1
            return True
        if w < old:
            row[v] = float(w)
        return False

    def out_edges(self, u: int):
        return self.out[u].items()

    def outdeg(self, u: int) -> int:
        return len(self.out[u])


def filter_decreases(
    updates: Sequence[Update],
    eps: float,
    initial: Iterable[tuple[int, int, float]] = (),
) -> list[Update]:
    """Drop decreases that do not lower the recorded weight by a factor above 1+eps.

    Inserts are always kept and may themselves lower the recorded weight of a
    pair. ``initial`` seeds the recorded weights with the version-0 edges.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    recorded: dict[tuple[int, int], float] = {}
    for u, v, w in initial:
        recorded[(u, v)] = min(recorded.get((u, v), math.inf), w)
    kept = []
    for upd in updates:
        key = (upd.tail, upd.head)
        if upd.kind is UpdateKind.INSERT:
            recorded[key] = min(recorded.get(key, math.inf), upd.weight)
            kept.append(upd)
        elif upd.weight * (1 + eps) < recorded.get(key, math.inf):
            recorded[key] = upd.weight
            kept.append(upd)
    return kept


def _random_weight(rng: random.Random, W: int) -> float:
    if rng.random() < 0.05:
        return 0.0
    return float(rng.randint(1, W))


def _decrease_target(rng: random.Random, cur: float) -> float:
    # integer weights in {0} ∪ [1, cur-1]
    if cur <= 1 or rng.random() < 0.05:
        return 0.0
    return float(rng.randint(1, int(math.ceil(cur)) - 1))


def generate_random_sequence(
    n: int,
    m: int,
    W: int,
    delta: int,
    seed: int,
    *,
    source: int | None = None,
    decrease_fraction: float = 0.3,
) -> tuple[DynGraph, list[Update]]:
    """Random initial graph with ``m`` edges followed by ``delta`` valid updates.

    With ``source`` set, every update touches an edge leaving ``source``; this is
    the workload of the source-insertion structure. Weights are integers so all
    sums stay exact in floating point.
    """
    if min(n, W) < 1 or m < 0 or delta < 0:
        raise ValueError("parameters must be positive")
    rng = random.Random(seed)
    g = DynGraph(n)
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n - 1) if n > 1 else 0
        if n > 1 and v >= u:
            v += 1
        g.add_edge(u, v, _random_weight(rng, W))
    base = g.copy()
    updates: list[Update] = []
    while len(updates) < delta:
        if source is None:
            u = rng.randrange(n)
        else:
            u = source
        v = rng.randrange(n)
        if v == u and n > 1:
            continue
        cur = g.pair_weight(u, v)
        if rng.random() < decrease_fraction and 0 < cur < math.inf:
            upd = Update.decrease(u, v, _decrease_target(rng, cur))
        else:
            upd = Update.insert(u, v, _random_weight(rng, W))
        g.apply_update(upd)
        updates.append(upd)
    return base, updates


def replay(g: DynGraph, updates: Iterable[Update]) -> DynGraph:
    """Apply ``updates`` to a copy of ``g``."""
    h = g.copy()
    for upd in updates:
        h.apply_update(upd)
    return h
