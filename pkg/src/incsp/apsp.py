"""Incremental (1+eps)-approximate all-pairs shortest paths.

One :class:`SourceSSSP` per source on the graph as of the start of the current
phase, one per sink on the reversed graph, and a small :class:`DenseAPSP` over
the endpoints of the current phase's updates. Estimates flow between the
components through shortcut edges leaving each structure's source; every
``b`` kept updates the phase's edges are batch-inserted everywhere, and every
``p`` phases all per-source structures are reset.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .dense import DenseAPSP
from .graph import Digraph, DynGraph, Update, UpdateKind
from .propagate import INF, XI_MIN
from .sssp import SourceSSSP

DETERMINISTIC = "det"
RANDOMIZED = "rand"


@dataclass
class PhaseState:
    b: int
    p: int
    edges: dict[tuple[int, int], float] = field(default_factory=dict)
    updates: int = 0
    slots: dict[int, int] = field(default_factory=dict)
    index: int = 0
    k: int = 0

    @property
    def vertices(self):
        return self.slots.keys()


@dataclass
class APSPStats:
    updates_seen: int = 0
    updates_kept: int = 0
    events: int = 0
    shortcut_decreases: int = 0
    shortcut_propagations: int = 0
    phases_closed: int = 0
    resets: int = 0


class IncAPSP:
    def __init__(self, graph: DynGraph, eps: float, variant: str = DETERMINISTIC, seed: int = 0,
                 m_hint: int | None = None, W: float | None = None):
        if not 0 < eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        if variant not in (DETERMINISTIC, RANDOMIZED):
            raise ValueError(f"unknown variant {variant!r}")
        self.n = n = graph.n
        self.eps = eps
        self.variant = variant
        self.seed = seed
        # a quarter of the budget goes to filtering weight decreases
        self.eps_inner = eps / 4
        self.graph = graph.copy()
        self.W = W if W is not None else max(1.0, graph.max_weight())
        edges = m_hint if m_hint is not None else graph.m
        # real edges plus one virtual and one shortcut edge per vertex
        self.m_param = m = max(2, edges + 2 * n)
        log_m = math.log2(m)
        log_n = max(1.0, math.log2(n))
        e = self.eps_inner
        b = max(1, math.ceil(math.sqrt(n)))
        if variant == DETERMINISTIC:
            p = max(1, math.ceil(m**0.5 * e**0.5 / (n**0.25 * log_n)))
            self.rho_star = 0
        else:
            p = max(1, math.ceil(m ** (1 / 3) / (n ** (1 / 6) * e ** (1 / 3))))
            self.rho_star = math.ceil(p * log_m)
        self.y = math.ceil(log_m) + 2
        self.xi = max(XI_MIN, e / (10 * p * (log_m + 2)))
        self.phase = PhaseState(b=b, p=p)
        self.stats = APSPStats()
        self._recorded: dict[tuple[int, int], float] = {}
        for rec in graph.edges:
            key = (rec.tail, rec.head)
            self._recorded[key] = min(self._recorded.get(key, INF), rec.weight)

        edges0 = [(u, v, w) for (u, v), w in self._recorded.items()]
        self.base = Digraph.from_edges(n, edges0)
        self.base_rev = Digraph.from_edges(n, edges0, reverse=True)
        W_est = self.W * (1 + eps)
        self.D = [SourceSSSP(self.base, s, self.xi, W=W_est) for s in range(n)]
        self.DR = [SourceSSSP(self.base_rev, t, self.xi, W=W_est) for t in range(n)]
        root = np.random.SeedSequence(seed)
        self._rngs = [np.random.default_rng(s) for s in root.spawn(2 * n)]
        for ds in self.D + self.DR:
            ds.rho = self.rho_star
            ds.pop_changes()
        self.A = DenseAPSP(2 * b, self.xi)
        self._queue: deque = deque()

    # queries -------------------------------------------------------------

    @property
    def rho(self) -> int:
        return self.rho_star + self.phase.k * 4 * self.y

    def query(self, u: int, v: int) -> float:
        return self.D[u].estimate(v)

    def matrix(self) -> np.ndarray:
        return np.array([ds.d for ds in self.D])

    # updates ------------------------------------------------------------

    def update(self, upd: Update) -> bool:
        """Apply one insertion or decrease; returns False if it was filtered out."""
        self.stats.updates_seen += 1
        key = (upd.tail, upd.head)
        rec = self._recorded.get(key, INF)
        if upd.kind is UpdateKind.DECREASE:
            if rec == INF:
                raise ValueError(f"decrease of missing edge {key}")
            if not upd.weight * (1 + self.eps_inner) < rec:
                return False
        self.graph.apply_update(upd)
        self._recorded[key] = min(rec, upd.weight)
        self.stats.updates_kept += 1
        u, v, w = upd.tail, upd.head, upd.weight
        ph = self.phase
        ph.edges[key] = min(ph.edges.get(key, INF), w)
        ph.updates += 1
        self._enter(u)
        self._enter(v)
        self._feed_dense(u, v, w)
        self._drain()
        if ph.updates >= ph.b:
            self.close_phase()
        return True

    def insert(self, u: int, v: int, w: float) -> bool:
        return self.update(Update.insert(u, v, w))

    def decrease(self, u: int, v: int, w: float) -> bool:
        return self.update(Update.decrease(u, v, w))

    # event machinery --------------------------------------------------------

    def _enter(self, x: int) -> None:
        ph = self.phase
        if x in ph.slots:
            return
        ph.slots[x] = len(ph.slots)
        # shortcuts into x in every forward structure, and out of x in every reverse one
        dx, drx = self.D[x], self.DR[x]
        for s in range(self.n):
            self._forward_shortcut(s, x, drx.estimate(s))
            self._reverse_shortcut(s, x, dx.estimate(s))
        for y in ph.slots:
            if y != x:
                self._feed_dense(y, x, self.D[y].estimate(x))
                self._feed_dense(x, y, dx.estimate(y))

    def _feed_dense(self, u: int, v: int, w: float) -> None:
        if w == INF:
            return
        slots = self.phase.slots
        for x, y, val in self.A.update(slots[u], slots[v], w):
            self._queue.append(("dense", x, y, val))

    def _apply_shortcut(self, ds: SourceSSSP, v: int, w: float) -> set[int]:
        if w == INF or v == ds.source or not w < ds.source_weight(v):
            return set()
        self.stats.shortcut_decreases += 1
        if ds.source_insert(v, w):
            self.stats.shortcut_propagations += 1
        return ds.pop_changes()

    def _forward_shortcut(self, s: int, t: int, w: float) -> None:
        """Lower shortcut s->t in the forward structure of s."""
        changed = self._apply_shortcut(self.D[s], t, w)
        if changed and s in self.phase.slots:
            self._queue.extend(("fwd", s, x) for x in changed)

    def _reverse_shortcut(self, t: int, s: int, w: float) -> None:
        """Lower the reversed shortcut t->s (an s->t walk) in the sink structure of t."""
        changed = self._apply_shortcut(self.DR[t], s, w)
        if changed and t in self.phase.slots:
            self._queue.extend(("rev", t, x) for x in changed)

    def _drain(self) -> None:
        q = self._queue
        slots_of = self.phase.slots
        inv = None
        while q:
            ev = q.popleft()
            self.stats.events += 1
            tag = ev[0]
            if tag == "fwd":
                _, s, t = ev
                val = self.D[s].estimate(t)
                self._reverse_shortcut(t, s, val)
                if t in slots_of:
                    self._feed_dense(s, t, val)
            elif tag == "rev":
                _, t, s = ev
                self._forward_shortcut(s, t, self.DR[t].estimate(s))
            else:
                if inv is None:
                    inv = {slot: x for x, slot in slots_of.items()}
                _, x, y, val = ev
                a, b = inv[x], inv[y]
                self._forward_shortcut(a, b, val)
                self._reverse_shortcut(b, a, val)

    # phases ---------------------------------------------------------------

    def close_phase(self) -> None:
        """Batch-insert the phase's edges everywhere and start a new phase."""
        ph = self.phase
        if not ph.edges:
            return
        F = [(u, v, w) for (u, v), w in ph.edges.items()]
        for u, v, w in F:
            self.base.add(u, v, w)
            self.base_rev.add(v, u, w)
        alpha = self.rho_star + (ph.k + 1) * 4 * self.y
        F_rev = [(v, u, w) for u, v, w in F]
        for ds in self.D:
            ds.batch_insert(F, alpha, in_graph=True)
            ds.pop_changes()
        for ds in self.DR:
            ds.batch_insert(F_rev, alpha, in_graph=True)
            ds.pop_changes()
        ph.k += 1
        ph.index += 1
        ph.edges = {}
        ph.updates = 0
        ph.slots = {}
        self.A = DenseAPSP(2 * ph.b, self.xi)
        self.stats.phases_closed += 1
        if ph.k >= ph.p:
            self.reset_all()

    def reset_all(self) -> None:
        structures = self.D + self.DR
        if self.variant == DETERMINISTIC:
            for ds in structures:
                ds.det_reset()
                ds.pop_changes()
        else:
            for ds, rng in zip(structures, self._rngs):
                ds.rand_reset(min(max(1, self.rho_star), ds.ell), rng)
                ds.pop_changes()
        self.phase.k = 0
        self.stats.resets += 1

    def flush(self) -> None:
        """Close a partially filled phase (end of an update sequence)."""
        self.close_phase()
