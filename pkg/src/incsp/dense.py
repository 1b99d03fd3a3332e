"""Small incremental all-pairs structure used on the per-phase endpoint graph.

Exact O(k^2)-per-update maintenance over a fixed number of slots, wrapped in a
(1+xi) input filter (updates that do not beat the accepted weight by that
factor are dropped) and a (1+xi) emission filter (a pair is reported to
consumers only when its estimate beat the last reported value by that factor).
Reported values are therefore within (1+xi)^2 of the true distances.
"""
from __future__ import annotations

import numpy as np


class DenseAPSP:
    def __init__(self, slot_count: int, xi: float):
        if slot_count < 1:
            raise ValueError("slot_count must be >= 1")
        self.slot_count = k = slot_count
        self.xi = xi
        self.est = np.full((k, k), np.inf)
        np.fill_diagonal(self.est, 0.0)
        self.accepted = np.full((k, k), np.inf)
        self.last_emitted = self.est.copy()
        self.accepted_updates = 0
        self.accepted_per_pair = np.zeros((k, k), dtype=np.int64)

    def estimate(self, u: int, v: int) -> float:
        return float(self.est[u, v])

    def emitted(self, u: int, v: int) -> float:
        return float(self.last_emitted[u, v])

    def update(self, u: int, v: int, w: float) -> list[tuple[int, int, float]]:
        """Offer edge ``uv`` with weight ``w``; returns the emitted ``(x, y, value)`` changes."""
        if w < 0:
            raise ValueError("negative weight")
        if u == v or not w * (1.0 + self.xi) < self.accepted[u, v]:
            return []
        self.accepted[u, v] = w
        self.accepted_updates += 1
        self.accepted_per_pair[u, v] += 1
        est = self.est
        through = est[:, u][:, None] + w + est[v, :][None, :]
        np.minimum(est, through, out=est)
        mask = est * (1.0 + self.xi) < self.last_emitted
        if not mask.any():
            return []
        xs, ys = np.nonzero(mask)
        self.last_emitted[mask] = est[mask]
        return [(int(x), int(y), float(est[x, y])) for x, y in zip(xs, ys)]
