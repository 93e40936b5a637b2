"""Bipartitions whose crossing graph stays highly edge-connected."""

from __future__ import annotations

import logging
from collections import deque

from ydecomp.connectivity.mincut import min_cut
from ydecomp.errors import InsufficientConnectivity, InternalInvariantViolation
from ydecomp.graph_core import Bipartition, MultiGraph

log = logging.getLogger(__name__)


def _bfs_greedy_sides(g: MultiGraph) -> list[int]:
    """Place vertices in BFS order on the side opposite to most already-placed neighbours.

    On a connected bipartite graph this reproduces its 2-colouring.
    """
    n = g.vertex_count
    side = [-1] * n
    for root in range(n):
        if side[root] != -1:
            continue
        queue = deque([root])
        order_seen = {root}
        while queue:
            x = queue.popleft()
            counts = [0, 0]
            for e in g.incident(x):
                y = g.other(e, x)
                if side[y] != -1:
                    counts[side[y]] += 1
            side[x] = 1 if counts[0] > counts[1] else 0
            for y in sorted(g.neighbors(x)):
                if y not in order_seen and side[y] == -1:
                    order_seen.add(y)
                    queue.append(y)
    return side


class _FlipState:
    def __init__(self, g: MultiGraph, side: list[int]):
        self.g = g
        self.side = side
        self.same = [0] * g.vertex_count
        self.crossing = 0
        for e, u, v in g.edge_list():
            if side[u] == side[v]:
                self.same[u] += 1
                self.same[v] += 1
            else:
                self.crossing += 1

    def gain(self, v: int) -> int:
        return 2 * self.same[v] - self.g.degree(v)

    def flip(self, v: int) -> None:
        g, side, same = self.g, self.side, self.same
        for e in g.incident(v):
            w = g.other(e, v)
            if side[w] == side[v]:
                same[w] -= 1
                same[v] -= 1
                self.crossing += 1
            else:
                same[w] += 1
                same[v] += 1
                self.crossing -= 1
        side[v] ^= 1

    def local_search(self) -> int:
        """Flip the lowest-index improving vertex until none improves; returns the flip count."""
        flips = 0
        n = self.g.vertex_count
        dirty = deque(range(n))
        queued = [True] * n
        while dirty:
            # lowest index first: drain in sorted batches
            batch = sorted(dirty)
            dirty.clear()
            for v in batch:
                queued[v] = False
            for v in batch:
                if self.gain(v) > 0:
                    self.flip(v)
                    flips += 1
                    for e in self.g.incident(v):
                        w = self.g.other(e, v)
                        if not queued[w]:
                            queued[w] = True
                            dirty.append(w)
        return flips


def max_cut_bipartition(g: MultiGraph, k: int, *, check: bool = True) -> Bipartition:
    """Bipartition whose crossing graph is ``k``-edge-connected, for a ``(2k-1)``-edge-connected ``g``.

    Local max-cut flips reach a state where every vertex has at least half its
    degree crossing.  If some cut ``S`` of the crossing graph still has fewer
    than ``k`` edges, swapping the sides of all of ``S`` strictly increases the
    crossing count (the ``G``-cut of ``S`` has at least ``2k-1`` edges), so
    alternating the two moves terminates.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = g.vertex_count
    if n < 2:
        raise InsufficientConnectivity(2 * k - 1, 0)
    if check:
        lam = min_cut(g)[0]
        if lam < 2 * k - 1:
            raise InsufficientConnectivity(2 * k - 1, lam)
    state = _FlipState(g, _bfs_greedy_sides(g))
    rounds = 0
    while True:
        state.local_search()
        crossing = [e for e, u, v in g.edge_list() if state.side[u] != state.side[v]]
        value, cut = min_cut(g, crossing)
        if value >= k:
            break
        before = state.crossing
        for v in sorted(cut):
            state.flip(v)
        rounds += 1
        log.debug("max-cut repair round %d: crossing cut %d < %d, crossing %d -> %d",
                  rounds, value, k, before, state.crossing)
        if state.crossing <= before:
            raise InternalInvariantViolation(
                f"flipping a {value}-edge crossing cut did not increase the crossing count"
            )
    return Bipartition(tuple(state.side), frozenset(crossing))
