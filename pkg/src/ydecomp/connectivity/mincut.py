"""Global minimum edge cut (Stoer-Wagner) on multigraphs."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ydecomp.graph_core import MultiGraph


def _weight_matrix(g: MultiGraph, edges: Iterable[int] | None) -> np.ndarray:
    n = g.vertex_count
    w = np.zeros((n, n), dtype=np.int64)
    eids = g.edges() if edges is None else edges
    if eids:
        ends = np.array([g.endpoints(e) for e in eids], dtype=np.int64).reshape(-1, 2)
        np.add.at(w, (ends[:, 0], ends[:, 1]), 1)
        np.add.at(w, (ends[:, 1], ends[:, 0]), 1)
    return w


def min_cut(g: MultiGraph, edges: Iterable[int] | None = None) -> tuple[int, frozenset[int]]:
    """Minimum number of edges leaving a proper nonempty vertex subset, and one such subset.

    ``edges`` restricts the graph to a subset of edge ids.  Ties are broken
    deterministically, so the returned side is reproducible.
    """
    n = g.vertex_count
    if n < 2:
        raise ValueError("edge connectivity needs at least 2 vertices")
    w = _weight_matrix(g, None if edges is None else list(edges))
    groups: list[list[int]] = [[v] for v in range(n)]
    active = list(range(n))
    best = None
    best_side: list[int] = []
    while len(active) > 1:
        idx = np.array(active)
        sub = w[np.ix_(idx, idx)]
        k = len(active)
        conn = sub[0].copy()
        added = np.zeros(k, dtype=bool)
        added[0] = True
        conn[0] = -1
        prev, last = 0, 0
        for _ in range(k - 1):
            nxt = int(np.argmax(conn))
            cut_of_phase = int(conn[nxt])
            prev, last = last, nxt
            added[nxt] = True
            conn += sub[nxt]
            conn[added] = -1
        s, t = active[prev], active[last]
        if best is None or cut_of_phase < best:
            best = cut_of_phase
            best_side = list(groups[t])
            if best == 0:
                break
        groups[s].extend(groups[t])
        w[s, :] += w[t, :]
        w[:, s] += w[:, t]
        w[s, s] = 0
        active.remove(t)
    return int(best), frozenset(best_side)


def edge_connectivity(g: MultiGraph, edges: Iterable[int] | None = None) -> int:
    return min_cut(g, edges)[0]


def cut_size(g: MultiGraph, side: Iterable[int], edges: Iterable[int] | None = None) -> int:
    side = set(side)
    eids = g.edges() if edges is None else edges
    count = 0
    for e in eids:
        u, v = g.endpoints(e)
        if (u in side) != (v in side):
            count += 1
    return count
