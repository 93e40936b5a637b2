"""Spanning trees whose degrees respect ``ceil(d(v)/m) + 2``."""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, Sequence

from ydecomp.errors import BoundedTreeSearchExhausted, PackingFailed
from ydecomp.graph_core import MultiGraph

log = logging.getLogger(__name__)


def degree_bound(degree: int, m: int) -> int:
    return -(-degree // m) + 2


class _TreeState:
    def __init__(self, g: MultiGraph, eids: list[int]):
        self.g = g
        self.eids = eids
        self.tree: set[int] = set()
        self.tdeg = [0] * g.vertex_count
        self.tadj: list[set[int]] = [set() for _ in range(g.vertex_count)]

    def add(self, e: int) -> None:
        u, v = self.g.endpoints(e)
        self.tree.add(e)
        self.tdeg[u] += 1
        self.tdeg[v] += 1
        self.tadj[u].add(e)
        self.tadj[v].add(e)

    def drop(self, e: int) -> None:
        u, v = self.g.endpoints(e)
        self.tree.discard(e)
        self.tdeg[u] -= 1
        self.tdeg[v] -= 1
        self.tadj[u].discard(e)
        self.tadj[v].discard(e)

    def side_of_cut(self, cut_edge: int, start: int) -> set[int]:
        """Vertices reachable from ``start`` in the tree without ``cut_edge``."""
        seen = {start}
        queue = deque([start])
        g = self.g
        while queue:
            x = queue.popleft()
            for e in self.tadj[x]:
                if e == cut_edge:
                    continue
                y = g.other(e, x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen


def _initial_tree(state: _TreeState, bound: list[int]) -> None:
    g = state.g
    parent = list(range(g.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    deferred = []
    for e in state.eids:
        u, v = g.endpoints(e)
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        if state.tdeg[u] < bound[u] and state.tdeg[v] < bound[v]:
            parent[ru] = rv
            state.add(e)
        else:
            deferred.append(e)
    for e in deferred:
        u, v = g.endpoints(e)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            state.add(e)


def bounded_degree_spanning_tree(
    g: MultiGraph,
    m: int,
    edges: Iterable[int] | None = None,
    *,
    max_iterations: int | None = None,
    bounds: Sequence[int] | None = None,
    best_effort: bool = False,
) -> frozenset[int]:
    """Spanning tree ``T`` of the (restricted) graph with ``d_T(v) <= ceil(d(v)/m) + 2`` everywhere.

    Starts from a bound-respecting Kruskal pass and then applies edge
    exchanges (drop a tree edge at an overloaded vertex, add a reconnecting
    non-tree edge) that lexicographically shrink the sorted vector of bound
    excesses.  The caller asserts ``m``-edge-connectivity; a tree is known to
    exist then, so running out of moves or iterations is reported loudly.
    """
    if m < 1:
        raise ValueError("m must be positive")
    eids = sorted(g.edges() if edges is None else set(edges))
    n = g.vertex_count
    if n <= 1:
        return frozenset()
    deg = [0] * n
    for e in eids:
        u, v = g.endpoints(e)
        deg[u] += 1
        deg[v] += 1
    bound = list(bounds) if bounds is not None else [degree_bound(d, m) for d in deg]
    state = _TreeState(g, eids)
    _initial_tree(state, bound)
    if len(state.tree) != n - 1:
        raise PackingFailed("graph is disconnected: no spanning tree")
    cap = max_iterations if max_iterations is not None else 50 * max(len(eids), 1)
    tdeg = state.tdeg
    iterations = 0
    while True:
        over = [v for v in range(n) if tdeg[v] > bound[v]]
        if not over:
            break
        over.sort(key=lambda v: (bound[v] - tdeg[v], v))
        moved = False
        for v in over:
            iterations += 1
            if iterations > cap:
                if best_effort:
                    return frozenset(state.tree)
                raise BoundedTreeSearchExhausted(
                    f"gave up after {cap} iterations with {len(over)} vertices above their bound"
                )
            if _improve_at(state, v, bound):
                moved = True
                break
        if not moved:
            if best_effort:
                break
            worst = over[0]
            raise BoundedTreeSearchExhausted(
                f"no improving exchange; vertex {worst} has tree degree {tdeg[worst]} > bound {bound[worst]}"
            )
    log.debug("bounded tree found after %d exchange attempts", iterations)
    return frozenset(state.tree)


def _improve_at(state: _TreeState, v: int, bound: list[int]) -> bool:
    g, tdeg = state.g, state.tdeg
    excess = tdeg[v] - bound[v]
    best = None
    for cut in sorted(state.tadj[v]):
        w = g.other(cut, v)
        side = state.side_of_cut(cut, w)
        for e in state.eids:
            if e in state.tree:
                continue
            x, y = g.endpoints(e)
            if (x in side) == (y in side) or x == v or y == v:
                continue
            worst_after = max(tdeg[x] + 1 - bound[x], tdeg[y] + 1 - bound[y])
            if worst_after >= excess:
                continue
            key = (worst_after, e)
            if best is None or key < best[0]:
                best = (key, cut, e)
                if worst_after <= 0:
                    break
        if best is not None and best[0][0] <= 0:
            break
    if best is None:
        return False
    _, cut, e = best
    state.drop(cut)
    state.add(e)
    return True


def check_degree_bound(g: MultiGraph, tree: Iterable[int], m: int, host: Iterable[int]) -> list[int]:
    """Vertices where ``tree`` exceeds ``ceil(d_host(v)/m) + 2``."""
    host = set(host)
    tree = set(tree)
    bad = []
    for v in range(g.vertex_count):
        if g.degree_in(v, tree) > degree_bound(g.degree_in(v, host), m):
            bad.append(v)
    return bad
