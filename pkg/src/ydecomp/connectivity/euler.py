"""Spanning even subgraphs from two disjoint spanning trees, and their Euler trails."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from ydecomp.connectivity.packing import is_spanning_tree
from ydecomp.errors import InternalInvariantViolation
from ydecomp.graph_core import MultiGraph


@dataclass(frozen=True)
class EulerStructure:
    subgraph: frozenset[int]
    trail: tuple[int, ...]      # edge ids in traversal order; closed
    vertices: tuple[int, ...]   # len(trail) + 1 vertices, first == last

    def rotated(self, position: int) -> EulerStructure:
        """Same closed trail started at vertex position ``position``."""
        trail = self.trail[position:] + self.trail[:position]
        verts = self.vertices[position:-1] + self.vertices[:position] + (self.vertices[position],)
        return EulerStructure(self.subgraph, trail, verts)


def tree_join(g: MultiGraph, tree: Iterable[int], terminals: Iterable[int]) -> frozenset[int]:
    """The unique edge set of ``tree`` whose odd-degree vertices are exactly ``terminals``."""
    tree = list(tree)
    odd = [False] * g.vertex_count
    for v in terminals:
        odd[v] = not odd[v]
    if sum(odd) % 2:
        raise ValueError("a join needs an even number of terminals")
    adj: list[list[int]] = [[] for _ in range(g.vertex_count)]
    for e in tree:
        u, v = g.endpoints(e)
        adj[u].append(e)
        adj[v].append(e)
    seen = [False] * g.vertex_count
    join = set()
    for root in range(g.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        order, up = [root], {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for e in sorted(adj[x]):
                y = g.other(e, x)
                if not seen[y]:
                    seen[y] = True
                    up[y] = e
                    order.append(y)
                    queue.append(y)
        for x in reversed(order):
            if odd[x]:
                e = up[x]
                if e == -1:
                    raise ValueError("terminals in a tree component are odd in number")
                join.add(e)
                odd[x] = False
                p = g.other(e, x)
                odd[p] = not odd[p]
    return frozenset(join)


def euler_trail(g: MultiGraph, eids: Iterable[int], start: int | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Closed trail through every edge of the connected even edge set ``eids`` (Hierholzer)."""
    eids = sorted(set(eids))
    if not eids:
        return (), (() if start is None else (start,))
    adj: dict[int, list[int]] = {}
    for e in eids:
        u, v = g.endpoints(e)
        adj.setdefault(u, []).append(e)
        adj.setdefault(v, []).append(e)
    for v, inc in adj.items():
        if len(inc) % 2:
            raise ValueError(f"vertex {v} has odd degree {len(inc)}")
    if start is None:
        start = min(adj)
    if start not in adj:
        raise ValueError(f"start vertex {start} has no edges")
    ptr = {v: 0 for v in adj}
    used = set()
    stack: list[tuple[int, int]] = [(start, -1)]
    out_edges: list[int] = []
    out_verts: list[int] = []
    while stack:
        v, via = stack[-1]
        inc = adj[v]
        i = ptr[v]
        while i < len(inc) and inc[i] in used:
            i += 1
        ptr[v] = i
        if i < len(inc):
            e = inc[i]
            used.add(e)
            stack.append((g.other(e, v), e))
        else:
            stack.pop()
            out_verts.append(v)
            if via != -1:
                out_edges.append(via)
    if len(out_edges) != len(eids):
        raise ValueError("edge set is not connected")
    out_edges.reverse()
    out_verts.reverse()
    return tuple(out_edges), tuple(out_verts)


def euler_spanning_subgraph(g: MultiGraph, t_a: Iterable[int], t_b: Iterable[int]) -> EulerStructure:
    """All of ``t_a`` plus the join inside ``t_b`` of ``t_a``'s odd vertices, with an Euler trail.

    Every degree is then even, the subgraph is connected and spans, and
    ``d_E(v) <= d_{t_a}(v) + d_{t_b}(v)``.
    """
    t_a, t_b = frozenset(t_a), frozenset(t_b)
    if t_a & t_b:
        raise ValueError("trees are not edge-disjoint")
    if not is_spanning_tree(g, t_a) or not is_spanning_tree(g, t_b):
        raise ValueError("inputs must be spanning trees")
    deg = [0] * g.vertex_count
    for e in t_a:
        for x in g.endpoints(e):
            deg[x] += 1
    odd = [v for v in range(g.vertex_count) if deg[v] % 2]
    sub = t_a | tree_join(g, t_b, odd)
    trail, verts = euler_trail(g, sub)
    if g.vertex_count > 1 and set(verts) != set(range(g.vertex_count)):
        raise InternalInvariantViolation("Euler subgraph does not span")
    return EulerStructure(sub, trail, verts)
