"""Edge-disjoint spanning tree packing by matroid-union augmentation.

A greedy pass inserts each edge into some forest where it joins two
components.  Every edge the greedy pass could not place then gets one
breadth-first search over the exchange graph: from edge ``f`` outside forest
``F_i`` there is an arc to each edge on the ``F_i``-path between the ends of
``f``.  The search stops at the first labelled edge that joins two components
of some other forest; shifting every edge on the (shortest) label path into
its successor's forest keeps all forests acyclic.  An edge whose search fails
is spanned by the current union and stays spanned, so one pass is exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from ydecomp.errors import InternalInvariantViolation, PackingFailed
from ydecomp.graph_core import MultiGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreePack:
    trees: tuple[frozenset[int], ...]

    def __len__(self):
        return len(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    def __iter__(self):
        return iter(self.trees)

    def union(self, indices: Iterable[int] | None = None) -> frozenset[int]:
        idx = range(len(self.trees)) if indices is None else indices
        out: set[int] = set()
        for i in idx:
            out |= self.trees[i]
        return frozenset(out)

    def sub(self, start: int, stop: int) -> TreePack:
        return TreePack(self.trees[start:stop])


class _Packer:
    def __init__(self, n: int, ends: Sequence[tuple[int, int]], k: int):
        self.n = n
        self.k = k
        self.eu = [u for u, _ in ends]
        self.ev = [v for _, v in ends]
        m = len(ends)
        self.forest_of = [-1] * m
        self.members: list[set[int]] = [set() for _ in range(k)]
        self.par = [[-1] * n for _ in range(k)]
        self.pedge = [[-1] * n for _ in range(k)]
        self.depth = [[0] * n for _ in range(k)]
        self.comp = [list(range(n)) for _ in range(k)]
        self.total = 0
        self.stamp = [0] * m
        self.back = [-1] * m
        self.cur = 0

    # greedy ---------------------------------------------------------------
    def greedy(self, order: Iterable[int]) -> list[int]:
        k, n = self.k, self.n
        uf = [list(range(n)) for _ in range(k)]
        full = n - 1
        left = []
        nxt = 0
        for j in order:
            u, v = self.eu[j], self.ev[j]
            placed = False
            for step in range(k):
                i = (nxt + step) % k
                if len(self.members[i]) == full:
                    continue
                p = uf[i]
                a = u
                while p[a] != a:
                    p[a] = p[p[a]]
                    a = p[a]
                b = v
                while p[b] != b:
                    p[b] = p[p[b]]
                    b = p[b]
                if a != b:
                    p[a] = b
                    self.members[i].add(j)
                    self.forest_of[j] = i
                    self.total += 1
                    nxt = (i + 1) % k
                    placed = True
                    break
            if not placed:
                left.append(j)
        for i in range(k):
            self._rebuild(i)
        return left

    # rooted forest structure ------------------------------------------------
    def _rebuild(self, i: int) -> None:
        n = self.n
        adj: list[list[int]] = [[] for _ in range(n)]
        eu, ev = self.eu, self.ev
        for e in self.members[i]:
            adj[eu[e]].append(e)
            adj[ev[e]].append(e)
        par, pedge, depth, comp = self.par[i], self.pedge[i], self.depth[i], self.comp[i]
        seen = [False] * n
        roots = 0
        for r in range(n):
            if seen[r]:
                continue
            roots += 1
            seen[r] = True
            par[r] = -1
            pedge[r] = -1
            depth[r] = 0
            comp[r] = r
            stack = [r]
            while stack:
                x = stack.pop()
                dx = depth[x] + 1
                for e in adj[x]:
                    y = eu[e] if ev[e] == x else ev[e]
                    if not seen[y]:
                        seen[y] = True
                        par[y] = x
                        pedge[y] = e
                        depth[y] = dx
                        comp[y] = r
                        stack.append(y)
        if len(self.members[i]) != n - roots:
            raise InternalInvariantViolation(f"forest {i} acquired a cycle during augmentation")

    # augmentation -----------------------------------------------------------
    def _insertable(self, e: int) -> int:
        u, v = self.eu[e], self.ev[e]
        fe = self.forest_of[e]
        full = self.n - 1
        for i in range(self.k):
            if i != fe and len(self.members[i]) < full:
                c = self.comp[i]
                if c[u] != c[v]:
                    return i
        return -1

    def augment(self, j0: int) -> bool:
        self.cur += 1
        cur = self.cur
        stamp, back = self.stamp, self.back
        stamp[j0] = cur
        back[j0] = -1
        target = self._insertable(j0)
        if target >= 0:
            self._apply(j0, target)
            return True
        queue = [j0]
        head = 0
        eu, ev = self.eu, self.ev
        k = self.k
        while head < len(queue):
            f = queue[head]
            head += 1
            x, y = eu[f], ev[f]
            ff = self.forest_of[f]
            for i in range(k):
                if i == ff:
                    continue
                par, pedge, depth = self.par[i], self.pedge[i], self.depth[i]
                a, b = x, y
                da, db = depth[a], depth[b]
                while a != b:
                    if da >= db:
                        e = pedge[a]
                        a = par[a]
                        da -= 1
                    else:
                        e = pedge[b]
                        b = par[b]
                        db -= 1
                    if stamp[e] != cur:
                        stamp[e] = cur
                        back[e] = f
                        t = self._insertable(e)
                        if t >= 0:
                            self._apply(e, t)
                            return True
                        queue.append(e)
        return False

    def _apply(self, last: int, target: int) -> None:
        chain = [last]
        while self.back[chain[-1]] != -1:
            chain.append(self.back[chain[-1]])
        # chain runs last -> ... -> initial edge (which is in no forest)
        old = [self.forest_of[e] for e in chain]
        touched = {target}
        self.forest_of[last] = target
        self.members[target].add(last)
        if old[0] >= 0:
            self.members[old[0]].discard(last)
        for idx in range(1, len(chain)):
            e = chain[idx]
            dest = old[idx - 1]
            if old[idx] >= 0:
                self.members[old[idx]].discard(e)
            self.members[dest].add(e)
            self.forest_of[e] = dest
            touched.add(dest)
        self.total += 1
        for i in touched:
            self._rebuild(i)


def pack_spanning_trees(g: MultiGraph, k: int, edges: Iterable[int] | None = None) -> TreePack:
    """``k`` pairwise edge-disjoint spanning trees of ``g`` (restricted to ``edges`` if given).

    Exact: raises :class:`PackingFailed` only when no such packing exists.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = g.vertex_count
    eids = sorted(g.edges() if edges is None else set(edges))
    if n <= 1:
        return TreePack(tuple(frozenset() for _ in range(k)))
    need = k * (n - 1)
    if len(eids) < need:
        raise PackingFailed(f"{len(eids)} edges cannot hold {k} spanning trees on {n} vertices")
    ends = [g.endpoints(e) for e in eids]
    packer = _Packer(n, ends, k)
    left = packer.greedy(range(len(eids)))
    log.debug("greedy placed %d of %d tree edges; %d edges left", packer.total, need, len(left))
    searches = 0
    for j in left:
        if packer.total == need:
            break
        searches += 1
        packer.augment(j)
    log.debug("augmentation: %d searches", searches)
    if packer.total < need:
        raise PackingFailed(f"the graph has no {k} edge-disjoint spanning trees "
                            f"(matroid-union rank {packer.total} < {need})")
    return TreePack(tuple(frozenset(eids[j] for j in packer.members[i]) for i in range(k)))


def max_tree_packing(g: MultiGraph, edges: Iterable[int] | None = None) -> int:
    """Largest ``k`` such that ``g`` holds ``k`` edge-disjoint spanning trees."""
    eids = sorted(g.edges() if edges is None else set(edges))
    n = g.vertex_count
    if n <= 1:
        return 0
    sub = g.restricted(eids)
    if not sub.is_connected():
        return 0
    lo, hi = 1, min(len(eids) // (n - 1), min(sub.degrees()))
    while lo < hi:
        mid = (lo + hi + 1) // 2
        try:
            pack_spanning_trees(g, mid, eids)
            lo = mid
        except PackingFailed:
            hi = mid - 1
    return lo


def is_spanning_tree(g: MultiGraph, tree: Iterable[int]) -> bool:
    tree = list(tree)
    n = g.vertex_count
    if len(tree) != max(n - 1, 0) or len(set(tree)) != len(tree):
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in tree:
        a, b = (find(x) for x in g.endpoints(e))
        if a == b:
            return False
        parent[a] = b
    return True


def check_tree_pack(g: MultiGraph, pack: TreePack, alive_only: bool = True) -> str | None:
    """Why ``pack`` is not a family of disjoint spanning trees of ``g`` (``None`` if it is)."""
    seen: set[int] = set()
    for i, t in enumerate(pack.trees):
        if alive_only and any(not g.is_alive(e) for e in t):
            return f"tree {i} uses a removed edge"
        if seen & t:
            return f"tree {i} shares edges with an earlier tree"
        seen |= t
        if not is_spanning_tree(g, t):
            return f"tree {i} is not a spanning tree"
    return None
