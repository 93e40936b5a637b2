"""Ground truth: exhaustive T-decomposition search, the named graph gallery, random generators."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from ydecomp.connectivity.mincut import edge_connectivity
from ydecomp.errors import PreconditionError
from ydecomp.graph_core import Decomposition, MultiGraph, PatternTree, TreeCopy, Y, verify_decomposition

# ---------------------------------------------------------------------------
# exhaustive search


@dataclass(frozen=True)
class Found:
    decomposition: Decomposition
    nodes: int


@dataclass(frozen=True)
class NotDecomposable:
    nodes: int
    reason: str = "search exhausted"


@dataclass(frozen=True)
class BudgetExceeded:
    nodes: int


def embeddings_through(
    g: MultiGraph, pattern: PatternTree, edge: int, usable: set[int]
) -> Iterator[TreeCopy]:
    """Embeddings of ``pattern`` using host edge ``edge``, all edges drawn from ``usable``.

    Two embeddings with the same host edge set are the same subgraph, so only
    the first one met in the enumeration order is yielded.
    """
    adj = pattern.adjacency()
    u, v = g.endpoints(edge)
    seen_sets: set[frozenset[int]] = set()
    for pe, (x, y) in enumerate(pattern.edges):
        for hx, hy in ((u, v), (v, u)):
            vmap = {x: hx, y: hy}
            emap = {pe: edge}
            order = _bfs_order(adj, x, y)
            for vm, em in _extend(g, adj, order, 0, vmap, emap, usable):
                key = frozenset(em.values())
                if key in seen_sets:
                    continue
                seen_sets.add(key)
                yield TreeCopy(
                    pattern,
                    tuple(vm[i] for i in range(pattern.vertex_count)),
                    tuple(em[i] for i in range(pattern.size)),
                )


def _bfs_order(adj, x, y):
    """Pattern vertices other than x, y, each listed with an already-placed parent and the joining edge."""
    placed = {x, y}
    order = []
    frontier = [x, y]
    while frontier:
        nxt = []
        for p in frontier:
            for c, pe in adj[p]:
                if c not in placed:
                    placed.add(c)
                    order.append((c, p, pe))
                    nxt.append(c)
        frontier = nxt
    return order


def _extend(g, adj, order, i, vmap, emap, usable):
    if i == len(order):
        yield dict(vmap), dict(emap)
        return
    c, p, pe = order[i]
    hp = vmap[p]
    used_hosts = set(vmap.values())
    for e in sorted(g.incident(hp)):
        if e not in usable or e in emap.values():
            continue
        hc = g.other(e, hp)
        if hc in used_hosts:
            continue
        vmap[c] = hc
        emap[pe] = e
        yield from _extend(g, adj, order, i + 1, vmap, emap, usable)
        del vmap[c]
        del emap[pe]


def brute_force_decomposition(g: MultiGraph, pattern: PatternTree = Y, budget: int = 1_000_000):
    """Exact search: always branch on the lowest-id uncovered edge.

    Returns :class:`Found`, :class:`NotDecomposable` or :class:`BudgetExceeded`
    (a value, not an exception).
    """
    edges = g.edges()
    if len(edges) % pattern.size:
        return NotDecomposable(0, f"{len(edges)} edges not divisible by {pattern.size}")
    uncovered = set(edges)
    chosen: list[TreeCopy] = []
    nodes = 0

    def search() -> bool | None:
        nonlocal nodes
        if not uncovered:
            return True
        nodes += 1
        if nodes > budget:
            return None
        e = min(uncovered)
        for copy in list(embeddings_through(g, pattern, e, uncovered)):
            ids = copy.edge_map
            uncovered.difference_update(ids)
            chosen.append(copy)
            res = search()
            if res is not False:
                return res
            chosen.pop()
            uncovered.update(ids)
        return False

    res = search()
    if res is None:
        return BudgetExceeded(nodes)
    if res is False:
        return NotDecomposable(nodes)
    d = Decomposition.of(chosen)
    verdict = verify_decomposition(g, edges, pattern, d)
    assert verdict.ok, verdict.reason
    return Found(d, nodes)


# ---------------------------------------------------------------------------
# gallery


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    graph: MultiGraph = field(compare=False)
    edge_connectivity: int
    notes: str


def _wheel4() -> MultiGraph:
    return MultiGraph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)])


def _k6chain() -> MultiGraph:
    g = MultiGraph(24)
    for c in range(4):
        base = 6 * c
        for a, b in itertools.combinations(range(6), 2):
            g.add_edge(base + a, base + b)
    for c in range(4):
        nxt = (c + 1) % 4
        for i in range(3):
            g.add_edge(6 * c + 3 + i, 6 * nxt + i)
    return g


def _complete(n: int) -> MultiGraph:
    return MultiGraph(n, itertools.combinations(range(n), 2))


def _petersen() -> MultiGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return MultiGraph(10, outer + spokes + inner)


_GALLERY = {
    "wheel4": (_wheel4, 3, "4-wheel: 3-edge-connected, 8 edges, and has no Y-decomposition."),
    "k6chain": (
        _k6chain,
        6,
        "Four K6 copies G0..G3 in a closed chain; G_i's vertices 3,4,5 are matched to G_{i+1}'s "
        "vertices 0,1,2 (indices mod 4), which is what makes the graph 6-regular. Claimed to have "
        "no 4-star decomposition; that claim is recorded, not machine-checked (72 edges is beyond "
        "the exhaustive search).",
    ),
    "y": (lambda: MultiGraph(Y.vertex_count, Y.edges), 1, "The pattern tree Y itself."),
    "k4": (lambda: _complete(4), 3, "Complete graph K4."),
    "petersen": (_petersen, 3, "Petersen graph (3-regular, 15 edges)."),
}


def gallery_names() -> list[str]:
    return sorted(_GALLERY)


def gallery(name: str) -> GalleryEntry:
    try:
        build, lam, notes = _GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery graph {name!r}; known: {', '.join(gallery_names())}") from None
    return GalleryEntry(name, build(), lam, notes)


# ---------------------------------------------------------------------------
# random generators


class GenerationFailed(PreconditionError):
    pass


def _pairing_attempt(n: int, d: int, rng: random.Random) -> set[tuple[int, int]] | None:
    """One run of the pairing model that redraws only the offending pairs."""
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        rng.shuffle(stubs)
        leftover: dict[int, int] = {}
        for a, b in zip(stubs[::2], stubs[1::2]):
            key = (a, b) if a < b else (b, a)
            if a != b and key not in edges:
                edges.add(key)
            else:
                leftover[a] = leftover.get(a, 0) + 1
                leftover[b] = leftover.get(b, 0) + 1
        if leftover:
            pending = sorted(leftover)
            feasible = any(
                (min(x, y), max(x, y)) not in edges
                for i, x in enumerate(pending)
                for y in pending[i + 1 :]
            )
            if not feasible:
                return None
        stubs = [v for v in sorted(leftover) for _ in range(leftover[v])]
    return edges


def random_regular(n: int, d: int, seed: int, max_attempts: int = 100) -> MultiGraph:
    """Simple ``d``-regular graph on ``n`` vertices, deterministic for a fixed seed.

    Dense degrees are sampled as the complement of an ``(n-1-d)``-regular graph.
    """
    if n * d % 2:
        raise PreconditionError(f"n*d = {n * d} is odd")
    if not 0 <= d < n:
        raise PreconditionError(f"need 0 <= d < n, got d={d}, n={n}")
    rng = random.Random(seed)
    dense = d > (n - 1) // 2
    target = n - 1 - d if dense else d
    for _ in range(max_attempts):
        edges = _pairing_attempt(n, target, rng)
        if edges is not None:
            break
    else:
        raise GenerationFailed(f"no {target}-regular graph on {n} vertices after {max_attempts} attempts")
    if dense:
        edges = {(u, v) for u, v in itertools.combinations(range(n), 2) if (u, v) not in edges}
    # random edge order, so that id-based tie-breaking downstream is not biased by vertex index
    order = sorted(edges)
    rng.shuffle(order)
    return MultiGraph(n, order)


def random_k_connected(n: int, k: int, seed: int, max_attempts: int = 5) -> MultiGraph:
    """Random regular graph of degree about ``max(k+1, 3)`` with verified edge connectivity ``>= k``."""
    if not 0 < k < n:
        raise PreconditionError(f"need 0 < k < n, got k={k}, n={n}")
    # degree 2 would mostly give disjoint cycles, so never go below 3
    d = max(k + 1, 3) if max(k + 1, 3) < n else k
    if n * d % 2:
        d += 1 if d + 1 < n else -1
    if d < k:
        raise PreconditionError(f"no regular degree >= {k} with even n*d exists on {n} vertices")
    for attempt in range(max_attempts):
        g = random_regular(n, d, seed + 1_000_003 * attempt)
        if edge_connectivity(g) >= k:
            return g
    raise GenerationFailed(f"no {k}-edge-connected sample in {max_attempts} attempts (n={n}, d={d})")


def random_bipartite_a_regular(
    a_degrees: list[int], b_count: int, seed: int
) -> tuple[MultiGraph, list[int]]:
    """Random simple bipartite graph with prescribed degrees on side A (vertices ``0..|A|-1``)."""
    rng = random.Random(seed)
    na = len(a_degrees)
    g = MultiGraph(na + b_count)
    for a, d in enumerate(a_degrees):
        if d > b_count:
            raise PreconditionError(f"degree {d} exceeds |B| = {b_count}")
        for b in sorted(rng.sample(range(b_count), d)):
            g.add_edge(a, na + b)
    return g, list(range(na))
