"""Remove Y-copies until only edges across a bipartition remain, keeping a tree pack intact.

Per side: strip Y-copies greedily, cut the Y-free remainder into fragments
(3-paths, 2-paths, single edges, 3-stars, triangles) with designated 3- and
2-vertices, then complete every fragment to a Y with crossing-tree edges at
its designated vertices.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from ydecomp.connectivity.maxcut import max_cut_bipartition
from ydecomp.connectivity.mincut import edge_connectivity
from ydecomp.connectivity.packing import TreePack, pack_spanning_trees
from ydecomp.errors import InsufficientConnectivity, InternalInvariantViolation, PreconditionError
from ydecomp.graph_core import Bipartition, MultiGraph, TreeCopy, y_copy

log = logging.getLogger(__name__)

# adjacency used by the strip: vertex -> list of (neighbour, edge id), edge ids ascending
_Adj = dict[int, list[tuple[int, int]]]


# ---------------------------------------------------------------------------
# stripping


def _inside_adjacency(g: MultiGraph, side: set[int]) -> _Adj:
    adj: _Adj = {v: [] for v in side}
    for e, u, v in g.edge_list():
        if u in side and v in side:
            adj[u].append((v, e))
            adj[v].append((u, e))
    return adj


def _find_y(adj: _Adj, u: int, v: int, e: int) -> TreeCopy | None:
    """A Y through edge ``e = uv``; the lower endpoint is tried as 3-vertex first."""
    lo, hi = min(u, v), max(u, v)
    for c, o in ((lo, hi), (hi, lo)):
        # o as the 2-vertex
        for f, ef in adj[o]:
            if f == c:
                continue
            leaves = [(w, ew) for w, ew in adj[c] if w not in (o, f)]
            if len(leaves) >= 2:
                (la, ea), (lb, eb) = leaves[:2]
                return y_copy(c, la, lb, o, f, ea, eb, e, ef)
        # o as a leaf
        for t, et in adj[c]:
            if t == o:
                continue
            for f, ef in adj[t]:
                if f in (c, o):
                    continue
                leaves = [(w, ew) for w, ew in adj[c] if w not in (o, t, f)]
                if leaves:
                    la, ea = leaves[0]
                    return y_copy(c, o, la, t, f, e, ea, et, ef)
    # e as the edge between the 2-vertex and the far leaf
    for t, f in ((lo, hi), (hi, lo)):
        for c, ec in adj[t]:
            if c == f:
                continue
            leaves = [(w, ew) for w, ew in adj[c] if w not in (t, f)]
            if len(leaves) >= 2:
                (la, ea), (lb, eb) = leaves[:2]
                return y_copy(c, la, lb, t, f, ea, eb, ec, e)
    return None


def strip_y_copies_inside(g: MultiGraph, side: Iterable[int]) -> tuple[list[TreeCopy], frozenset[int]]:
    """Greedily remove Y-copies of ``g[side]`` (mutating ``g``); return them and the Y-free rest.

    One pass in edge-id order is maximal: an edge that lies in no Y now lies in
    none after further deletions.
    """
    side = set(side)
    adj = _inside_adjacency(g, side)
    removed: list[TreeCopy] = []
    dead: set[int] = set()
    for e in sorted(x for v in adj for _, x in adj[v]):
        if e in dead:
            continue
        u, v = g.endpoints(e)
        copy = _find_y(adj, u, v, e)
        if copy is None:
            continue
        removed.append(copy)
        for x in copy.edge_map:
            dead.add(x)
            a, b = g.endpoints(x)
            adj[a] = [p for p in adj[a] if p[1] != x]
            adj[b] = [p for p in adj[b] if p[1] != x]
            g.remove_edge(x)
    leftover = frozenset(x for v in adj for _, x in adj[v])
    return removed, leftover


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class LeftoverPiece:
    """A fragment of the Y-free remainder with its designated vertices.

    ``shape`` and vertex order:
      ``3path``   (p0, p1, p2, p3), 3-vertex p1
      ``2path``   (x, y, z), 3-vertex z (an end)
      ``edge``    (a, b), 3-vertex a, 2-vertex b
      ``3star``   (s, l1, l2, l3), 2-vertex l1
      ``triangle`` (a, b, c): edge a-b (3-vertex a, 2-vertex b) plus 2-path a-c-b (3-vertex b)
    ``edge_ids`` follow the vertex order (consecutive pairs; star edges s-l_i;
    triangle edges ab, bc, ca).
    """

    kind: str
    shape: str
    vertices: tuple[int, ...]
    edge_ids: tuple[int, ...]
    three_vertex: int
    two_vertex: int | None = None

    @property
    def designated(self) -> tuple[int, ...]:
        """Vertices that receive crossing edges (a 3-star's center is already complete)."""
        if self.shape == "3star":
            return (self.two_vertex,)
        if self.two_vertex is None:
            return (self.three_vertex,)
        return (self.three_vertex, self.two_vertex)


class _Pieces:
    """Builds pieces from vertex sequences, looking edges up by endpoint pair."""

    def __init__(self, edge_of: dict[frozenset[int], int], kind: str):
        self.edge_of = edge_of
        self.kind = kind
        self.out: list[LeftoverPiece] = []

    def e(self, a: int, b: int) -> int:
        return self.edge_of[frozenset((a, b))]

    def path(self, verts: Sequence[int]) -> None:
        """A path of 1, 2 or 3 edges."""
        verts = tuple(verts)
        eids = tuple(self.e(a, b) for a, b in zip(verts, verts[1:]))
        if len(verts) == 4:
            self.out.append(LeftoverPiece(self.kind, "3path", verts, eids, verts[1]))
        elif len(verts) == 3:
            self.out.append(LeftoverPiece(self.kind, "2path", verts, eids, verts[2]))
        elif len(verts) == 2:
            self.out.append(LeftoverPiece(self.kind, "edge", verts, eids, verts[0], verts[1]))
        else:
            raise InternalInvariantViolation(f"bad path fragment {verts}")

    def star(self, s: int, leaves: Sequence[int]) -> None:
        verts = (s, *leaves)
        eids = tuple(self.e(s, x) for x in leaves)
        self.out.append(LeftoverPiece(self.kind, "3star", verts, eids, s, leaves[0]))

    def triangle(self, a: int, b: int, c: int) -> None:
        eids = (self.e(a, b), self.e(b, c), self.e(c, a))
        self.out.append(LeftoverPiece(self.kind, "triangle", (a, b, c), eids, a, b))


def _cut_path(p: _Pieces, verts: list[int]) -> None:
    """3-paths from the front; a remainder of 2 edges designates its far end, of 1 edge both ends."""
    i = 0
    while len(verts) - 1 - i >= 3:
        p.path(verts[i : i + 4])
        i += 3
    rest = verts[i:]
    if len(rest) == 3:
        p.path(rest)
    elif len(rest) == 2:
        p.path(rest[::-1])  # 3-vertex at the far end, 2-vertex at the cut point


def _cut_star(p: _Pieces, center: int, leaves: list[int]) -> None:
    i = 0
    while len(leaves) - i >= 3:
        p.star(center, leaves[i : i + 3])
        i += 3
    rest = leaves[i:]
    if len(rest) == 2:
        p.path([rest[0], center, rest[1]])
    elif len(rest) == 1:
        p.path([center, rest[0]])


# Components on at most four vertices: canonical edges over labels 0..3 and a cut.
# Cut entries: ("path", labels) or ("star", center, leaves) or ("triangle", a, b, c).
_SMALL_SHAPES: list[tuple[str, str, int, tuple[tuple[int, int], ...], tuple]] = [
    ("P2", "path", 2, ((0, 1),), (("path", (1, 0)),)),
    ("P3", "path", 3, ((0, 1), (1, 2)), (("path", (0, 1, 2)),)),
    ("P4", "path", 4, ((0, 1), (1, 2), (2, 3)), (("path", (0, 1, 2, 3)),)),
    ("K1,3", "star", 4, ((0, 1), (0, 2), (0, 3)), (("star", 0, (1, 2, 3)),)),
    ("C3", "k4_subgraph", 3, ((0, 1), (1, 2), (0, 2)), (("triangle", 0, 1, 2),)),
    # triangle 0,1,2 with pendant 3 at 2: 3-path 1-0-2-3 designating 0, edge 1-2
    ("paw", "k4_subgraph", 4, ((0, 1), (1, 2), (0, 2), (2, 3)),
     (("path", (1, 0, 2, 3)), ("path", (1, 2)))),
    ("C4", "cycle", 4, ((0, 1), (1, 2), (2, 3), (0, 3)), (("path", (0, 1, 2, 3)), ("path", (3, 0)))),
    # 0 and 3 non-adjacent: 3-path 2-3-1-0 designating 3, 2-path 1-2-0 designating 0
    ("diamond", "k4_subgraph", 4, ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3)),
     (("path", (2, 3, 1, 0)), ("path", (1, 2, 0)))),
    ("K4", "k4_subgraph", 4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
     (("path", (0, 1, 2, 3)), ("path", (2, 0, 3, 1)))),
]


def _match_small(verts: list[int], edges: set[frozenset[int]]):
    for name, kind, size, canon, cut in _SMALL_SHAPES:
        if size != len(verts) or len(canon) != len(edges):
            continue
        for perm in itertools.permutations(verts):
            if all(frozenset((perm[a], perm[b])) in edges for a, b in canon):
                return name, kind, perm, cut
    return None


def classify_leftover(g: MultiGraph, leftover: Iterable[int]) -> list[LeftoverPiece]:
    """Cut a Y-free edge set into designated fragments, each vertex designated at most once.

    Components on at most four vertices are looked up in a table of the nine
    connected shapes; larger ones must be paths, cycles or stars.
    """
    leftover = sorted(set(leftover))
    edge_of: dict[frozenset[int], int] = {}
    adj: dict[int, list[int]] = {}
    for e in leftover:
        u, v = g.endpoints(e)
        key = frozenset((u, v))
        if key in edge_of:
            raise InternalInvariantViolation(f"parallel edges {edge_of[key]} and {e} in the remainder")
        edge_of[key] = e
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for v in adj:
        adj[v].sort()
    pieces: list[LeftoverPiece] = []
    sub = g.restricted(leftover)
    for comp in sub.components():
        if len(comp) < 2:
            continue
        members = set(comp)
        cedges = {frozenset(g.endpoints(e)) for e in leftover if g.endpoints(e)[0] in members}
        if len(comp) <= 4:
            hit = _match_small(comp, cedges)
            if hit is None:
                raise InternalInvariantViolation(f"component {comp} matches no small shape")
            _, kind, perm, cut = hit
            p = _Pieces(edge_of, kind)
            for item in cut:
                if item[0] == "path":
                    p.path([perm[i] for i in item[1]])
                elif item[0] == "star":
                    p.star(perm[item[1]], [perm[i] for i in item[2]])
                else:
                    p.triangle(*(perm[i] for i in item[1:]))
            pieces.extend(p.out)
            continue
        degs = {v: len(adj[v]) for v in comp}
        hubs = [v for v in comp if degs[v] >= 3]
        if not hubs:
            ends = [v for v in comp if degs[v] == 1]
            if ends:
                p = _Pieces(edge_of, "path")
                _cut_path(p, _walk(adj, min(ends), None))
            else:
                p = _Pieces(edge_of, "cycle")
                start = comp[0]
                walk = _walk(adj, start, adj[start][0])
                _cut_path(p, walk + [start])
            pieces.extend(p.out)
        elif len(hubs) == 1 and degs[hubs[0]] == len(comp) - 1 and all(
            degs[v] == 1 for v in comp if v != hubs[0]
        ):
            p = _Pieces(edge_of, "star")
            _cut_star(p, hubs[0], sorted(adj[hubs[0]]))
            pieces.extend(p.out)
        else:
            raise InternalInvariantViolation(
                f"Y-free component on {len(comp)} vertices is neither a path, a cycle nor a star"
            )
    _check_designations(pieces)
    return pieces


def _walk(adj, start, first):
    """Vertex sequence of a path (``first`` is None) or a cycle (open, without the return)."""
    seq = [start]
    prev, cur = start, first if first is not None else adj[start][0]
    while True:
        seq.append(cur)
        nxt = [w for w in adj[cur] if w != prev]
        if not nxt or nxt[0] == start:
            return seq
        prev, cur = cur, nxt[0]


def _check_designations(pieces: list[LeftoverPiece]) -> None:
    seen: dict[int, int] = {}
    for i, pc in enumerate(pieces):
        for v in set(pc.designated):
            if v in seen:
                raise InternalInvariantViolation(f"vertex {v} designated by pieces {seen[v]} and {i}")
            seen[v] = i


# ---------------------------------------------------------------------------
# extension


class _CrossingSupply:
    """Crossing-tree edges at each vertex, in preference order t1, t2, t3 then by id."""

    def __init__(self, g: MultiGraph, trees: Sequence[frozenset[int]]):
        self.g = g
        self.by_vertex: dict[int, list[tuple[int, int]]] = {}
        for rank, tree in enumerate(trees):
            for e in sorted(tree):
                for x in g.endpoints(e):
                    self.by_vertex.setdefault(x, []).append((rank, e))
        for lst in self.by_vertex.values():
            lst.sort()
        self.used: set[int] = set()

    def take(self, v: int, avoid: set[int], max_rank: int = 3) -> tuple[int, int]:
        for rank, e in self.by_vertex.get(v, ()):
            if rank >= max_rank or e in self.used or not self.g.is_alive(e):
                continue
            w = self.g.other(e, v)
            if w in avoid:
                continue
            self.used.add(e)
            return w, e
        raise InternalInvariantViolation(f"no usable crossing-tree edge at vertex {v}")


def extend_fragments(
    g: MultiGraph, pieces: Sequence[LeftoverPiece], t1: frozenset[int], t2: frozenset[int], t3: frozenset[int]
) -> list[TreeCopy]:
    """Complete every piece to Y-copies with crossing-tree edges; pieces and used tree edges are removed from ``g``."""
    supply = _CrossingSupply(g, (t1, t2, t3))
    out: list[TreeCopy] = []
    for pc in pieces:
        vs, es = pc.vertices, pc.edge_ids
        if pc.shape == "3path":
            p0, p1, p2, p3 = vs
            w, ew = supply.take(p1, set(vs), 2)
            out.append(y_copy(p1, p0, w, p2, p3, es[0], ew, es[1], es[2]))
        elif pc.shape == "2path":
            x, y, z = vs
            w1, e1 = supply.take(z, set(vs), 2)
            w2, e2 = supply.take(z, set(vs) | {w1}, 2)
            out.append(y_copy(z, w1, w2, y, x, e1, e2, es[1], es[0]))
        elif pc.shape == "edge":
            out.append(_edge_copy(supply, vs[0], vs[1], es[0]))
        elif pc.shape == "3star":
            s, l1, l2, l3 = vs
            w, ew = supply.take(l1, set(vs), 2)
            out.append(y_copy(s, l2, l3, l1, w, es[1], es[2], es[0], ew))
        elif pc.shape == "triangle":
            a, b, c = vs
            e_ab, e_bc, e_ca = es
            out.append(_edge_copy(supply, a, b, e_ab))
            w1, e1 = supply.take(b, {a, b, c})
            w2, e2 = supply.take(b, {a, b, c, w1})
            out.append(y_copy(b, w1, w2, c, a, e1, e2, e_bc, e_ca))
        else:
            raise InternalInvariantViolation(f"unknown piece shape {pc.shape}")
    for c in out:
        g.remove_edges(c.edge_map)
    return out


def _edge_copy(supply: _CrossingSupply, a: int, b: int, e_ab: int) -> TreeCopy:
    """Single edge a-b: two tree edges at a (t1/t2), one at b (t1..t3) avoiding a's new neighbours."""
    w1, e1 = supply.take(a, {a, b}, 2)
    w2, e2 = supply.take(a, {a, b, w1}, 2)
    w3, e3 = supply.take(b, {a, b, w1, w2}, 3)
    return y_copy(a, w1, w2, b, w3, e1, e2, e_ab, e3)


# ---------------------------------------------------------------------------
# whole stage


@dataclass(frozen=True)
class BipartizeResult:
    bipartition: Bipartition
    pack: TreePack                # trees that survive for later stages
    removed: tuple[TreeCopy, ...]
    graph: MultiGraph             # working copy after the removals
    side_trees: TreePack          # the six trees spent on the sides (partially consumed)


def bipartize(
    g: MultiGraph,
    k: int,
    *,
    strength: int | None = None,
    check: bool = True,
) -> BipartizeResult:
    """Remove Y-copies from a ``(4k+23)``-edge-connected simple graph until only crossing edges remain.

    The bipartition has a ``(2k+12)``-edge-connected crossing graph holding
    ``k+6`` disjoint spanning trees; three of them serve each side and the
    other ``k`` are returned untouched.  ``strength`` overrides ``2k+12`` (the
    connectivity check then asks for ``2*strength - 1``).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not g.is_simple():
        raise PreconditionError("Y-bipartization needs a simple graph")
    strength = 2 * k + 12 if strength is None else strength
    if check:
        need = 4 * k + 23 if strength == 2 * k + 12 else 2 * strength - 1
        lam = edge_connectivity(g) if g.vertex_count >= 2 else 0
        if lam < need:
            raise InsufficientConnectivity(need, lam)
    work = g.copy()
    bip = max_cut_bipartition(work, strength, check=False)
    pack = pack_spanning_trees(work, k + 6, bip.crossing_edges)
    log.info("bipartition %d/%d with %d crossing edges; packed %d trees",
             len(bip.a_side), len(bip.b_side), len(bip.crossing_edges), len(pack))
    removed: list[TreeCopy] = []
    for s, trees in ((0, pack.trees[0:3]), (1, pack.trees[3:6])):
        side = bip.side(s)
        stripped, leftover = strip_y_copies_inside(work, side)
        pieces = classify_leftover(work, leftover)
        extended = extend_fragments(work, pieces, *trees)
        log.info("side %s: %d copies stripped, %d fragments extended",
                 "AB"[s], len(stripped), len(extended))
        removed += stripped + extended
    for e, u, v in work.edge_list():
        if bip.side_of[u] == bip.side_of[v]:
            raise InternalInvariantViolation(f"edge {e} inside a side survived bipartization")
    return BipartizeResult(bip, pack.sub(6, len(pack)), tuple(removed), work, pack.sub(0, 6))
