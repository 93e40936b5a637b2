"""Degree repair on side A by Y-copies laid along an Euler trail.

Both phases build a spanning even subgraph E from two degree-bounded trees
and walk its closed trail from an A-vertex.  Consecutive trail edges
``x - b - x⁺`` form the 2-edge path of a Y whose other two edges ("auxiliary"
edges, never from E) sit at ``x⁺`` (a plain brick: 1 edge removed at x, 3 at
x⁺) or at ``x`` (a reversed brick: 3 at x, 1 at x⁺).

Phase one removes plain bricks between consecutive odd A-vertices, making
every A-degree even.  Phase two consumes all of E and picks the brick at each
A-position so that every visit removes 0 mod 4 edges, except the first visit
of a vertex of degree 2 mod 4, which removes 2 mod 4.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from ydecomp.connectivity.bounded import bounded_degree_spanning_tree
from ydecomp.connectivity.euler import EulerStructure, euler_spanning_subgraph
from ydecomp.connectivity.packing import TreePack, check_tree_pack
from ydecomp.errors import InternalInvariantViolation, PackingFailed, PreconditionError
from ydecomp.graph_core import Bipartition, MultiGraph, TreeCopy, y_copy

log = logging.getLogger(__name__)

Trace = Callable[[str], None]


@dataclass(frozen=True)
class PhaseReport:
    phase: str
    removed: tuple[TreeCopy, ...]
    euler: EulerStructure | None
    euler_edges_used: frozenset[int]
    side_degrees_before: dict[int, int] = field(compare=False)
    side_degrees_after: dict[int, int] = field(compare=False)
    bounded_trees: tuple[frozenset[int], ...] = ()


def _a_side(g: MultiGraph, bip: Bipartition) -> list[int]:
    side = bip.side_of
    for e, u, v in g.edge_list():
        if side[u] == side[v]:
            raise PreconditionError(f"edge {e} = ({u}, {v}) does not cross the bipartition")
    return [v for v in range(g.vertex_count) if side[v] == 0]


def _group_size(pack: TreePack, wanted: int, relaxed: bool) -> int:
    if not relaxed:
        if len(pack) < 2 * wanted:
            raise PreconditionError(f"phase needs {2 * wanted} trees, pack has {len(pack)}")
        return wanted
    size = min(wanted, len(pack) // 2)
    if size < 1:
        raise PackingFailed(f"phase needs at least two spanning trees, pack has {len(pack)}")
    return size


def _euler_structure(g: MultiGraph, pack: TreePack, size: int, a_side: list[int], relaxed: bool):
    """Bounded trees of the two groups and the Euler structure they span.

    In relaxed mode the trees instead aim at A-degree 2 (best effort, B
    unconstrained): only A-side Euler degrees drive the auxiliary demand.
    """
    trees = pack.sub(0, 2 * size)
    err = check_tree_pack(g, trees)
    if err:
        raise PreconditionError(f"phase trees are not intact: {err}")
    m1, m2 = pack.union(range(size)), pack.union(range(size, 2 * size))
    if relaxed:
        bounds = [g.vertex_count] * g.vertex_count
        for a in a_side:
            bounds[a] = 2
        t1 = bounded_degree_spanning_tree(g, size, m1, bounds=bounds, best_effort=True)
        t2 = bounded_degree_spanning_tree(g, size, m2, bounds=bounds, best_effort=True)
    else:
        t1 = bounded_degree_spanning_tree(g, size, m1)
        t2 = bounded_degree_spanning_tree(g, size, m2)
    return euler_spanning_subgraph(g, t1, t2), m1 | m2, (t1, t2)


class _AuxPool:
    """Auxiliary edges per A-vertex, lowest id first."""

    def __init__(self, g: MultiGraph, a_side: list[int], pool: set[int]):
        self.g = g
        self.at = {a: sorted(e for e in g.incident(a) if e in pool) for a in a_side}
        self.demand: Counter[int] = Counter()

    def take(self, v: int, avoid: set[int]) -> tuple[tuple[int, int], tuple[int, int]]:
        got: list[tuple[int, int]] = []
        lst = self.at[v]
        for e in lst:
            if not self.g.is_alive(e):
                continue
            w = self.g.other(e, v)
            if w in avoid or any(w == x for x, _ in got):
                continue
            got.append((w, e))
            if len(got) == 2:
                break
        if len(got) < 2:
            raise InternalInvariantViolation(f"fewer than two auxiliary edges left at vertex {v}")
        for _, e in got:
            lst.remove(e)
        self.demand[v] += 2
        return got[0], got[1]


def _start_at(es: EulerStructure, v: int) -> EulerStructure:
    return es.rotated(es.vertices.index(v))


def _parity_bricks(g: MultiGraph, verts: tuple[int, ...]) -> int:
    """Number of plain bricks the parity walk lays along ``verts`` (simulation only)."""
    odd = {v: g.degree(v) % 2 for v in verts[::2]}
    bricks = 0
    for i in range(0, len(verts) - 1, 2):
        x, xp = verts[i], verts[i + 2]
        if odd[x]:
            bricks += 1
            odd[x] ^= 1
            odd[xp] ^= 1
    return bricks


def _cheaper_start(g: MultiGraph, es: EulerStructure, first_bad: int) -> EulerStructure:
    """Start at ``first_bad`` or at the next odd vertex along the trail, whichever lays fewer bricks.

    The two starts pair the odd vertices along the trail in the two possible
    consecutive ways.
    """
    a = _start_at(es, first_bad)
    nxt = next((i for i in range(2, len(a.trail), 2)
                if g.degree(a.vertices[i]) % 2 and a.vertices[i] != first_bad), None)
    if nxt is None:
        return a
    b = a.rotated(nxt)
    return b if _parity_bricks(g, b.vertices) < _parity_bricks(g, a.vertices) else a


def _remove(g: MultiGraph, copy: TreeCopy, removed: list[TreeCopy]) -> None:
    g.remove_edges(copy.edge_map)
    removed.append(copy)


def fix_parity(
    g: MultiGraph,
    bip: Bipartition,
    pack: TreePack,
    *,
    group_size: int = 7,
    relaxed: bool = False,
    trace: Trace | None = None,
) -> PhaseReport:
    """Make every A-degree even (mutates ``g``).

    Uses the first ``2*group_size`` trees of ``pack`` (two groups; in relaxed
    mode the groups shrink to what the pack holds).  Auxiliary edges come from
    the two groups' union minus E, or from every live edge outside E when
    ``relaxed``.
    """
    a_side = _a_side(g, bip)
    before = {a: g.degree(a) for a in a_side}
    bad = [a for a in a_side if before[a] % 2]
    if not bad:
        return PhaseReport("parity", (), None, frozenset(), before, dict(before))
    size = _group_size(pack, group_size, relaxed)
    es, m, bounded = _euler_structure(g, pack, size, a_side, relaxed)
    es = _cheaper_start(g, es, min(bad))
    pool = (set(g.edges()) if relaxed else set(m)) - es.subgraph
    aux = _AuxPool(g, a_side, pool)
    if not relaxed:
        for a in a_side:
            if len(aux.at[a]) < g.degree_in(a, es.subgraph):
                raise InternalInvariantViolation(f"vertex {a}: auxiliary supply below its Euler degree")
    verts, trail = es.vertices, es.trail
    removed: list[TreeCopy] = []
    used: set[int] = set()
    for i in range(0, len(trail), 2):
        x = verts[i]
        if g.degree(x) % 2 == 0:
            continue
        b, xp = verts[i + 1], verts[i + 2]
        if x == xp:
            raise PreconditionError(f"parallel edges at {x}-{b}: the host must be simple")
        (w1, a1), (w2, a2) = aux.take(xp, {x, b, xp})
        _remove(g, y_copy(xp, w1, w2, b, x, a1, a2, trail[i + 1], trail[i]), removed)
        used.update((trail[i], trail[i + 1]))
        if trace:
            trace(f"parity {xp} brick=plain path={x}-{b}-{xp} aux={w1},{w2}")
    after = {a: g.degree(a) for a in a_side}
    odd = [a for a in a_side if after[a] % 2]
    if odd:
        raise InternalInvariantViolation(f"A-vertices still odd after the parity walk: {odd[:5]}")
    log.info("parity phase: %d bad vertices, %d copies removed", len(bad), len(removed))
    return PhaseReport("parity", tuple(removed), es, frozenset(used), before, after, bounded)


def fix_mod4(
    g: MultiGraph,
    bip: Bipartition,
    pack: TreePack,
    *,
    group_size: int = 9,
    relaxed: bool = False,
    trace: Trace | None = None,
) -> PhaseReport:
    """Make every A-degree divisible by 4, consuming the whole Euler subgraph (mutates ``g``)."""
    a_side = _a_side(g, bip)
    before = {a: g.degree(a) for a in a_side}
    odd = [a for a in a_side if before[a] % 2]
    if odd:
        raise PreconditionError(f"A-degrees must be even before the mod-4 phase (odd at {odd[:5]})")
    bad = {a for a in a_side if before[a] % 4 == 2}
    size = _group_size(pack, group_size, relaxed)
    es, m, bounded = _euler_structure(g, pack, size, a_side, relaxed)
    b1 = min(bad) if bad else min(a_side)
    es = _start_at(es, b1)
    pool = (set(g.edges()) if relaxed else set(m)) - es.subgraph
    aux = _AuxPool(g, a_side, pool)
    euler_deg = {a: g.degree_in(a, es.subgraph) for a in a_side}
    if not relaxed:
        for a in a_side:
            if len(aux.at[a]) < euler_deg[a] + 2:
                raise InternalInvariantViolation(
                    f"vertex {a}: {len(aux.at[a])} auxiliary edges, need {euler_deg[a] + 2}"
                )
    verts, trail = es.vertices, es.trail
    removed: list[TreeCopy] = []
    count: Counter[int] = Counter()
    seen: set[int] = set()
    heavy: Counter[int] = Counter()   # visits taking four auxiliary edges
    arrived_aux = 0
    for i in range(0, len(trail), 2):
        x, b, xp = verts[i], verts[i + 1], verts[i + 2]
        if x == xp:
            raise PreconditionError(f"parallel edges at {x}-{b}: the host must be simple")
        if i == 0:
            reverse = False
        else:
            # cumulative target mod 4; b1's opening brick belongs to its closing visit
            target = 1 if x == b1 else (2 if x in bad else 0)
            r = (target - count[x]) % 4
            if r not in (1, 3):
                raise InternalInvariantViolation(f"brick rule gave {r} at vertex {x}")
            reverse = r == 3
        first_visit = x not in seen
        seen.add(x)
        if reverse:
            (w1, a1), (w2, a2) = aux.take(x, {x, b, xp})
            copy = y_copy(x, w1, w2, b, xp, a1, a2, trail[i], trail[i + 1])
            count[x] += 3
            count[xp] += 1
            if arrived_aux + 2 == 4:
                heavy[x] += 1
                if not (first_visit and x in bad):
                    raise InternalInvariantViolation(f"vertex {x} takes four auxiliary edges off its marked visit")
            arrived_aux = 0
        else:
            (w1, a1), (w2, a2) = aux.take(xp, {x, b, xp})
            copy = y_copy(xp, w1, w2, b, x, a1, a2, trail[i + 1], trail[i])
            count[x] += 1
            count[xp] += 3
            arrived_aux = 2
        _remove(g, copy, removed)
        if trace:
            trace(f"mod4 {copy.three_vertex} brick={'reversed' if reverse else 'plain'} "
                  f"path={x}-{b}-{xp} aux={w1},{w2}")
    if max(heavy.values(), default=0) > 1:
        raise InternalInvariantViolation("a vertex took four auxiliary edges more than once")
    over = [a for a in a_side if aux.demand[a] > euler_deg[a] + 2]
    if over:
        raise InternalInvariantViolation(f"auxiliary demand above the Euler degree plus 2 at {over[:5]}")
    after = {a: g.degree(a) for a in a_side}
    wrong = [a for a in a_side if after[a] % 4]
    if wrong:
        raise InternalInvariantViolation(f"A-degrees not divisible by 4 after the mod-4 walk: {wrong[:5]}")
    log.info("mod-4 phase: %d bad vertices, %d copies removed", len(bad), len(removed))
    return PhaseReport("mod4", tuple(removed), es, es.subgraph, before, after, bounded)
