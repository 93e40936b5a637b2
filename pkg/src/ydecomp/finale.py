"""Final stage: set aside a quarter of each A-vertex's edges, split the rest into balanced 3-paths, glue.

Balanced 3-path decomposition of a bipartite graph with A-degrees divisible
by 3 (every A-vertex ends d/3 paths and is the middle of d/3 paths):

1. choose F with ``deg_F(a) = 2 deg(a) / 3`` on A and every B-degree even
   (see ``_even_selection``);
2. orient F along Euler circuits;
3. roles: F-edges a→b are connectors, b→a end at A, non-F edges end at B;
4. pair end-at-B with connectors at each A-vertex and connectors with
   end-at-A at each B-vertex; each chain ``b1 - a1 - b2 - a2`` is a 3-path.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ydecomp.connectivity.euler import euler_trail
from ydecomp.errors import DivisibilityViolation, InternalInvariantViolation, ParityRepairFailed, PreconditionError
from ydecomp.graph_core import MultiGraph, TreeCopy, y_copy

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 24


class Role(enum.Enum):
    END_AT_A = "end_at_a"       # b2-a2
    END_AT_B = "end_at_b"       # a1-b1
    CONNECTOR = "connector"     # a1-b2


@dataclass(frozen=True)
class RoleAssignment:
    roles: Mapping[int, Role]
    head: Mapping[int, int]     # F-edges: the vertex the orientation points at


@dataclass(frozen=True)
class P4:
    """Path b1 - a1 - b2 - a2 with edges (b1a1, a1b2, b2a2)."""

    vertices: tuple[int, int, int, int]
    edges: tuple[int, int, int]

    @property
    def middle(self) -> int:
        return self.vertices[1]

    @property
    def end(self) -> int:
        return self.vertices[3]


@dataclass(frozen=True)
class BalancedPathSet:
    paths: tuple[P4, ...]

    def __len__(self):
        return len(self.paths)

    def covered(self) -> frozenset[int]:
        return frozenset(e for p in self.paths for e in p.edges)


# ---------------------------------------------------------------------------
# checks


def balance_error(g: MultiGraph, core: Iterable[int], a_side: Iterable[int], ps: BalancedPathSet) -> str | None:
    """Why ``ps`` is not a balanced 3-path decomposition of ``core`` (``None`` if it is)."""
    core = set(core)
    a_set = set(a_side)
    seen: set[int] = set()
    mid: dict[int, int] = {}
    end: dict[int, int] = {}
    for i, p in enumerate(ps.paths):
        b1, a1, b2, a2 = p.vertices
        if len(set(p.vertices)) != 4:
            return f"path {i} repeats a vertex"
        if a1 not in a_set or a2 not in a_set or b1 in a_set or b2 in a_set:
            return f"path {i} does not alternate B-A-B-A"
        for e, (x, y) in zip(p.edges, ((b1, a1), (a1, b2), (b2, a2))):
            if sorted(g.endpoints(e)) != sorted((x, y)):
                return f"path {i}: edge {e} does not join {x} and {y}"
            if e in seen:
                return f"edge {e} used twice"
            seen.add(e)
        mid[a1] = mid.get(a1, 0) + 1
        end[a2] = end.get(a2, 0) + 1
    if seen != core:
        return "paths do not cover the core exactly"
    for a in a_set:
        d = g.degree_in(a, core)
        if mid.get(a, 0) != d // 3 or end.get(a, 0) != d // 3:
            return f"vertex {a}: middle {mid.get(a, 0)}, end {end.get(a, 0)}, want {d // 3} each"
    return None


def _check_input(g: MultiGraph, core: set[int], a_set: set[int]) -> dict[int, list[int]]:
    inc: dict[int, list[int]] = {}
    for e in sorted(core):
        u, v = g.endpoints(e)
        if (u in a_set) == (v in a_set):
            raise PreconditionError(f"edge {e} = ({u}, {v}) does not cross the bipartition")
        inc.setdefault(u, []).append(e)
        inc.setdefault(v, []).append(e)
    for a in a_set:
        if len(inc.get(a, ())) % 3:
            raise DivisibilityViolation(f"A-vertex {a} has degree {len(inc.get(a, ()))}, not divisible by 3")
    return inc


# ---------------------------------------------------------------------------
# construction


def _even_selection(
    g: MultiGraph, inc: dict[int, list[int]], a_set: set[int], seed: int = 0, attempts: int = 64
) -> set[int]:
    """F with ``deg_F(a) = 2 deg(a)/3`` on A and even degrees on B.

    Start from an exact selection at A, then pair every non-F edge at each
    A-vertex with its own F-edge.  Exchanging the two edges of a pair keeps
    every A-degree of F and toggles the parity of both B-ends, and distinct
    pairs share no edge, so any set of pairs can be exchanged at once.  The
    pairs form a multigraph on B; a T-join of the odd B-vertices in one of its
    spanning forests says which pairs to exchange.  When some forest component
    holds an odd number of defects, retry with a reshuffled selection.
    """
    rng = random.Random(seed)
    a_list = sorted(a_set)
    b_list = sorted(v for v in inc if v not in a_set)
    odd: list[int] = []
    for attempt in range(attempts):
        f: set[int] = set()
        pairs: list[tuple[int, int]] = []      # (F-edge, non-F edge) at one A-vertex
        for a in a_list:
            lst = list(inc.get(a, []))
            if attempt:
                rng.shuffle(lst)
            r = len(lst) // 3
            f.update(lst[r:])
            pairs.extend(zip(lst[r : 2 * r], lst[:r]))
        odd = [b for b in b_list if sum(e in f for e in inc[b]) % 2]
        if not odd:
            return f
        chosen = _forest_join(g, a_set, pairs, set(odd))
        if chosen is None:
            continue
        for i in chosen:
            f.symmetric_difference_update(pairs[i])
        for a in a_list:
            if sum(e in f for e in inc.get(a, [])) != 2 * (len(inc.get(a, [])) // 3):
                raise InternalInvariantViolation(f"parity repair changed the F-degree of A-vertex {a}")
        bad = [b for b in b_list if sum(e in f for e in inc[b]) % 2]
        if bad:
            raise InternalInvariantViolation(f"parity repair left odd B-vertices {bad}")
        return f
    raise ParityRepairFailed(f"no exchange set fixes the B-parities after {attempts} selections", odd)


def _forest_join(g: MultiGraph, a_set: set[int], pairs, odd: set[int]) -> list[int] | None:
    """Indices of pairs whose exchange toggles exactly the vertices in ``odd``, or ``None``."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for i, (ef, en) in enumerate(pairs):
        x = g.other(ef, _a_end(g, ef, a_set))
        y = g.other(en, _a_end(g, en, a_set))
        adj.setdefault(x, []).append((y, i))
        adj.setdefault(y, []).append((x, i))
    parent: dict[int, tuple[int, int] | None] = {}
    chosen: list[int] = []
    mark = set(odd)
    for root in sorted(odd):
        if root in parent:
            continue
        parent[root] = None
        order = [root]
        for v in order:
            for w, i in adj.get(v, ()):
                if w not in parent:
                    parent[w] = (v, i)
                    order.append(w)
        for v in reversed(order[1:]):
            if v in mark:
                p, i = parent[v]
                chosen.append(i)
                mark.discard(v)
                mark ^= {p}
        if root in mark:
            return None
    return chosen


def _a_end(g: MultiGraph, e: int, a_set: set[int]) -> int:
    u, v = g.endpoints(e)
    return u if u in a_set else v


def _orient(g: MultiGraph, f: set[int]) -> dict[int, int]:
    """Head of every F-edge along Euler circuits of each component of F."""
    comp_of: dict[int, int] = {}
    for i, comp in enumerate(g.components(f)):
        for v in comp:
            comp_of[v] = i
    groups: dict[int, list[int]] = {}
    for e in f:
        groups.setdefault(comp_of[g.endpoints(e)[0]], []).append(e)
    head: dict[int, int] = {}
    for eids in groups.values():
        trail, verts = euler_trail(g, eids)
        for e, v in zip(trail, verts[1:]):
            head[e] = v
    return head


def assign_roles(g: MultiGraph, core: Iterable[int], a_side: Iterable[int], seed: int = 0) -> RoleAssignment:
    core = set(core)
    a_set = set(a_side)
    inc = _check_input(g, core, a_set)
    f = _even_selection(g, inc, a_set, seed)
    head = _orient(g, f)
    roles = {}
    for e in core:
        if e not in f:
            roles[e] = Role.END_AT_B
        elif head[e] in a_set:
            roles[e] = Role.END_AT_A
        else:
            roles[e] = Role.CONNECTOR
    return RoleAssignment(roles, head)


def paths_from_roles(
    g: MultiGraph, ra: RoleAssignment, a_side: Iterable[int], rng: random.Random | None = None
) -> BalancedPathSet:
    """Pair roles at each vertex and read off the 3-paths.

    Pairing is in id order, or shuffled by ``rng``; any pairing gives valid paths.
    """
    a_set = set(a_side)
    at_a: dict[int, tuple[list[int], list[int]]] = {}   # a -> (end-at-B, connectors)
    at_b: dict[int, tuple[list[int], list[int]]] = {}   # b -> (connectors, end-at-A)
    for e in sorted(ra.roles):
        a = _a_end(g, e, a_set)
        b = g.other(e, a)
        r = ra.roles[e]
        if r is Role.END_AT_B:
            at_a.setdefault(a, ([], []))[0].append(e)
        elif r is Role.CONNECTOR:
            at_a.setdefault(a, ([], []))[1].append(e)
            at_b.setdefault(b, ([], []))[0].append(e)
        else:
            at_b.setdefault(b, ([], []))[1].append(e)
    end_b_of: dict[int, int] = {}
    end_a_of: dict[int, int] = {}
    for table, out, what in ((at_a, end_b_of, "A"), (at_b, end_a_of, "B")):
        for v, (xs, ys) in table.items():
            if len(xs) != len(ys):
                raise InternalInvariantViolation(f"{what}-vertex {v}: unbalanced roles {len(xs)} vs {len(ys)}")
            if rng is not None:
                rng.shuffle(ys)
            conn, other = (ys, xs) if what == "A" else (xs, ys)
            out.update(zip(conn, other))
    paths = []
    for c in sorted(end_b_of):
        a1 = _a_end(g, c, a_set)
        b2 = g.other(c, a1)
        eb, ea = end_b_of[c], end_a_of[c]
        paths.append(P4((g.other(eb, a1), a1, b2, g.other(ea, b2)), (eb, c, ea)))
    return BalancedPathSet(tuple(paths))


def balanced_p4_decomposition(
    g: MultiGraph, core: Iterable[int], a_side: Iterable[int], *, fallback: bool = True, seed: int = 0
) -> BalancedPathSet:
    """Balanced 3-path decomposition of the bipartite edge set ``core``.

    Cores of at most ``EXHAUSTIVE_LIMIT`` edges fall back to exhaustive search
    if the construction fails.
    """
    core = set(core)
    a_side = list(a_side)
    try:
        ps = paths_from_roles(g, assign_roles(g, core, a_side, seed), a_side)
    except ParityRepairFailed:
        if not (fallback and len(core) <= EXHAUSTIVE_LIMIT):
            raise
        ps = exhaustive_balanced_p4(g, core, a_side)
        if ps is None:
            raise
    err = balance_error(g, core, a_side, ps)
    if err:
        raise InternalInvariantViolation(f"balanced 3-path decomposition is wrong: {err}")
    return ps


def exhaustive_balanced_p4(g: MultiGraph, core: Iterable[int], a_side: Iterable[int]) -> BalancedPathSet | None:
    """Backtracking search (always through the lowest uncovered edge); ``None`` if none exists."""
    core = set(core)
    a_set = set(a_side)
    inc = _check_input(g, core, a_set)
    quota = {a: len(inc.get(a, ())) // 3 for a in a_set}
    mid = {a: 0 for a in a_set}
    uncovered = set(core)
    chosen: list[P4] = []

    def paths_through(e):
        a, b = _a_end(g, e, a_set), None
        b = g.other(e, a)
        out = []
        # e as the connector a1-b2
        for eb in inc[a]:
            if eb == e or eb not in uncovered:
                continue
            b1 = g.other(eb, a)
            if b1 == b:
                continue
            for ea in inc[b]:
                if ea == e or ea not in uncovered:
                    continue
                a2 = g.other(ea, b)
                if a2 != a:
                    out.append(P4((b1, a, b, a2), (eb, e, ea)))
        # e as the end edge a1-b1 (a is the middle)
        for c in inc[a]:
            if c == e or c not in uncovered:
                continue
            b2 = g.other(c, a)
            if b2 == b:
                continue
            for ea in inc[b2]:
                if ea == c or ea not in uncovered:
                    continue
                a2 = g.other(ea, b2)
                if a2 != a:
                    out.append(P4((b, a, b2, a2), (e, c, ea)))
        # e as the end edge b2-a2 (a is the end)
        for c in inc[b]:
            if c == e or c not in uncovered:
                continue
            a1 = g.other(c, b)
            if a1 == a:
                continue
            for eb in inc[a1]:
                if eb == c or eb not in uncovered:
                    continue
                b1 = g.other(eb, a1)
                if b1 != b:
                    out.append(P4((b1, a1, b, a), (eb, c, e)))
        return out

    def search() -> bool:
        if not uncovered:
            return all(mid[a] == quota[a] for a in a_set)
        e = min(uncovered)
        for p in paths_through(e):
            a1 = p.middle
            if mid[a1] == quota[a1]:
                continue
            mid[a1] += 1
            uncovered.difference_update(p.edges)
            chosen.append(p)
            if search():
                return True
            chosen.pop()
            uncovered.update(p.edges)
            mid[a1] -= 1
        return False

    if len(core) % 3:
        return None
    return BalancedPathSet(tuple(chosen)) if search() else None


# ---------------------------------------------------------------------------
# reserve and glue


def reserve_quarter(
    g: MultiGraph, a_side: Sequence[int], t5: Iterable[int], t6: Iterable[int]
) -> tuple[dict[int, frozenset[int]], frozenset[int]]:
    """Put aside ``deg(a)/4`` lowest-id edges outside ``t5 ∪ t6`` at every A-vertex."""
    keep = set(t5) | set(t6)
    reserved: dict[int, frozenset[int]] = {}
    for a in a_side:
        d = g.degree(a)
        if d % 4:
            raise DivisibilityViolation(f"A-vertex {a} has degree {d}, not divisible by 4")
        free = sorted(e for e in g.incident(a) if e not in keep)
        if len(free) < d // 4:
            raise InternalInvariantViolation(
                f"vertex {a}: {len(free)} edges outside the kept trees, need {d // 4}"
            )
        reserved[a] = frozenset(free[: d // 4])
    taken = set().union(*reserved.values()) if reserved else set()
    core = frozenset(e for e in g.edges() if e not in taken)
    return reserved, core


def glue(g: MultiGraph, paths: BalancedPathSet, reserved: Mapping[int, Iterable[int]]) -> list[TreeCopy]:
    """Attach one reserved edge at each path's middle: 3-vertex a1, 2-vertex b2."""
    pool = {a: sorted(es) for a, es in reserved.items()}
    by_middle: dict[int, list[P4]] = {}
    for p in paths.paths:
        by_middle.setdefault(p.middle, []).append(p)
    for a in set(pool) | set(by_middle):
        if len(pool.get(a, ())) != len(by_middle.get(a, ())):
            raise InternalInvariantViolation(
                f"vertex {a}: {len(pool.get(a, ()))} reserved edges for {len(by_middle.get(a, ()))} path middles"
            )
    out = []
    for a in sorted(by_middle):
        for p, e in zip(by_middle[a], pool[a]):
            b1, a1, b2, a2 = p.vertices
            c = g.other(e, a1)
            if c in (b1, b2):
                raise InternalInvariantViolation(f"reserved edge {e} at {a1} runs parallel to a path edge")
            out.append(y_copy(a1, b1, c, b2, a2, p.edges[0], e, p.edges[1], p.edges[2]))
    return out
