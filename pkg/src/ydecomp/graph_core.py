"""Host multigraphs with stable edge ids, pattern trees, embeddings and their verification."""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ydecomp.errors import GraphFormatError


class MultiGraph:
    """Undirected multigraph on vertices ``0..vertex_count-1``.

    Edge ids are list positions and are never reused.  Removing an edge only
    marks it dead, so ids handed out earlier stay meaningful for bookkeeping.
    """

    def __init__(self, vertex_count: int = 0, edges: Iterable[tuple[int, int]] = ()):
        if vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        self.vertex_count = vertex_count
        self._ends: list[tuple[int, int]] = []
        self._alive: list[bool] = []
        self._inc: list[dict[int, None]] = [{} for _ in range(vertex_count)]
        self._alive_count = 0
        for u, v in edges:
            self.add_edge(u, v)

    # construction -------------------------------------------------------
    def add_vertex(self) -> int:
        self._inc.append({})
        self.vertex_count += 1
        return self.vertex_count - 1

    def add_edge(self, u: int, v: int) -> int:
        if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
            raise ValueError(f"edge ({u}, {v}) out of range for {self.vertex_count} vertices")
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        eid = len(self._ends)
        self._ends.append((u, v))
        self._alive.append(True)
        self._inc[u][eid] = None
        self._inc[v][eid] = None
        self._alive_count += 1
        return eid

    def remove_edge(self, eid: int) -> None:
        if not self._alive[eid]:
            raise KeyError(f"edge {eid} is already removed")
        u, v = self._ends[eid]
        self._alive[eid] = False
        del self._inc[u][eid]
        del self._inc[v][eid]
        self._alive_count -= 1

    def remove_edges(self, eids: Iterable[int]) -> None:
        for e in eids:
            self.remove_edge(e)

    def restore_edge(self, eid: int) -> None:
        if self._alive[eid]:
            raise KeyError(f"edge {eid} is alive")
        u, v = self._ends[eid]
        self._alive[eid] = True
        self._inc[u][eid] = None
        self._inc[v][eid] = None
        self._alive_count += 1

    def copy(self) -> MultiGraph:
        g = MultiGraph.__new__(MultiGraph)
        g.vertex_count = self.vertex_count
        g._ends = list(self._ends)
        g._alive = list(self._alive)
        g._inc = [dict(d) for d in self._inc]
        g._alive_count = self._alive_count
        return g

    def restricted(self, eids: Iterable[int]) -> MultiGraph:
        """Same vertices and edge ids, with only ``eids`` alive."""
        g = MultiGraph.__new__(MultiGraph)
        g.vertex_count = self.vertex_count
        g._ends = self._ends  # append-only, safe to share while no edges are added
        g._alive = [False] * len(self._ends)
        g._inc = [{} for _ in range(self.vertex_count)]
        g._alive_count = 0
        for e in sorted(set(eids)):
            u, v = self._ends[e]
            g._alive[e] = True
            g._inc[u][e] = None
            g._inc[v][e] = None
            g._alive_count += 1
        return g

    # queries --------------------------------------------------------------
    @property
    def edge_count(self) -> int:
        return self._alive_count

    @property
    def id_bound(self) -> int:
        """One past the largest edge id ever issued."""
        return len(self._ends)

    def is_alive(self, eid: int) -> bool:
        return 0 <= eid < len(self._ends) and self._alive[eid]

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self._ends[eid]

    def other(self, eid: int, v: int) -> int:
        a, b = self._ends[eid]
        if a == v:
            return b
        if b == v:
            return a
        raise ValueError(f"vertex {v} is not an endpoint of edge {eid}")

    def degree(self, v: int) -> int:
        return len(self._inc[v])

    def degrees(self) -> list[int]:
        return [len(d) for d in self._inc]

    def incident(self, v: int) -> Iterator[int]:
        return iter(self._inc[v])

    def edges(self) -> list[int]:
        return [e for e, a in enumerate(self._alive) if a]

    def edge_list(self) -> list[tuple[int, int, int]]:
        return [(e, *self._ends[e]) for e, a in enumerate(self._alive) if a]

    def neighbors(self, v: int) -> set[int]:
        return {self.other(e, v) for e in self._inc[v]}

    def is_simple(self) -> bool:
        seen = set()
        for e, a in enumerate(self._alive):
            if a:
                u, v = self._ends[e]
                key = (u, v) if u < v else (v, u)
                if key in seen:
                    return False
                seen.add(key)
        return True

    def degree_in(self, v: int, eids: set[int] | frozenset[int]) -> int:
        return sum(1 for e in self._inc[v] if e in eids)

    def components(self, eids: Iterable[int] | None = None) -> list[list[int]]:
        """Vertex sets of connected components (of all alive edges, or of ``eids``)."""
        allowed = None if eids is None else set(eids)
        seen = [False] * self.vertex_count
        comps = []
        for s in range(self.vertex_count):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for e in self._incident_any(x, allowed):
                    y = self.other(e, x)
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def _incident_any(self, v, allowed):
        if allowed is None:
            return self._inc[v]
        return [e for e in self._inc[v] if e in allowed]

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or len(self.components()) == 1

    def __repr__(self):
        return f"MultiGraph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"


def parse_graph(text: str) -> MultiGraph:
    """Read the edge-list format: a header ``n m`` followed by ``m`` lines ``u v``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty document")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphFormatError(f"non-integer header {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative vertex or edge count")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1} lines")
    g = MultiGraph(n)
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer endpoint in {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex out of range in {ln!r}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: loop at vertex {u}")
        g.add_edge(u, v)
    return g


def format_graph(g: MultiGraph) -> str:
    """Edge-list text of the alive edges, in id order (ids are renumbered on re-read)."""
    rows = [f"{g.vertex_count} {g.edge_count}"]
    rows.extend(f"{u} {v}" for _, u, v in g.edge_list())
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# patterns and embeddings


@dataclass(frozen=True)
class PatternTree:
    name: str
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    three_vertex: int | None = None
    two_vertex: int | None = None

    def __post_init__(self):
        n = self.vertex_count
        if len(self.edges) != n - 1:
            raise ValueError(f"pattern {self.name}: a tree on {n} vertices has {n - 1} edges")
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in self.edges:
            if not (0 <= x < n and 0 <= y < n) or x == y:
                raise ValueError(f"pattern {self.name}: bad edge {(x, y)}")
            rx, ry = find(x), find(y)
            if rx == ry:
                raise ValueError(f"pattern {self.name}: edges contain a cycle")
            parent[rx] = ry

    @property
    def size(self) -> int:
        """Number of edges, the ``t`` of a T-decomposition."""
        return len(self.edges)

    def degree(self, x: int) -> int:
        return sum(1 for a, b in self.edges if x in (a, b))

    def degree_sequence(self) -> tuple[int, ...]:
        return tuple(sorted(self.degree(x) for x in range(self.vertex_count)))

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per pattern vertex, sorted ``(neighbor, pattern_edge_index)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for i, (a, b) in enumerate(self.edges):
            adj[a].append((b, i))
            adj[b].append((a, i))
        for row in adj:
            row.sort()
        return adj

    def to_json(self) -> dict:
        doc = {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.edges]}
        if self.three_vertex is not None:
            doc["three_vertex"] = self.three_vertex
        if self.two_vertex is not None:
            doc["two_vertex"] = self.two_vertex
        return doc

    @classmethod
    def from_json(cls, name: str, doc: Mapping) -> PatternTree:
        return cls(
            name,
            int(doc["vertex_count"]),
            tuple((int(a), int(b)) for a, b in doc["edges"]),
            doc.get("three_vertex"),
            doc.get("two_vertex"),
        )


# Y: 3-vertex 0 with leaves 1, 2 and the 2-vertex 3, whose other neighbour is leaf 4.
Y = PatternTree("Y", 5, ((0, 1), (0, 2), (0, 3), (3, 4)), three_vertex=0, two_vertex=3)


def path_pattern(t: int) -> PatternTree:
    return PatternTree(f"P{t + 1}", t + 1, tuple((i, i + 1) for i in range(t)))


def star_pattern(t: int) -> PatternTree:
    return PatternTree(f"K1,{t}", t + 1, tuple((0, i) for i in range(1, t + 1)))


PATTERNS = {"Y": Y}


@dataclass(frozen=True)
class TreeCopy:
    """An embedding of ``pattern``: host vertex per pattern vertex, host edge id per pattern edge."""

    pattern: PatternTree
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]

    @property
    def edge_ids(self) -> frozenset[int]:
        return frozenset(self.edge_map)

    @property
    def host_vertices(self) -> tuple[int, ...]:
        return self.vertex_map

    @property
    def three_vertex(self) -> int | None:
        x = self.pattern.three_vertex
        return None if x is None else self.vertex_map[x]

    @property
    def two_vertex(self) -> int | None:
        x = self.pattern.two_vertex
        return None if x is None else self.vertex_map[x]

    def embedding_error(self, g: MultiGraph) -> str | None:
        """Why this is not a valid embedding into ``g`` (edges judged by id, alive or not)."""
        p = self.pattern
        if len(self.vertex_map) != p.vertex_count or len(self.edge_map) != p.size:
            return "map sizes do not match the pattern"
        if len(set(self.vertex_map)) != len(self.vertex_map):
            return f"vertex map {self.vertex_map} is not injective"
        if len(set(self.edge_map)) != len(self.edge_map):
            return f"edge map {self.edge_map} is not injective"
        for (x, y), e in zip(p.edges, self.edge_map):
            if not (0 <= e < g.id_bound):
                return f"edge id {e} does not exist"
            hu, hv = self.vertex_map[x], self.vertex_map[y]
            if sorted(g.endpoints(e)) != sorted((hu, hv)):
                return f"edge {e}={g.endpoints(e)} does not join {hu} and {hv}"
        return None


def y_copy(
    center: int,
    leaf_a: int,
    leaf_b: int,
    two: int,
    far: int,
    e_a: int,
    e_b: int,
    e_two: int,
    e_far: int,
) -> TreeCopy:
    """Y-copy with 3-vertex ``center``, 2-vertex ``two`` and ``far`` hanging off ``two``."""
    return TreeCopy(Y, (center, leaf_a, leaf_b, two, far), (e_a, e_b, e_two, e_far))


@dataclass(frozen=True)
class Decomposition:
    copies: tuple[TreeCopy, ...] = ()
    covered_edges: frozenset[int] = field(default_factory=frozenset)

    @classmethod
    def of(cls, copies: Iterable[TreeCopy]) -> Decomposition:
        copies = tuple(copies)
        covered = frozenset(e for c in copies for e in c.edge_map)
        return cls(copies, covered)

    def __len__(self):
        return len(self.copies)


@dataclass(frozen=True)
class Bipartition:
    side_of: tuple[int, ...]  # 0 for A, 1 for B
    crossing_edges: frozenset[int]

    @classmethod
    def from_sides(cls, g: MultiGraph, side_of: Iterable[int]) -> Bipartition:
        side = tuple(side_of)
        crossing = frozenset(e for e, u, v in g.edge_list() if side[u] != side[v])
        return cls(side, crossing)

    def side(self, s: int) -> list[int]:
        return [v for v, x in enumerate(self.side_of) if x == s]

    @property
    def a_side(self) -> list[int]:
        return self.side(0)

    @property
    def b_side(self) -> list[int]:
        return self.side(1)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def verify_decomposition(
    g: MultiGraph, target: Iterable[int], pattern: PatternTree, d: Decomposition
) -> Verdict:
    """Check that ``d`` is an exact, edge-disjoint partition of ``target`` into embeddings of ``pattern``."""
    target = set(target)
    seen: dict[int, int] = {}
    for i, c in enumerate(d.copies):
        if c.pattern != pattern:
            return Verdict(False, f"copy {i}: pattern {c.pattern.name} is not {pattern.name}")
        err = c.embedding_error(g)
        if err:
            return Verdict(False, f"copy {i}: {err}")
        for e in c.edge_map:
            if e in seen:
                return Verdict(False, f"edge {e} used by copies {seen[e]} and {i}")
            seen[e] = i
    used = set(seen)
    if used != set(d.covered_edges):
        return Verdict(False, "covered_edges does not match the copies' edges")
    if used != target:
        missing = sorted(target - used)[:5]
        extra = sorted(used - target)[:5]
        return Verdict(False, f"copies do not cover the target exactly (missing {missing}, extra {extra})")
    return Verdict(True)


def recount_is_partition(target: Iterable[int], d: Decomposition) -> bool:
    """Multiset recount: every target edge appears exactly once across the copies."""
    counts = Counter(e for c in d.copies for e in c.edge_map)
    return counts == Counter(set(target)) and all(v == 1 for v in counts.values())


# ---------------------------------------------------------------------------
# decomposition documents

FORMAT_TAG = "tree-decomposition/1"


def serialize_decomposition(d: Decomposition, fmt: str = "json") -> str:
    """Deterministic text for ``d``; ``fmt`` is ``json`` or ``edgelist`` (one line per copy)."""
    copies = sorted(d.copies, key=lambda c: (c.pattern.name, sorted(c.edge_map), c.vertex_map))
    if fmt == "json":
        patterns = {c.pattern.name: c.pattern.to_json() for c in copies}
        records = []
        for c in copies:
            rec = {"pattern": c.pattern.name, "vertex_map": list(c.vertex_map), "edge_map": list(c.edge_map)}
            if c.three_vertex is not None:
                rec["three_vertex"] = c.three_vertex
            if c.two_vertex is not None:
                rec["two_vertex"] = c.two_vertex
            records.append(rec)
        doc = {
            "format": FORMAT_TAG,
            "patterns": patterns,
            "covered_edges": sorted(d.covered_edges),
            "copies": records,
        }
        # one copy per line keeps large documents diffable
        head = json.dumps({k: v for k, v in doc.items() if k != "copies"}, sort_keys=True)
        body = ",\n".join(json.dumps(r, sort_keys=True) for r in records)
        return head[:-1] + ', "copies": [\n' + body + ("\n" if body else "") + "]}\n"
    if fmt == "edgelist":
        lines = [f"# {FORMAT_TAG} copies={len(copies)}"]
        for p in sorted({c.pattern for c in copies}, key=lambda p: p.name):
            lines.append(f"pattern {p.name} {p.vertex_count} " + " ".join(f"{a}-{b}" for a, b in p.edges))
        for c in copies:
            lines.append(
                f"copy {c.pattern.name} "
                + " ".join(map(str, c.vertex_map))
                + " : "
                + " ".join(map(str, c.edge_map))
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_decomposition(text: str) -> Decomposition:
    """Inverse of :func:`serialize_decomposition`; the format is detected from the first character."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"bad JSON: {exc}") from None
        if doc.get("format") != FORMAT_TAG:
            raise GraphFormatError(f"unknown document format {doc.get('format')!r}")
        pats = {name: PatternTree.from_json(name, p) for name, p in doc["patterns"].items()}
        copies = []
        for rec in doc["copies"]:
            try:
                pat = pats[rec["pattern"]]
            except KeyError:
                raise GraphFormatError(f"undeclared pattern {rec.get('pattern')!r}") from None
            copies.append(TreeCopy(pat, tuple(rec["vertex_map"]), tuple(rec["edge_map"])))
        d = Decomposition.of(copies)
        if d.covered_edges != frozenset(doc["covered_edges"]):
            raise GraphFormatError("covered_edges disagrees with the listed copies")
        return d
    pats: dict[str, PatternTree] = {}
    copies = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        try:
            if parts[0] == "pattern":
                name, n = parts[1], int(parts[2])
                edges = tuple(tuple(int(x) for x in tok.split("-")) for tok in parts[3:])
                known = PATTERNS.get(name)
                if known is not None and known.edges == edges:
                    pats[name] = known
                else:
                    pats[name] = PatternTree(name, n, edges)
            elif parts[0] == "copy":
                sep = parts.index(":")
                copies.append(
                    TreeCopy(pats[parts[1]], tuple(map(int, parts[2:sep])), tuple(map(int, parts[sep + 1 :])))
                )
            else:
                raise GraphFormatError(f"unknown record {parts[0]!r}")
        except (ValueError, KeyError, IndexError) as exc:
            raise GraphFormatError(f"bad line {ln!r}: {exc}") from None
    return Decomposition.of(copies)
