import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from independent import edges_by_id, has_y, is_y
from ydecomp.bipartize_y import bipartize, classify_leftover, extend_fragments, strip_y_copies_inside
from ydecomp.connectivity import max_cut_bipartition, pack_spanning_trees
from ydecomp.errors import InsufficientConnectivity, PreconditionError
from ydecomp.graph_core import Decomposition, MultiGraph, Y, verify_decomposition
from ydecomp.oracle import random_k_connected


def _check_pieces(g, leftover, pieces):
    ids = sorted(e for p in pieces for e in p.edge_ids)
    assert ids == sorted(leftover)
    designated = [v for p in pieces for v in p.designated]
    assert len(designated) == len(set(designated))
    for p in pieces:
        assert p.three_vertex in p.vertices


# stripping ------------------------------------------------------------------


def test_strip_single_y():
    g = MultiGraph(Y.vertex_count, Y.edges)
    removed, leftover = strip_y_copies_inside(g, range(5))
    assert len(removed) == 1 and not leftover and g.edge_count == 0
    assert is_y([Y.edges[i] for i in range(4)])


def test_strip_c5_keeps_everything():
    g = MultiGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    removed, leftover = strip_y_copies_inside(g, range(5))
    assert removed == [] and leftover == frozenset(range(5))


def test_strip_ignores_edges_leaving_the_side():
    g = MultiGraph(6, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)])
    removed, leftover = strip_y_copies_inside(g, [0, 1, 2, 3])
    assert removed == [] and leftover == frozenset({0, 1, 2})


@given(st.integers(0, 10_000), st.integers(5, 9), st.floats(0.2, 0.8))
@settings(max_examples=60, deadline=None)
def test_strip_leaves_y_free_remainder(seed, n, p):
    rng = random.Random(seed)
    g = MultiGraph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])
    original = edges_by_id(g)
    removed, leftover = strip_y_copies_inside(g, range(n))
    assert not has_y({e: original[e] for e in leftover})
    assert set(leftover) == set(g.edges())
    d = Decomposition.of(removed)
    assert verify_decomposition(MultiGraph(n, original.values()), d.covered_edges, Y, d)


# classification -------------------------------------------------------------


@pytest.mark.parametrize(
    "edges",
    [
        [(i, i + 1) for i in range(6)],                 # path on 7 vertices
        [(0, i) for i in range(1, 6)],                  # 5-star
        [(0, 1), (1, 2), (2, 0)],                       # triangle
        [(i, (i + 1) % 7) for i in range(7)],           # 7-cycle
        [(0, 1)],
        [(0, 1), (1, 2)],
        [(0, 1), (1, 2), (2, 3)],
        [(0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
        [(0, 1), (1, 2), (2, 0), (0, 3)],               # paw
        [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3)],       # diamond
        [(0, 1), (1, 2), (2, 0), (3, 4)],               # two components
    ],
)
def test_classify_cuts_examples(edges):
    g = MultiGraph(1 + max(max(e) for e in edges), edges)
    assert not has_y(edges_by_id(g))
    pieces = classify_leftover(g, g.edges())
    _check_pieces(g, g.edges(), pieces)


@given(st.integers(0, 10_000), st.integers(5, 10))
@settings(max_examples=60, deadline=None)
def test_classify_random_y_free_remainders(seed, n):
    rng = random.Random(seed)
    g = MultiGraph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4])
    _, leftover = strip_y_copies_inside(g, range(n))
    _check_pieces(g, leftover, classify_leftover(g, leftover))


# extension ------------------------------------------------------------------


@pytest.mark.parametrize("shape", ["path7", "star5", "triangle", "edge"])
def test_extend_pieces_with_crossing_trees(shape):
    inside = {
        "path7": [(i, i + 1) for i in range(6)],
        "star5": [(0, i) for i in range(1, 6)],
        "triangle": [(0, 1), (1, 2), (2, 0)],
        "edge": [(0, 1)],
    }[shape]
    k = 7
    # side A = 0..k-1 (inside edges), side B = k..2k-1, complete crossing graph
    g = MultiGraph(2 * k, inside + [(a, k + b) for a in range(k) for b in range(k)])
    crossing = [e for e, u, v in g.edge_list() if (u < k) != (v < k)]
    trees = pack_spanning_trees(g, 3, crossing).trees
    pieces = classify_leftover(g, range(len(inside)))
    out = extend_fragments(g, pieces, *trees)
    d = Decomposition.of(out)
    full = MultiGraph(2 * k, inside + [(a, k + b) for a in range(k) for b in range(k)])
    assert verify_decomposition(full, d.covered_edges, Y, d)
    assert set(range(len(inside))) <= d.covered_edges
    assert d.covered_edges - set(range(len(inside))) <= set().union(*trees)


# whole stage ----------------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_bipartize_leaves_only_crossing_edges(seed):
    g = random_k_connected(40, 30, seed)
    res = bipartize(g, 2, strength=15, check=False)
    side = res.bipartition.side_of
    assert all(side[u] != side[v] for _, u, v in res.graph.edge_list())
    d = Decomposition.of(res.removed)
    assert verify_decomposition(g, d.covered_edges, Y, d)
    assert d.covered_edges | set(res.graph.edges()) == set(g.edges())
    assert not d.covered_edges & set(res.graph.edges())
    assert len(res.pack) == 2
    for t in res.pack.trees:
        assert all(res.graph.is_alive(e) for e in t)


def test_bipartize_connectivity_precondition():
    c4 = MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    with pytest.raises(InsufficientConnectivity):
        bipartize(c4, 1)


def test_bipartize_rejects_multigraph():
    with pytest.raises(PreconditionError):
        bipartize(MultiGraph(2, [(0, 1), (0, 1)]), 0, check=False)


def test_bipartite_host_keeps_crossing_edges():
    n = 14
    g = MultiGraph(2 * n, [(a, n + b) for a in range(n) for b in range(n)])
    bip = max_cut_bipartition(g, 6, check=False)
    assert len(bip.crossing_edges) == g.edge_count
    res = bipartize(g, 0, strength=6, check=False)
    assert res.removed == () and res.graph.edge_count == g.edge_count
