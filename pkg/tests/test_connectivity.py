import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from independent import brute_min_cut, edges_by_id, random_tree, spanning_trees_ok
from ydecomp.connectivity import (
    TreePack,
    bounded_degree_spanning_tree,
    check_degree_bound,
    check_tree_pack,
    cut_size,
    edge_connectivity,
    euler_spanning_subgraph,
    euler_trail,
    max_cut_bipartition,
    max_tree_packing,
    min_cut,
    nested_union_chain,
    pack_spanning_trees,
    tree_join,
    trees_needed,
)
from ydecomp.errors import BudgetExceeded, InsufficientConnectivity, PackingFailed
from ydecomp.graph_core import MultiGraph
from ydecomp.oracle import gallery, random_k_connected


def complete(n):
    return MultiGraph(n, itertools.combinations(range(n), 2))


def tree_union(n, count, seed):
    rng = random.Random(seed)
    g = MultiGraph(n)
    trees = []
    for _ in range(count):
        trees.append(frozenset(g.add_edge(u, v) for u, v in random_tree(n, rng)))
    return g, TreePack(tuple(trees))


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=3 * n))
    return MultiGraph(n, chosen)


# edge connectivity ----------------------------------------------------------


def test_connectivity_examples():
    assert edge_connectivity(complete(5)) == 4
    assert edge_connectivity(MultiGraph(4, [(0, 1), (1, 2), (2, 3)])) == 1
    assert edge_connectivity(gallery("wheel4").graph) == 3


@given(small_graphs())
@settings(max_examples=150)
def test_min_cut_matches_brute_force(g):
    ends = [(u, v) for _, u, v in g.edge_list()]
    value, side = min_cut(g)
    assert value == brute_min_cut(g.vertex_count, ends)
    assert 0 < len(side) < g.vertex_count
    assert cut_size(g, side) == value


# max cut --------------------------------------------------------------------


def test_max_cut_c4_is_proper_coloring():
    c4 = MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    bip = max_cut_bipartition(c4, 1)
    assert len(bip.crossing_edges) == 4


def test_max_cut_k4_two_two_split():
    g = complete(4)
    bip = max_cut_bipartition(g, 2)
    assert sorted(map(len, (bip.a_side, bip.b_side))) == [2, 2]
    assert edge_connectivity(g, bip.crossing_edges) == 2


def test_max_cut_rejects_weak_graph():
    with pytest.raises(InsufficientConnectivity):
        max_cut_bipartition(MultiGraph(4, [(0, 1), (1, 2), (2, 3)]), 2)


@pytest.mark.parametrize("seed", range(6))
def test_max_cut_local_optimality(seed):
    g = random_k_connected(16, 5, seed)
    bip = max_cut_bipartition(g, 3)
    assert edge_connectivity(g, bip.crossing_edges) >= 3
    for v in range(g.vertex_count):
        cross = sum(1 for e in g.incident(v) if e in bip.crossing_edges)
        assert 2 * cross >= g.degree(v)


# packing --------------------------------------------------------------------


def test_pack_tree_itself():
    g = MultiGraph(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert pack_spanning_trees(g, 1).trees == (frozenset(range(4)),)


def test_pack_k4_two_trees():
    g = complete(4)
    pack = pack_spanning_trees(g, 2)
    assert spanning_trees_ok(4, edges_by_id(g), pack.trees)
    assert check_tree_pack(g, pack) is None


def test_pack_c4_two_trees_fails():
    with pytest.raises(PackingFailed):
        pack_spanning_trees(MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), 2)


def _nash_williams(g):
    """min over vertex partitions P of floor(crossing edges / (|P| - 1))."""
    n = g.vertex_count
    best = None

    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for p in partitions(rest):
            yield [[first]] + p
            for i in range(len(p)):
                yield p[:i] + [[first] + p[i]] + p[i + 1 :]

    for p in partitions(list(range(n))):
        if len(p) < 2:
            continue
        block = {v: i for i, part in enumerate(p) for v in part}
        cross = sum(1 for _, u, v in g.edge_list() if block[u] != block[v])
        val = cross // (len(p) - 1)
        best = val if best is None else min(best, val)
    return best


@given(small_graphs(max_n=6))
@settings(max_examples=80, deadline=None)
def test_max_tree_packing_matches_partition_formula(g):
    assert max_tree_packing(g) == _nash_williams(g)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_pack_multigraph_tree_unions(k):
    g, _ = tree_union(12, k, seed=k)
    pack = pack_spanning_trees(g, k)
    assert spanning_trees_ok(12, edges_by_id(g), pack.trees)


def test_pack_restricted_to_edge_subset():
    g = complete(6)
    keep = [e for e, u, v in g.edge_list() if (u + v) % 2 == 1]  # K_{3,3}
    pack = pack_spanning_trees(g, 1, keep)
    assert pack.union() <= set(keep)
    with pytest.raises(PackingFailed):
        pack_spanning_trees(g, 2, keep)


# bounded trees --------------------------------------------------------------


def test_bounded_tree_star_and_cycle():
    star = MultiGraph(9, [(0, i) for i in range(1, 9)])
    assert bounded_degree_spanning_tree(star, 1) == frozenset(range(8))
    c6 = MultiGraph(6, [(i, (i + 1) % 6) for i in range(6)])
    t = bounded_degree_spanning_tree(c6, 2)
    assert len(t) == 5 and not check_degree_bound(c6, t, 2, c6.edges())


def test_bounded_tree_on_union_of_25_trees():
    g, pack = tree_union(40, 25, seed=3)
    t = bounded_degree_spanning_tree(g, 5)
    assert spanning_trees_ok(40, edges_by_id(g), [t])
    assert check_degree_bound(g, t, 5, g.edges()) == []


def test_bounded_tree_custom_bounds_best_effort():
    g = complete(8)
    bounds = [1] + [8] * 7
    t = bounded_degree_spanning_tree(g, 1, bounds=bounds, best_effort=True)
    assert spanning_trees_ok(8, edges_by_id(g), [t])
    assert g.degree_in(0, t) == 1


# chains ---------------------------------------------------------------------


def test_chain_degenerate_and_budget():
    g, pack = tree_union(10, 4, seed=1)
    chain = nested_union_chain(g, pack, 4, 4, 0)
    assert chain.layers == (pack.union(),)
    assert trees_needed(1, 4, 1) == 16
    with pytest.raises(BudgetExceeded):
        nested_union_chain(g, pack, 1, 4, 1)


def test_chain_k1_m4_l1():
    g, pack = tree_union(20, 16, seed=2)
    chain = nested_union_chain(g, pack, 1, 4, 1)
    m1, m2 = chain.layers
    assert m1 < m2 and len(m1) == 19 and m2 == pack.union()
    for v in range(20):
        assert 4 * g.degree_in(v, m1) <= g.degree_in(v, m2)
    assert chain.ring(1) == m2 - m1


# euler ----------------------------------------------------------------------


def test_euler_two_parallel_edges():
    g = MultiGraph(2, [(0, 1), (0, 1)])
    es = euler_spanning_subgraph(g, {0}, {1})
    assert es.subgraph == {0, 1} and sorted(es.trail) == [0, 1]


def test_euler_k4_paths_give_four_cycle():
    g = complete(4)
    eid = {frozenset(g.endpoints(e)): e for e in g.edges()}
    ta = {eid[frozenset(p)] for p in [(0, 1), (1, 2), (2, 3)]}
    tb = {eid[frozenset(p)] for p in [(2, 0), (0, 3), (3, 1)]}
    es = euler_spanning_subgraph(g, ta, tb)
    assert es.subgraph == ta | {eid[frozenset((0, 3))]}
    assert es.vertices[0] == es.vertices[-1]


@pytest.mark.parametrize("seed", range(4))
def test_euler_random_pair(seed):
    g = random_k_connected(18, 6, seed)
    ta, tb = pack_spanning_trees(g, 2).trees
    es = euler_spanning_subgraph(g, ta, tb)
    assert ta <= es.subgraph <= ta | tb
    for v in range(g.vertex_count):
        d = g.degree_in(v, es.subgraph)
        assert d % 2 == 0 and d > 0
        assert d <= g.degree_in(v, ta) + g.degree_in(v, tb)
    assert sorted(es.trail) == sorted(es.subgraph)
    for i, e in enumerate(es.trail):
        assert set(g.endpoints(e)) == {es.vertices[i], es.vertices[i + 1]}
    rot = es.rotated(3)
    assert sorted(rot.trail) == sorted(es.trail) and rot.vertices[0] == rot.vertices[-1]


def test_tree_join_and_trail_errors():
    g = MultiGraph(4, [(0, 1), (1, 2), (2, 3)])
    assert tree_join(g, g.edges(), [0, 3]) == {0, 1, 2}
    assert tree_join(g, g.edges(), [1, 2]) == {1}
    with pytest.raises(ValueError):
        euler_trail(g, g.edges())
