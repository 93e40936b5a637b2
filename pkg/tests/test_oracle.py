import itertools
import time

import pytest

from independent import edges_by_id, y_decomposable
from ydecomp.connectivity import edge_connectivity
from ydecomp.errors import PreconditionError
from ydecomp.graph_core import MultiGraph, Y, path_pattern, star_pattern, verify_decomposition
from ydecomp.oracle import (
    BudgetExceeded,
    Found,
    NotDecomposable,
    brute_force_decomposition,
    gallery,
    gallery_names,
    random_bipartite_a_regular,
    random_k_connected,
    random_regular,
)


def test_wheel_is_not_decomposable_and_fast():
    w = gallery("wheel4").graph
    t = time.perf_counter()
    assert isinstance(brute_force_decomposition(w), NotDecomposable)
    assert time.perf_counter() - t < 1.0
    assert edge_connectivity(w) == 3


def test_size_not_divisible_is_rejected_immediately():
    res = brute_force_decomposition(gallery("k4").graph)
    assert isinstance(res, NotDecomposable) and res.nodes == 0


def test_found_decompositions_verify():
    for g in (gallery("y").graph, MultiGraph(6, [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 1), (5, 2), (4, 2)])):
        res = brute_force_decomposition(g)
        assert isinstance(res, Found) == y_decomposable(edges_by_id(g))
        if isinstance(res, Found):
            assert verify_decomposition(g, g.edges(), Y, res.decomposition)


def test_other_patterns():
    c4 = MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    res = brute_force_decomposition(c4, path_pattern(2))
    assert isinstance(res, Found) and len(res.decomposition) == 2
    assert isinstance(brute_force_decomposition(c4, star_pattern(3)), NotDecomposable)
    k4 = gallery("k4").graph
    assert isinstance(brute_force_decomposition(k4, path_pattern(3)), Found)


def test_budget_exceeded():
    g = random_regular(12, 4, 0)
    assert isinstance(brute_force_decomposition(g, budget=1), BudgetExceeded)


def test_gallery_entries():
    assert set(gallery_names()) >= {"wheel4", "k6chain", "y", "k4", "petersen"}
    chain = gallery("k6chain")
    g = chain.graph
    assert (g.vertex_count, g.edge_count) == (24, 72)
    assert set(g.degrees()) == {6} and g.is_simple()
    assert edge_connectivity(g) == chain.edge_connectivity == 6
    pet = gallery("petersen").graph
    assert pet.edge_count == 15 and set(pet.degrees()) == {3} and edge_connectivity(pet) == 3
    with pytest.raises(KeyError):
        gallery("nope")


def test_random_regular():
    g = random_regular(10, 3, 0)
    assert g.edge_count == 15 and set(g.degrees()) == {3} and g.is_simple()
    k4 = random_regular(4, 3, 5)
    assert sorted(tuple(sorted(g2)) for g2 in (k4.endpoints(e) for e in k4.edges())) == list(
        itertools.combinations(range(4), 2)
    )
    with pytest.raises(PreconditionError):
        random_regular(5, 3, 0)


def test_random_k_connected_and_determinism():
    g = random_k_connected(20, 5, 1)
    assert edge_connectivity(g) >= 5 and g.is_simple()
    h = random_k_connected(20, 5, 1)
    assert g.edge_list() == h.edge_list()
    assert random_regular(30, 6, 2).edge_list() == random_regular(30, 6, 2).edge_list()
    assert random_regular(30, 6, 2).edge_list() != random_regular(30, 6, 3).edge_list()


def test_random_bipartite_a_regular():
    g, a_side = random_bipartite_a_regular([3, 6, 9], 10, 4)
    assert a_side == [0, 1, 2] and [g.degree(a) for a in a_side] == [3, 6, 9]
    assert g.is_simple() and all(u in a_side and v >= 3 for _, u, v in g.edge_list())
    with pytest.raises(PreconditionError):
        random_bipartite_a_regular([11], 10, 0)
