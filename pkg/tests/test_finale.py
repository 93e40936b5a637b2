import random

import pytest

from independent import balanced_p4_ok, edges_by_id
from ydecomp.connectivity import edge_connectivity
from ydecomp.errors import DivisibilityViolation, InternalInvariantViolation, PreconditionError
from ydecomp.finale import (
    EXHAUSTIVE_LIMIT,
    Role,
    assign_roles,
    balanced_p4_decomposition,
    exhaustive_balanced_p4,
    glue,
    paths_from_roles,
    reserve_quarter,
)
from ydecomp.graph_core import Decomposition, MultiGraph, Y, verify_decomposition
from ydecomp.oracle import random_bipartite_a_regular


def _ok(g, core, a_side, ps):
    return balanced_p4_ok(edges_by_id(g), set(core), set(a_side), [(p.vertices, p.edges) for p in ps.paths])


def k33():
    return MultiGraph(6, [(a, b) for a in range(3) for b in range(3, 6)])


def random_instance(seed):
    """2-edge-connected bipartite graph with A-degrees in {3, 6, 9}."""
    rng = random.Random(seed)
    for attempt in range(100):
        na = rng.randint(2, 5)
        degs = [rng.choice((3, 6, 9)) for _ in range(na)]
        g, a_side = random_bipartite_a_regular(degs, rng.randint(max(degs), 12), seed * 1000 + attempt)
        g = g.restricted(g.edges())
        if edge_connectivity(_without_isolated(g)) >= 2:
            return g, a_side
    raise AssertionError("no 2-edge-connected sample")


def _without_isolated(g):
    live = sorted({v for _, u, w in g.edge_list() for v in (u, w)})
    idx = {v: i for i, v in enumerate(live)}
    return MultiGraph(len(live), [(idx[u], idx[v]) for _, u, v in g.edge_list()])


def test_k33():
    g = k33()
    ps = balanced_p4_decomposition(g, g.edges(), [0, 1, 2])
    assert len(ps) == 3 and _ok(g, g.edges(), [0, 1, 2], ps)


@pytest.mark.parametrize("seed", range(25))
def test_random_instances_and_exhaustive_cross_check(seed):
    g, a_side = random_instance(seed)
    ps = balanced_p4_decomposition(g, g.edges(), a_side, seed=seed)
    assert _ok(g, g.edges(), a_side, ps)
    if g.edge_count <= EXHAUSTIVE_LIMIT:
        ex = exhaustive_balanced_p4(g, g.edges(), a_side)
        assert ex is not None and _ok(g, g.edges(), a_side, ex)


def test_roles_are_balanced_at_every_vertex():
    g, a_side = random_instance(3)
    ra = assign_roles(g, g.edges(), a_side)
    for a in a_side:
        roles = [ra.roles[e] for e in g.incident(a)]
        third = g.degree(a) // 3
        assert roles.count(Role.END_AT_B) == third and roles.count(Role.CONNECTOR) == third
    for b in set(range(g.vertex_count)) - set(a_side):
        roles = [ra.roles[e] for e in g.incident(b)]
        assert roles.count(Role.CONNECTOR) == roles.count(Role.END_AT_A)


@pytest.mark.parametrize("seed", range(5))
def test_any_pairing_gives_balanced_paths(seed):
    g, a_side = random_instance(7)
    ra = assign_roles(g, g.edges(), a_side)
    ps = paths_from_roles(g, ra, a_side, rng=random.Random(seed))
    assert _ok(g, g.edges(), a_side, ps)


def test_exhaustive_reports_impossible_instance():
    # a single A-vertex of degree 3 has no 3-path b-a-b-a at all
    g = MultiGraph(4, [(0, 1), (0, 2), (0, 3)])
    assert exhaustive_balanced_p4(g, g.edges(), [0]) is None


def test_rejects_bad_input():
    g = MultiGraph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    with pytest.raises(DivisibilityViolation):
        balanced_p4_decomposition(g, g.edges(), [0, 1])
    g = MultiGraph(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(PreconditionError):
        balanced_p4_decomposition(g, g.edges(), [0])


# reserve and glue -----------------------------------------------------------


def test_reserve_degree_four_with_three_tree_edges():
    g = MultiGraph(5, [(0, b) for b in range(1, 5)])
    reserved, core = reserve_quarter(g, [0], {0, 1}, {2})
    assert reserved == {0: frozenset({3})} and core == frozenset({0, 1, 2})


def test_reserve_degree_eight_with_four_tree_edges():
    g = MultiGraph(9, [(0, b) for b in range(1, 9)])
    reserved, core = reserve_quarter(g, [0], {0, 1}, {2, 3})
    assert reserved == {0: frozenset({4, 5})} and core == frozenset({0, 1, 2, 3, 6, 7})


def test_reserve_errors():
    g = MultiGraph(7, [(0, b) for b in range(1, 7)])
    with pytest.raises(DivisibilityViolation):
        reserve_quarter(g, [0], (), ())
    g = MultiGraph(5, [(0, b) for b in range(1, 5)])
    with pytest.raises(InternalInvariantViolation):
        reserve_quarter(g, [0], {0, 1}, {2, 3})


@pytest.mark.parametrize("seed", range(6))
def test_reserve_split_glue_decomposes_everything(seed):
    g, a_side = random_bipartite_a_regular([12] * 4, 14, seed)
    reserved, core = reserve_quarter(g, a_side, (), ())
    ps = balanced_p4_decomposition(g, core, a_side, seed=seed)
    copies = glue(g, ps, reserved)
    assert len(copies) == g.edge_count // 4
    assert verify_decomposition(g, g.edges(), Y, Decomposition.of(copies))
    for c in copies:
        assert c.three_vertex in a_side


def test_glue_rejects_count_mismatch():
    g, a_side = random_bipartite_a_regular([12] * 3, 13, 0)
    reserved, core = reserve_quarter(g, a_side, (), ())
    ps = balanced_p4_decomposition(g, core, a_side)
    short = dict(reserved)
    short[a_side[0]] = frozenset(sorted(short[a_side[0]])[1:])
    with pytest.raises(InternalInvariantViolation):
        glue(g, ps, short)
