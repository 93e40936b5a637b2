"""Nested unions of spanning trees with geometric degree growth."""

from __future__ import annotations

from dataclasses import dataclass

from ydecomp.connectivity.bounded import bounded_degree_spanning_tree
from ydecomp.connectivity.packing import TreePack
from ydecomp.errors import BudgetExceeded, InternalInvariantViolation
from ydecomp.graph_core import MultiGraph


@dataclass(frozen=True)
class UnionChain:
    """Layers ``M_1 ⊆ ... ⊆ M_{ell+1}``; layer ``i`` is a union of ``k*m**(2*i)`` disjoint spanning trees (0-based ``i``)."""

    layers: tuple[frozenset[int], ...]
    k: int
    m: int
    ell: int

    def ring(self, j: int) -> frozenset[int]:
        """Edges new in layer ``j`` (0-based): ``M_{j+1} minus M_j``; ring 0 is ``M_1``."""
        if j == 0:
            return self.layers[0]
        return self.layers[j] - self.layers[j - 1]

    def ratio_violations(self, g: MultiGraph) -> list[tuple[int, int]]:
        """``(layer, vertex)`` pairs where ``m * d_{M_i}(v) > d_{M_{i+1}}(v)``."""
        out = []
        for i in range(len(self.layers) - 1):
            lo, hi = self.layers[i], self.layers[i + 1]
            if not lo <= hi:
                out.append((i, -1))
                continue
            for v in range(g.vertex_count):
                if self.m * g.degree_in(v, lo) > g.degree_in(v, hi):
                    out.append((i, v))
        return out


def trees_needed(k: int, m: int, ell: int) -> int:
    return k * m ** (2 * ell)


def nested_union_chain(g: MultiGraph, pack: TreePack, k: int, m: int, ell: int) -> UnionChain:
    """Build the chain from the first ``k*m**(2*ell)`` trees of ``pack``.

    Trees are split into groups of ``m**2``; each group yields one tree of
    degree at most ``ceil(d/m**2) + 2 <= d/m`` (``d >= m**2``, ``m > 3``), and
    the extracted trees are chained recursively.
    """
    if k < 1 or ell < 0:
        raise ValueError("need k >= 1 and ell >= 0")
    if m <= 3:
        raise ValueError("m must exceed 3")
    need = trees_needed(k, m, ell)
    if len(pack) < need:
        raise BudgetExceeded(f"chain (k={k}, m={m}, ell={ell}) needs {need} trees, pack has {len(pack)}")
    trees = list(pack.trees[:need])
    layers = _chain(g, trees, m, ell)
    chain = UnionChain(tuple(layers), k, m, ell)
    bad = chain.ratio_violations(g)
    if bad:
        raise InternalInvariantViolation(f"chain ratio fails at (layer, vertex) {bad[:5]}")
    return chain


def _chain(g: MultiGraph, trees: list[frozenset[int]], m: int, ell: int) -> list[frozenset[int]]:
    top = frozenset().union(*trees)
    if ell == 0:
        return [top]
    group = m * m
    extracted = []
    for s in range(0, len(trees), group):
        union = frozenset().union(*trees[s : s + group])
        extracted.append(bounded_degree_spanning_tree(g, group, union))
    return _chain(g, extracted, m, ell - 1) + [top]
