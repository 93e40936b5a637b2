"""Edge connectivity, bipartization by max cut, tree packing, bounded trees, chains, Euler structures."""

from ydecomp.connectivity.bounded import bounded_degree_spanning_tree, check_degree_bound, degree_bound
from ydecomp.connectivity.chain import UnionChain, nested_union_chain, trees_needed
from ydecomp.connectivity.euler import EulerStructure, euler_spanning_subgraph, euler_trail, tree_join
from ydecomp.connectivity.maxcut import max_cut_bipartition
from ydecomp.connectivity.mincut import cut_size, edge_connectivity, min_cut
from ydecomp.connectivity.packing import (
    TreePack,
    check_tree_pack,
    is_spanning_tree,
    max_tree_packing,
    pack_spanning_trees,
)

__all__ = [
    "EulerStructure",
    "TreePack",
    "UnionChain",
    "bounded_degree_spanning_tree",
    "check_degree_bound",
    "check_tree_pack",
    "cut_size",
    "degree_bound",
    "edge_connectivity",
    "euler_spanning_subgraph",
    "euler_trail",
    "is_spanning_tree",
    "max_cut_bipartition",
    "max_tree_packing",
    "min_cut",
    "nested_union_chain",
    "pack_spanning_trees",
    "tree_join",
    "trees_needed",
]
