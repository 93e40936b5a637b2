"""Edge-decompositions of highly edge-connected graphs into copies of the tree Y."""

from ydecomp.errors import (
    BoundedTreeSearchExhausted,
    BudgetExceeded,
    DecompositionError,
    DivisibilityViolation,
    ExtensionStarved,
    GraphFormatError,
    InsufficientConnectivity,
    InternalInvariantViolation,
    PackingFailed,
    ParityRepairFailed,
    PreconditionError,
    StageError,
    StageFailure,
)
from ydecomp.graph_core import (
    Bipartition,
    Decomposition,
    MultiGraph,
    PatternTree,
    TreeCopy,
    Y,
    parse_decomposition,
    parse_graph,
    serialize_decomposition,
    verify_decomposition,
)

__version__ = "0.1.0"
