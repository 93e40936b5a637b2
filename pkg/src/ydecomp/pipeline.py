"""End-to-end Y-decomposition: bipartize, repair side-A degrees, reserve, split into 3-paths, glue."""

from __future__ import annotations

import contextlib
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator

from ydecomp.bipartize_y import bipartize
from ydecomp.connectivity.bounded import bounded_degree_spanning_tree
from ydecomp.connectivity.mincut import edge_connectivity
from ydecomp.connectivity.packing import TreePack, check_tree_pack, max_tree_packing, pack_spanning_trees
from ydecomp.divisibility import fix_mod4, fix_parity
from ydecomp.errors import (
    DecompositionError,
    DivisibilityViolation,
    InsufficientConnectivity,
    InternalInvariantViolation,
    PackingFailed,
    PreconditionError,
    StageError,
    StageFailure,
)
from ydecomp.finale import balanced_p4_decomposition, glue, reserve_quarter
from ydecomp.graph_core import Decomposition, MultiGraph, TreeCopy, Y, verify_decomposition

log = logging.getLogger(__name__)

STAGES = ("bipartize", "parity", "mod4", "finale")


@dataclass(frozen=True)
class PipelineConfig:
    """Run parameters; the defaults are the constants under which success is guaranteed."""

    seed: int = 0
    connectivity: int = 191
    relaxed: bool = False
    trace: bool = False
    output: str | None = None
    trace_path: str | None = None
    bipartize_k: int = 42
    bipartition_strength: int = 96
    parity_group: int = 7
    mod4_group: int = 9
    finale_group: int = 5


@dataclass
class PipelineRun:
    decomposition: Decomposition
    stage_copies: dict[str, int]
    trace: list[str] = field(default_factory=list)


class _Tracer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.lines: list[str] = []

    def __call__(self, line: str) -> None:
        if self.enabled:
            self.lines.append(line)

    def copies(self, stage: str, copies: list[TreeCopy] | tuple[TreeCopy, ...]) -> None:
        if self.enabled:
            for c in copies:
                self.lines.append(f"{stage} {c.three_vertex} edges={','.join(map(str, c.edge_map))}")


@contextlib.contextmanager
def _stage(name: str, relaxed: bool) -> Iterator[None]:
    """Tag failures with the stage; relaxed runs turn every failure into a stage failure."""
    try:
        yield
    except StageFailure:
        raise
    except StageError as e:
        raise StageFailure(name, e) from e
    except DecompositionError as e:
        if relaxed:
            raise StageFailure(name, e) from e
        raise


def _repack(g: MultiGraph, wanted: int) -> TreePack:
    """As many disjoint spanning trees as the graph holds, up to ``wanted`` (at least two)."""
    have = max_tree_packing(g)
    if have < 2:
        raise PackingFailed(f"only {have} disjoint spanning trees remain")
    return pack_spanning_trees(g, min(have, wanted))


def _finale_trees(g: MultiGraph, pack: TreePack, size: int, a_side: list[int], relaxed: bool):
    """Two bounded trees, one from each group of ``size`` packed trees."""
    err = check_tree_pack(g, pack.sub(0, 2 * size))
    if err:
        raise InternalInvariantViolation(f"trees kept for the last stage were touched: {err}")
    groups = pack.union(range(size)), pack.union(range(size, 2 * size))
    if not relaxed:
        return tuple(bounded_degree_spanning_tree(g, size, m) for m in groups)
    bounds = [g.vertex_count] * g.vertex_count
    for a in a_side:
        bounds[a] = max(1, g.degree(a) // 8)
    return tuple(bounded_degree_spanning_tree(g, size, m, bounds=bounds, best_effort=True) for m in groups)


def _relaxed_split(g: MultiGraph, a_side: list[int], size: int, seed: int):
    """Reserve and split, keeping two bounded trees in the core if the graph still has them, else none."""
    attempts: list[tuple[frozenset[int], frozenset[int]]] = []
    have = max_tree_packing(g)
    if have >= 2:
        size = min(size, have // 2)
        attempts.append(_finale_trees(g, pack_spanning_trees(g, 2 * size), size, a_side, True))
    attempts.append((frozenset(), frozenset()))
    last: DecompositionError | None = None
    for t5, t6 in attempts:
        try:
            reserved, core = reserve_quarter(g, a_side, t5, t6)
            return reserved, balanced_p4_decomposition(g, core, a_side, seed=seed)
        except DecompositionError as e:
            last = e
    assert last is not None
    raise last


def run_pipeline(g: MultiGraph, cfg: PipelineConfig = PipelineConfig()) -> PipelineRun:
    """Y-decomposition of all of ``g`` with per-stage accounting (``g`` is not modified)."""
    m = g.edge_count
    if m % 4:
        raise DivisibilityViolation(f"{m} edges is not divisible by 4")
    if not g.is_simple():
        raise PreconditionError("the host must be a simple graph")
    rng = random.Random(cfg.seed)
    tracer = _Tracer(cfg.trace)
    counts = dict.fromkeys(STAGES, 0)
    copies: list[TreeCopy] = []
    if m == 0:
        return PipelineRun(Decomposition.of(()), counts, tracer.lines)
    lam = edge_connectivity(g)
    if not cfg.relaxed and lam < cfg.connectivity:
        raise InsufficientConnectivity(cfg.connectivity, lam)
    relaxed = cfg.relaxed

    with _stage("bipartize", relaxed):
        if relaxed:
            res = bipartize(g, 0, strength=max(1, (lam + 1) // 2), check=False)
        else:
            res = bipartize(g, cfg.bipartize_k, strength=cfg.bipartition_strength, check=False)
        work, bip = res.graph, res.bipartition
        tracer.copies("bipartize", res.removed)
        copies += res.removed
        counts["bipartize"] = len(res.removed)
    a_side = bip.a_side

    with _stage("parity", relaxed):
        pk = _repack(work, 2 * cfg.parity_group) if relaxed else res.pack.sub(0, 2 * cfg.parity_group)
        rep = fix_parity(work, bip, pk, group_size=cfg.parity_group, relaxed=relaxed, trace=tracer)
        copies += rep.removed
        counts["parity"] = len(rep.removed)

    with _stage("mod4", relaxed):
        lo = 2 * cfg.parity_group
        hi = lo + 2 * cfg.mod4_group
        pk = _repack(work, 2 * cfg.mod4_group) if relaxed else res.pack.sub(lo, hi)
        rep = fix_mod4(work, bip, pk, group_size=cfg.mod4_group, relaxed=relaxed, trace=tracer)
        copies += rep.removed
        counts["mod4"] = len(rep.removed)

    with _stage("finale", relaxed):
        seed = rng.randrange(2**32)
        if relaxed:
            reserved, paths = _relaxed_split(work, a_side, cfg.finale_group, seed)
        else:
            size = cfg.finale_group
            t5, t6 = _finale_trees(work, res.pack.sub(hi, hi + 2 * size), size, a_side, False)
            reserved, core = reserve_quarter(work, a_side, t5, t6)
            paths = balanced_p4_decomposition(work, core, a_side, seed=seed)
        glued = glue(work, paths, reserved)
        for c in glued:
            tracer(f"glue {c.three_vertex} edges={','.join(map(str, c.edge_map))}")
        work.remove_edges(e for c in glued for e in c.edge_map)
        copies += glued
        counts["finale"] = len(glued)

    for s in STAGES:
        tracer(f"total {s} copies={counts[s]} edges={4 * counts[s]}")
    d = Decomposition.of(copies)
    verdict = verify_decomposition(g, g.edges(), Y, d)
    if not verdict:
        err = InternalInvariantViolation(f"assembled decomposition fails verification: {verdict.reason}")
        if relaxed:
            raise StageFailure("verify", err)
        raise err
    log.info("decomposition: %s", ", ".join(f"{s}={counts[s]}" for s in STAGES))
    return PipelineRun(d, counts, tracer.lines)


def decompose_y(g: MultiGraph, cfg: PipelineConfig = PipelineConfig()) -> Decomposition:
    """Verified Y-decomposition of every edge of ``g``."""
    return run_pipeline(g, cfg).decomposition


