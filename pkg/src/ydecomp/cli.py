"""Command line: analyze, decompose-y, verify, oracle, generate, gallery.

Exit codes: 0 success, 1 a decomposition failed verification, 2 precondition
failure, 3 stage failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from typing import Sequence

from ydecomp import oracle
from ydecomp.connectivity.mincut import edge_connectivity
from ydecomp.connectivity.packing import max_tree_packing
from ydecomp.errors import DecompositionError, PreconditionError
from ydecomp.graph_core import (
    PATTERNS,
    PatternTree,
    format_graph,
    parse_decomposition,
    parse_graph,
    path_pattern,
    serialize_decomposition,
    star_pattern,
    verify_decomposition,
)
from ydecomp.pipeline import PipelineConfig, run_pipeline

EXIT_INVALID = 1


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _pattern(name: str) -> PatternTree:
    if name in PATTERNS:
        return PATTERNS[name]
    if m := re.fullmatch(r"P(\d+)", name):
        return path_pattern(int(m.group(1)) - 1)
    if m := re.fullmatch(r"K1,(\d+)", name):
        return star_pattern(int(m.group(1)))
    raise PreconditionError(f"unknown pattern {name!r}; use Y, P<vertices> or K1,<leaves>")


def cmd_analyze(args) -> int:
    g = parse_graph(_read(args.graph))
    report = {
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "edges_mod_4": g.edge_count % 4,
        "simple": g.is_simple(),
        "edge_connectivity": edge_connectivity(g) if g.vertex_count >= 2 else 0,
        "max_tree_packing": max_tree_packing(g),
    }
    for k, v in report.items():
        print(f"{k} {json.dumps(v)}")
    return 0


def cmd_decompose(args) -> int:
    g = parse_graph(_read(args.graph))
    cfg = PipelineConfig(
        seed=args.seed,
        relaxed=args.relaxed,
        trace=args.trace is not None,
        output=args.output,
        trace_path=args.trace,
    )
    run = run_pipeline(g, cfg)
    if cfg.trace:
        text = "\n".join(run.trace) + "\n"
        if args.trace == "-":
            sys.stderr.write(text)
        else:
            _write(args.trace, text)
    _write(args.output, serialize_decomposition(run.decomposition, args.format))
    return 0


def cmd_verify(args) -> int:
    g = parse_graph(_read(args.graph))
    d = parse_decomposition(_read(args.decomposition))
    verdict = verify_decomposition(g, g.edges(), _pattern(args.pattern), d)
    if verdict:
        print(f"ok {len(d)} copies cover {g.edge_count} edges")
        return 0
    print(f"invalid {verdict.reason}")
    return EXIT_INVALID


def cmd_oracle(args) -> int:
    g = parse_graph(_read(args.graph))
    res = oracle.brute_force_decomposition(g, _pattern(args.pattern), budget=args.budget)
    if isinstance(res, oracle.Found):
        print(f"found {len(res.decomposition)} copies after {res.nodes} nodes", file=sys.stderr)
        _write(args.output, serialize_decomposition(res.decomposition, args.format))
    elif isinstance(res, oracle.NotDecomposable):
        print(f"not-decomposable nodes={res.nodes} reason={res.reason}")
    else:
        print(f"budget-exceeded nodes={res.nodes}")
    return 0


def cmd_generate(args) -> int:
    if args.kind == "regular":
        g = oracle.random_regular(args.n, args.param, args.seed)
    elif args.kind == "connected":
        g = oracle.random_k_connected(args.n, args.param, args.seed)
    else:
        a_degrees = [args.param] * args.n
        g, _ = oracle.random_bipartite_a_regular(a_degrees, args.b_count or args.n, args.seed)
    _write(args.output, format_graph(g))
    return 0


def cmd_gallery(args) -> int:
    if args.name is None:
        for name in oracle.gallery_names():
            entry = oracle.gallery(name)
            print(f"{name} n={entry.graph.vertex_count} m={entry.graph.edge_count} "
                  f"lambda={entry.edge_connectivity}")
        return 0
    try:
        entry = oracle.gallery(args.name)
    except KeyError as exc:
        raise PreconditionError(exc.args[0]) from None
    print(f"# {entry.name}: {entry.notes}", file=sys.stderr)
    _write(args.output, format_graph(entry.graph))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ydecomp", description="Decompose highly edge-connected graphs into Y-copies.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress (repeat for debug)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="edge connectivity, tree packing number, divisibility")
    a.add_argument("graph", help="edge-list file, or - for stdin")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("decompose-y", help="run the full pipeline and print a verified decomposition")
    d.add_argument("graph")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--relaxed", action="store_true",
                   help="skip the connectivity requirement and size every stage to what the graph affords")
    d.add_argument("--trace", nargs="?", const="-", default=None, metavar="PATH",
                   help="write the per-copy trace (default: stderr)")
    d.add_argument("--format", choices=("json", "edgelist"), default="json")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="check a decomposition document against a graph")
    v.add_argument("graph")
    v.add_argument("decomposition")
    v.add_argument("--pattern", default="Y")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive decomposition search for small graphs")
    o.add_argument("graph")
    o.add_argument("--pattern", default="Y", help="Y, P<vertices> or K1,<leaves>")
    o.add_argument("--budget", type=int, default=1_000_000, help="search node limit")
    o.add_argument("--format", choices=("json", "edgelist"), default="json")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    gen = sub.add_parser("generate", help="random graphs")
    gen.add_argument("kind", choices=("regular", "connected", "bipartite"))
    gen.add_argument("n", type=int, help="vertex count (side A for bipartite)")
    gen.add_argument("param", type=int, help="degree, target edge connectivity, or A-degree")
    gen.add_argument("--b-count", type=int, help="side B size for bipartite (default n)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_generate)

    gal = sub.add_parser("gallery", help="list or print the named graphs")
    gal.add_argument("name", nargs="?")
    gal.add_argument("-o", "--output")
    gal.set_defaults(func=cmd_gallery)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DecompositionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
