"""Command-line front end.

Exit codes: 0 success, 1 bad input (file, parse, subset or cap errors),
2 an internal identity failed, which means a bug.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import IdentityViolation, InputError, TooLarge, TreeMinorsError
from .forest_enum import ForestKind, enumerate_forests, outdegree_histogram
from .formats import (
    REPORT_SCHEMA,
    AnalysisReport,
    format_rational,
    parse_edge_list,
    parse_newick,
    report_to_json,
)
from .graph_model import Tree, VertexSubset, leaves, subset_from_labels
from .minor_formulas import analyze
from .oracle import MAX_EXHAUSTIVE_N, random_instance
from .verify import optimization_sweep, verify_exhaustive, verify_random


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _detect_format(text: str) -> str:
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    return "newick" if body.endswith(";") else "edgelist"


def load_tree(path: str, fmt: str | None) -> tuple[Tree, str]:
    text = _read(path)
    fmt = fmt or _detect_format(text)
    if fmt == "newick":
        return parse_newick(text)[0], fmt
    return parse_edge_list(text), fmt


def parse_subset_spec(t: Tree, spec: str) -> VertexSubset:
    if spec == "@leaves":
        return leaves(t)
    if spec == "@all":
        return tuple(range(t.n))
    names = [x.strip() for x in spec.split(",") if x.strip()]
    return subset_from_labels(t, names)


def cmd_analyze(args) -> dict:
    t, fmt = load_tree(args.input, args.format)
    s = parse_subset_spec(t, args.subset)
    start = time.perf_counter()
    minor = analyze(t, s)
    report = AnalysisReport(
        input_format=fmt,
        vertices=t.n,
        edges=len(t.edges),
        subset=tuple(t.labels[v] for v in s),
        minor=minor,
        seconds=time.perf_counter() - start,
        tool_version=__version__,
    )
    return report_to_json(report)


def cmd_forests(args) -> dict:
    t, _ = load_tree(args.input, args.format)
    s = parse_subset_spec(t, args.subset)
    kind = ForestKind(args.kind)
    family = enumerate_forests(t, s, kind)
    label = t.labels.__getitem__
    listing = []
    for f in family:
        listing.append({
            "edges": [[label(t.edges[i].tail), label(t.edges[i].head)] for i in f.edge_set],
            "edge_indices": list(f.edge_set),
            "weight": format_rational(f.weight),
            "roots": [r if r == "*" else label(r) for r in f.roots],
            "components": [[label(v) for v in comp] for comp in f.components],
            "outdegrees": list(f.outdegrees),
        })
    out = {
        "kind": kind.value,
        "subset": [label(v) for v in s],
        "count": len(listing),
        "total_weight": format_rational(sum(f.weight for f in family)),
        "forests": listing,
    }
    if kind is ForestKind.S_STAR_ROOTED:
        out["histogram"] = {str(d): format_rational(w) for d, w in outdegree_histogram(t, s).items()}
    return out


def cmd_verify(args) -> tuple[dict, bool]:
    if not 0 <= args.exhaustive_n <= MAX_EXHAUSTIVE_N:
        raise TooLarge(f"--exhaustive-n must be between 0 and {MAX_EXHAUSTIVE_N}")
    if args.random < 0:
        raise InputError("--random must be non-negative")
    out: dict = {"scope": {"exhaustive_n": args.exhaustive_n, "random": args.random,
                           "seed": args.seed}}
    ok = True
    if args.exhaustive_n:
        summary = verify_exhaustive(args.exhaustive_n, workers=args.workers)
        out["exhaustive"] = summary.to_json()
        ok &= summary.ok
    if args.random:
        summary = verify_random(args.random, args.seed, workers=args.workers)
        out["random"] = summary.to_json()
        ok &= summary.ok
        picks = [random_instance(args.seed * 1_000_003 + i) for i in range(min(args.random, 50))]
        opt = optimization_sweep(picks, perturbations=50, seed=args.seed)
        out["quadratic_optimum"] = opt.to_json()
        ok &= opt.ok
    out["ok"] = ok
    return out, ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeminors",
        description="Exact principal minors of tree distance matrices.",
    )
    parser.add_argument("--schema", action="store_true",
                        help="print the JSON schema of analysis reports and exit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    def tree_args(p):
        p.add_argument("input", help="tree file, or - for stdin")
        p.add_argument("--format", choices=["edgelist", "newick"],
                       help="input format (default: newick if the text ends with ';')")
        p.add_argument("--subset", default="@leaves",
                       help="comma-separated labels, @leaves or @all (default: @leaves)")

    tree_args(sub.add_parser("analyze", help="full report for one tree and subset"))
    forests = sub.add_parser("forests", help="list S-rooted or (S,*)-rooted forests")
    tree_args(forests)
    forests.add_argument("--kind", default="S_star_rooted",
                         choices=[k.value for k in ForestKind])

    verify = sub.add_parser("verify", help="run the invariant sweeps")
    verify.add_argument("--exhaustive-n", type=int, default=0,
                        help=f"all labeled trees with up to this many vertices (max {MAX_EXHAUSTIVE_N})")
    verify.add_argument("--random", type=int, default=0, help="number of random instances")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        _emit(REPORT_SCHEMA)
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        if args.command == "analyze":
            _emit(cmd_analyze(args))
        elif args.command == "forests":
            _emit(cmd_forests(args))
        else:
            payload, ok = cmd_verify(args)
            _emit(payload)
            return 0 if ok else 2
    except IdentityViolation as exc:
        print(f"error: identity violated: {exc}", file=sys.stderr)
        return 2
    except (TreeMinorsError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
