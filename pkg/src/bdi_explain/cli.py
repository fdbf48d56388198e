"""Command-line interface: ``bdi-explain <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from enum import IntEnum
from pathlib import Path

from . import __version__
from .errors import (
    ExplainError,
    InvalidFoilError,
    NoValidFoilsError,
    NotInTraceError,
)
from .evaluation import bin_table, run_eval, saving_trend, summarize, write_csv, write_manifest
from .explain import dumps as dump_factors
from .explain import explain_contrastive, explain_full, explain_implicit, render_text
from .rng import Xoshiro256, derive_seed
from .trace import OFF_PATH_MODES, TraceRecord, generate_trace, load_trace, validate_trace
from .tree import load_tree, strict_bdi_diagnostics
from .treegen import TREE_STREAM, GenParams, gen_corpus


class Exit(IntEnum):
    OK = 0
    ERROR = 1
    USAGE = 2
    INPUT = 3
    NOT_IN_TRACE = 4
    INVALID_FOIL = 5
    NO_VALID_FOILS = 6
    INVALID = 7


FORMATS = """\
exit codes:
  0 success            4 fact not in trace ("I didn't")
  1 unexpected error   5 foil is not a valid foil of the fact
  2 bad usage          6 fact has no valid foils (implicit question)
  3 bad input file     7 validation found problems

tree file (JSON):
  {"format": "goal-plan-tree/1", "cond": [<root condition atoms>],
   "root": <node>}
  node   = {"id": str, "name": str?, "kind": "action"|"all"|"seq"|"one"|"sone"|"xone",
            "pre": [atom], "post": [atom]            (actions only)
            "children": [child, ...]}                (goals only, non-empty)
  child  = {"cond": [atom]?, "seqn": int?, "node": node}
  seqn is required (1..n in order) under seq/sone goals and forbidden elsewhere.

trace file (JSON):
  {"tree": <tree file reference>, "actions": [node id, ...],
   "markings": {node id: "true"|"false"|"unknown"}}

factor output (--format json):
  {"factors": [{"kind": "desire", "content": id}
             | {"kind": "belief", "polarity": "positive"|"negated", "content": [atom]}
             | {"kind": "valuing", "less": id, "more": id}], "size": int}

eval output (--out PREFIX):
  PREFIXrecords.csv  tree_index,fact,foil,full_size,contrastive_size
  PREFIXsummary.csv  f_bin,median_f,median_c,median_saving,count
  PREFIXmanifest.json
"""


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _add_gen_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5, help="probability a non-root node is an action")
    p.add_argument("--delta", type=int, default=5, help="maximum tree depth")
    p.add_argument("--epsilon", type=int, default=5, help="maximum number of children")
    p.add_argument("--theta", type=int, default=20, help="minimum tree size")
    p.add_argument("--post-prob", type=float, default=0.0, help="chance an action gets a random postcondition")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)


def _params(args) -> GenParams:
    return GenParams(args.alpha, args.delta, args.epsilon, args.theta, args.seed, args.post_prob)


def cmd_explain(args) -> int:
    tree = load_tree(args.tree)
    record = load_trace(args.trace)
    trace, marking = record.actions, record.marking
    if trace.count(args.fact) > 1:
        _warn(f"{args.fact!r} occurs more than once in the trace; explaining its first occurrence")
    if args.foil is not None:
        if args.foil in trace:
            _warn(f"foil {args.foil!r} was performed in this trace")
        fs = explain_contrastive(tree, trace, marking, args.fact, args.foil)
    elif args.implicit:
        fs = explain_implicit(tree, trace, marking, args.fact)
    else:
        fs = explain_full(tree, trace, marking, args.fact)
    if args.format == "json":
        print(dump_factors(fs))
    else:
        print(render_text(fs, tree))
    return Exit.OK


def cmd_foils(args) -> int:
    tree = load_tree(args.tree)
    for f in sorted(tree.valid_foils(args.fact)):
        print(f)
    return Exit.OK


def cmd_gen(args) -> int:
    params = _params(args)
    trees = gen_corpus(params, args.count)
    if args.out is None:
        if args.count != 1:
            raise SystemExit("gen: --out DIR is required when --count > 1")
        print(trees[0].dumps())
        return Exit.OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, t in enumerate(trees):
        name = f"tree_{k:04d}.json"
        (out / name).write_text(t.dumps() + "\n")
        entries.append({"index": k, "file": name, "stream_seed": derive_seed(params.seed, TREE_STREAM, k),
                        "size": len(t), "fingerprint": t.fingerprint()})
    manifest = {"tool": "bdi-explain", "version": __version__, "params": params.to_dict(), "trees": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(trees)} trees to {out}")
    return Exit.OK


def cmd_trace(args) -> int:
    tree = load_tree(args.tree)
    rng = Xoshiro256(args.seed)
    actions, marking = generate_trace(tree, args.fact, rng, args.p_true, args.off_path)
    text = TraceRecord(actions, marking, str(args.tree)).dumps()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return Exit.OK


def cmd_eval(args) -> int:
    params = _params(args)
    if args.tree_file:
        trees = [load_tree(p) for p in args.tree_file]
        records = run_eval(params, len(trees), trees=trees, off_path=args.off_path)
        n_trees = len(trees)
    else:
        records = run_eval(params, args.count, off_path=args.off_path)
        n_trees = args.count
    summary = summarize(records) if records else None
    write_csv(records, summary, args.out)
    write_manifest(args.out, params, n_trees, len(records), off_path=args.off_path,
                   tree_files=[str(p) for p in args.tree_file or []])
    print(f"{len(records)} records from {n_trees} trees")
    if summary is not None:
        print(bin_table(summary))
        try:
            trend = saving_trend(summary)
            print(f"median C within +/-{trend.max_c_deviation:g} of {trend.reference_c:g} for F >= {trend.start}; "
                  f"rank corr(F, median F-C) = {trend.saving_rank_corr:.3f}")
        except (ValueError, KeyError):
            pass
    return Exit.OK


def cmd_validate(args) -> int:
    tree = load_tree(args.tree)
    diags = strict_bdi_diagnostics(tree) if args.strict else []
    if args.trace:
        record = load_trace(args.trace)
        diags += validate_trace(tree, record.actions, record.marking)
    for d in diags:
        print(d)
    if not diags:
        print("ok")
    return Exit.INVALID if diags else Exit.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdi-explain",
        description="Explain actions of BDI agents over goal-plan trees, and benchmark explanation sizes.",
        epilog=FORMATS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="why did you do FACT (instead of FOIL)?")
    p.add_argument("tree", type=Path)
    p.add_argument("trace", type=Path)
    p.add_argument("--fact", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--foil", help="explicit foil: contrastive explanation")
    mode.add_argument("--implicit", action="store_true", help="union over all valid foils")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("foils", help="list the valid foils of an action")
    p.add_argument("tree", type=Path)
    p.add_argument("fact")
    p.set_defaults(func=cmd_foils)

    p = sub.add_parser("gen", help="generate random goal-plan trees")
    _add_gen_args(p)
    p.add_argument("--out", help="output directory (omit with --count 1 to print the tree)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("trace", help="generate a trace that performs FACT")
    p.add_argument("tree", type=Path)
    p.add_argument("--fact", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--p-true", type=float, default=0.5, help="chance a passed-over 'one' sibling's condition held")
    p.add_argument("--off-path", choices=OFF_PATH_MODES, default="random")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("eval", help="compare full and contrastive explanation sizes")
    _add_gen_args(p)
    p.add_argument("--tree-file", nargs="+", type=Path, help="evaluate these trees instead of generating a corpus")
    p.add_argument("--off-path", choices=OFF_PATH_MODES, default="random")
    p.add_argument("--out", required=True, help="output path prefix, e.g. results/run1_")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="check a tree (and optionally a trace)")
    p.add_argument("tree", type=Path)
    p.add_argument("trace", type=Path, nargs="?")
    p.add_argument("--strict", action="store_true", help="also require the alternating AND/OR structure")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except NotInTraceError as exc:
        print(str(exc), file=sys.stderr)
        return Exit.NOT_IN_TRACE
    except InvalidFoilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return Exit.INVALID_FOIL
    except NoValidFoilsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return Exit.NO_VALID_FOILS
    except (ExplainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return Exit.INPUT


if __name__ == "__main__":
    sys.exit(main())
