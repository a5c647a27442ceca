"""Command-line interface.

    quartet-tree maketree MATRIX [--seed N] [--termination agreement[:R]|simple[:P]]
    quartet-tree ncd DIR_OR_MANIFEST [--compressor bz2|zlib] [-o MATRIX]
    quartet-tree exact MATRIX_OR_WEIGHTS [--cap N]
    quartet-tree gen random-tree|tags --out-dir DIR [--seed N] ...

Exit codes: 0 success, 2 input error, 3 degenerate table, 4 agreement
timeout, 5 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path

import numpy as np

from . import datagen, formats
from .costs import costs_from_matrix, costs_from_weights
from .errors import QuartetTreeError
from .ncd import Corpus, get_compressor, ncd_matrix
from .oracle import DEFAULT_CAP, brute_force_optimum
from .search import SearchConfig, parse_termination, search

log = logging.getLogger("quartet_tree")


def _write_tree_outputs(args, tree) -> None:
    if args.output:
        Path(args.output).write_text(formats.format_newick(tree) + "\n")
    if args.dot:
        Path(args.dot).write_text(formats.format_dot(tree))


def _load_table(path):
    if formats.is_weights_file(path):
        return costs_from_weights(formats.read_weights(path))
    table = costs_from_matrix(formats.read_matrix(path))
    table.require_nondegenerate()
    return table


def cmd_maketree(args) -> int:
    table = _load_table(args.matrix)
    config = SearchConfig(
        seed=args.seed,
        termination=parse_termination(args.termination),
        k_max=args.kmax,
        max_trees=args.max_trees,
    )
    best, stats = search(table, config)
    print(formats.format_newick(best.tree))
    print(f"S(T) {best.score:.6f}")
    print(f"cost {best.cost:.6f}")
    print(f"trees_examined {sum(s.trees_examined for s in stats)}")
    _write_tree_outputs(args, best.tree)
    if args.stats:
        lines = []
        for i, run in enumerate(stats):
            lines.append(f"# run {i} trajectory: trees_examined S(T)")
            lines.extend(run.trajectory_lines())
            lines.append(f"# run {i} histogram: k accepted rejected")
            lines.extend(run.histogram_lines())
        Path(args.stats).write_text("\n".join(lines) + "\n")
    return 0


def cmd_ncd(args) -> int:
    corpus = Corpus.load(args.source)
    matrix = ncd_matrix(corpus, get_compressor(args.compressor), workers=args.workers)
    text = formats.format_matrix(matrix)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_exact(args) -> int:
    table = _load_table(args.path)
    best, count = brute_force_optimum(table, cap=args.cap)
    print(formats.format_newick(best.tree))
    print(f"S(T) {best.score:.6f}")
    print(f"cost {best.cost:.6f}")
    print(f"optima {count}")
    _write_tree_outputs(args, best.tree)
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "random-tree":
        tree, matrix = datagen.random_tree_metric(args.n, random.Random(args.seed), normalized=args.normalized)
        formats.write_matrix(matrix, out / "matrix.txt")
        (out / "tree.newick").write_text(formats.format_newick(tree) + "\n")
    else:
        scale = datagen.FULL_SCALE if args.full_scale else datagen.CI_SCALE
        corpus = datagen.tag_corpus(
            np.random.default_rng(args.seed),
            tag_size=args.tag_size or scale["tag_size"],
            file_size=args.file_size or scale["file_size"],
        )
        corpus.write(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quartet-tree", description="Quartet-tree hierarchical clustering")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maketree", help="search for the best tree for a distance matrix")
    p.add_argument("matrix", help="matrix file (or quartet weights file)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--termination", default="agreement", help="agreement[:R] or simple[:PATIENCE]")
    p.add_argument("--r", type=int, default=None, help="shorthand for --termination agreement:R")
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--max-trees", type=int, default=None, help="per-run cap on examined trees")
    p.add_argument("--stats", help="write per-run trajectories and k histograms here")
    p.add_argument("-o", "--output", help="write the Newick tree here")
    p.add_argument("--dot", help="write a Graphviz description here")
    p.set_defaults(func=cmd_maketree)

    p = sub.add_parser("ncd", help="NCD matrix of a directory or manifest of files")
    p.add_argument("source")
    p.add_argument("--compressor", default="bz2")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ncd)

    p = sub.add_parser("exact", help="brute-force optimum for small n")
    p.add_argument("path", help="matrix file or quartet weights file")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("-o", "--output")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("gen", help="generate controlled test data")
    p.add_argument("kind", choices=("random-tree", "tags"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=18, help="leaves of the random tree")
    p.add_argument("--normalized", action="store_true", help="divide by 2n instead of 18")
    p.add_argument("--full-scale", action="store_true", help="80 KB files with 1 KB tags")
    p.add_argument("--tag-size", type=int)
    p.add_argument("--file-size", type=int)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "r", None) is not None:
        args.termination = f"agreement:{args.r}"
    try:
        return args.func(args)
    except QuartetTreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
