"""Exact small-n machinery: counting, enumerating and brute-force optimizing."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import EnumerationCapError, InputError
from .quartets import QuartetCostTable, ScoredTree, Scorer, embedded_codes
from .tree import Tree, default_labels, insert_leaf, remove_leaf, star_adjacency

DEFAULT_CAP = 10
# keep the full code matrix in memory up to this n (n=9: 135135 x 126 bytes)
_CACHE_MAX_N = 9


def count_trees(n: int) -> int:
    """Number of unrooted ternary trees on ``n`` labeled leaves, (2n-5)!!."""
    if n < 4:
        raise InputError(f"need at least 4 leaves, got {n}")
    total = 1
    for f in range(3, 2 * n - 4, 2):
        total *= f
    return total


def enumerate_trees(n: int, labels=None, cap: int = DEFAULT_CAP) -> Iterator[Tree]:
    """Yield every tree on ``n`` leaves exactly once.

    Leaf ``i`` (from 3 on) is inserted into each edge of every tree on the
    first ``i`` leaves, depth first, so only one partial tree is alive.
    """
    if n < 4:
        raise InputError(f"need at least 4 leaves, got {n}")
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap} ({count_trees(n)} trees)")
    labels = tuple(labels) if labels is not None else default_labels(n)
    adj = star_adjacency(n)
    edges = [(0, n), (1, n), (2, n)]

    def grow(leaf: int) -> Iterator[Tree]:
        if leaf == n:
            yield Tree._trusted(labels, adj)
            return
        c = n + leaf - 2
        for i in range(len(edges)):
            u, v = edges[i]
            insert_leaf(adj, n, leaf, u, v)
            edges[i] = (u, c)
            edges.extend(((v, c), (leaf, c)))
            yield from grow(leaf + 1)
            del edges[-2:]
            edges[i] = (u, v)
            remove_leaf(adj, n, leaf)

    yield from grow(3)


@lru_cache(maxsize=4)
def _code_matrix(n: int) -> np.ndarray:
    codes = np.array([embedded_codes(t) for t in enumerate_trees(n, cap=_CACHE_MAX_N)], dtype=np.uint8)
    codes.setflags(write=False)
    return codes


def _excesses(table: QuartetCostTable, codes: np.ndarray) -> np.ndarray:
    flat = np.ascontiguousarray(table.excess).ravel()
    return flat[3 * np.arange(table.n_quartets) + codes].sum(axis=1)


def brute_force_optimum(table: QuartetCostTable, cap: int = DEFAULT_CAP) -> tuple[ScoredTree, int]:
    """Globally cheapest tree (first in enumeration order) and the number of
    trees within ``1e-12 * (M - m)`` of its cost."""
    n = table.n
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap} ({count_trees(n)} trees)")
    table.require_nondegenerate()
    tol = 1e-12 * table.spread
    if n <= _CACHE_MAX_N:
        excess = _excesses(table, _code_matrix(n))
        best = int(np.argmin(excess))
        count = int(np.count_nonzero(excess <= excess[best] + tol))
        tree = next(t for i, t in enumerate(enumerate_trees(n, table.labels, cap=cap)) if i == best)
        return Scorer(table).scored(Tree._trusted(table.labels, tree.adjacency)), count

    scorer = Scorer(table)
    best_tree, best_excess, count = None, np.inf, 0
    chunk: list[Tree] = []

    def flush():
        nonlocal best_tree, best_excess, count
        excess = _excesses(table, np.array([embedded_codes(t) for t in chunk]))
        i = int(np.argmin(excess))
        if excess[i] < best_excess - tol:
            best_tree, best_excess = chunk[i], excess[i]
            count = 0
        count += int(np.count_nonzero(excess <= best_excess + tol))
        chunk.clear()

    for tree in enumerate_trees(n, table.labels, cap=cap):
        chunk.append(Tree._trusted(tree.labels, tree.adjacency))
        if len(chunk) == 4096:
            flush()
    if chunk:
        flush()
    return scorer.scored(best_tree), count
