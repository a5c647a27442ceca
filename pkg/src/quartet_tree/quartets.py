"""Quartets, quartet topologies, cost tables and tree scoring.

A quartet is a strictly increasing 4-tuple of leaf ids ``(u, v, w, x)``.
Its three topologies are encoded by which member pairs with ``u``::

    0  uv|wx
    1  uw|vx
    2  ux|vw

Quartets of an ``n``-leaf universe are ordered lexicographically, as
``itertools.combinations(range(n), 4)`` produces them. All per-quartet arrays
(cost rows, embedded topology codes) use that order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateTableError, InputError
from .tree import Tree, default_labels

PAIRING_NAMES = ("uv|wx", "uw|vx", "ux|vw")

# member positions (first pair, second pair) for each pairing code
_PAIR_POSITIONS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


class Quartet(NamedTuple):
    u: int
    v: int
    w: int
    x: int

    @classmethod
    def of(cls, ids: Sequence[int], n: int | None = None) -> "Quartet":
        """Canonical quartet from any four distinct leaf ids."""
        members = sorted(int(i) for i in ids)
        if len(members) != 4 or len(set(members)) != 4:
            raise InputError(f"a quartet needs 4 distinct leaves, got {list(ids)}")
        if members[0] < 0 or (n is not None and members[3] >= n):
            raise InputError(f"quartet {members} out of range for n={n}")
        return cls(*members)

    def rank(self, n: int) -> int:
        """Position in the lexicographic order of all quartets on ``n`` leaves."""
        r = 0
        prev = -1
        for i, c in enumerate(self):
            for j in range(prev + 1, c):
                r += math.comb(n - 1 - j, 3 - i)
            prev = c
        return r


@dataclass(frozen=True)
class Topology:
    """One of the three splits of a quartet into two pairs."""

    quartet: Quartet
    pairing: int

    @classmethod
    def from_pairs(cls, a: int, b: int, c: int, d: int) -> "Topology":
        """Canonical form of the split ``ab|cd`` (any member order)."""
        q = Quartet.of((a, b, c, d))
        partner = b if a == q.u else a if b == q.u else d if c == q.u else c
        return cls(q, q.index(partner) - 1)

    @property
    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        (i, j), (k, l) = _PAIR_POSITIONS[self.pairing]
        q = self.quartet
        return (q[i], q[j]), (q[k], q[l])

    def format(self, labels: Sequence[str] | None = None) -> str:
        (a, b), (c, d) = self.pairs
        if labels is None:
            return f"{a} {b}|{c} {d}"
        return f"{labels[a]} {labels[b]}|{labels[c]} {labels[d]}"

    def __str__(self) -> str:
        return self.format()


@lru_cache(maxsize=16)
def quartet_array(n: int) -> np.ndarray:
    """All quartets on ``n`` leaves, shape ``(C(n,4), 4)``, canonical order."""
    if n < 4:
        raise InputError(f"need at least 4 leaves, got {n}")
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), 4)),
        dtype=np.int64,
        count=4 * math.comb(n, 4),
    )
    out = flat.reshape(-1, 4)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def _pair_index(n: int) -> tuple[np.ndarray, ...]:
    # flat indices into an (n, n) distance matrix for the six member pairs
    # of every quartet, ordered as (uv, wx, uw, vx, ux, vw)
    q = quartet_array(n)
    out = []
    for first, second in _PAIR_POSITIONS:
        for i, j in (first, second):
            out.append(q[:, i] * n + q[:, j])
    return tuple(out)


def topo_distances(tree: Tree) -> np.ndarray:
    """Leaf-to-leaf path lengths in edges, shape ``(n, n)``."""
    return tree.leaf_distances()


def _pairing_sums(dist_flat: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    uv, wx, uw, vx, ux, vw = _pair_index(n)
    return dist_flat[uv] + dist_flat[wx], dist_flat[uw] + dist_flat[vx], dist_flat[ux] + dist_flat[vw]


def embedded_codes(tree: Tree) -> np.ndarray:
    """Pairing code of the embedded topology of every quartet, canonical order.

    The consistent pairing is the one with the smallest path-length sum. On
    a ternary tree that minimum is strict and the other two sums are equal
    (four-point condition), so ``s0 < s1`` means 0, ``s1 < s0`` means 1 and
    ``s0 == s1`` means 2.
    """
    s0, s1, _ = _pairing_sums(tree.leaf_distances().ravel(), tree.n)
    return (s1 < s0).view(np.uint8) + 2 * (s0 == s1).view(np.uint8)


def consistent_topology(tree: Tree, q: Sequence[int]) -> Topology:
    q = Quartet.of(q, tree.n)
    d = tree.leaf_distances()
    sums = [d[q[i], q[j]] + d[q[k], q[l]] for (i, j), (k, l) in _PAIR_POSITIONS]
    return Topology(q, int(np.argmin(sums)))


def embedded_quartet_set(tree: Tree) -> list[Topology]:
    codes = embedded_codes(tree)
    return [Topology(Quartet(*map(int, q)), int(c)) for q, c in zip(quartet_array(tree.n), codes)]


def quartet_key(tree: Tree) -> bytes:
    """Compact identity of a tree's shape: the embedded codes as bytes.

    Two trees on the same labeled leaf set are equal iff their keys match.
    """
    return embedded_codes(tree).tobytes()


class QuartetCostTable:
    """Cost of every topology of every quartet on ``n`` leaves.

    Parameters
    ----------
    costs : array_like, shape (C(n,4), 3)
        Row ``i`` holds the costs of the three pairings of the ``i``-th
        quartet in canonical order.
    labels : sequence of str, optional
        Leaf names; defaults to ``"0" .. "n-1"``.
    """

    def __init__(self, costs, labels: Sequence[str] | None = None):
        costs = np.array(costs, dtype=np.float64)
        if costs.ndim != 2 or costs.shape[1] != 3:
            raise InputError(f"cost array must have shape (Q, 3), got {costs.shape}")
        n = _n_from_quartets(costs.shape[0])
        if not np.all(np.isfinite(costs)):
            raise InputError("quartet costs must be finite")
        self.n = n
        self.labels = tuple(labels) if labels is not None else default_labels(n)
        if len(self.labels) != n:
            raise InputError(f"{len(self.labels)} labels for a table on {n} leaves")
        costs.setflags(write=False)
        self.costs = costs
        self.minima = costs.min(axis=1)
        self.maxima = costs.max(axis=1)
        self.m = float(self.minima.sum())
        self.M = float(self.maxima.sum())
        # cost above the per-quartet minimum; a tree with zero total excess
        # has S = 1 exactly, independent of float summation order
        self.excess = costs - self.minima[:, None]
        self.spread = float((self.maxima - self.minima).sum())

    @property
    def n_quartets(self) -> int:
        return self.costs.shape[0]

    @property
    def is_degenerate(self) -> bool:
        return not self.spread > 0.0

    def require_nondegenerate(self) -> None:
        if self.is_degenerate:
            raise DegenerateTableError(
                "every topology of every quartet has the same cost (M == m); "
                "all trees are equally good and S(T) is undefined"
            )

    def cost(self, topology: Topology) -> float:
        return float(self.costs[topology.quartet.rank(self.n), topology.pairing])

    def __repr__(self) -> str:
        return f"QuartetCostTable(n={self.n}, m={self.m:g}, M={self.M:g})"


def _n_from_quartets(count: int) -> int:
    n = 4
    while math.comb(n, 4) < count:
        n += 1
    if math.comb(n, 4) != count:
        raise InputError(f"{count} rows is not C(n, 4) for any n")
    return n


@dataclass(frozen=True)
class ScoredTree:
    tree: Tree
    cost: float
    score: float


def _check_dims(tree: Tree, table: QuartetCostTable) -> None:
    if tree.n != table.n:
        raise InputError(f"tree has {tree.n} leaves but the cost table has {table.n}")


def tree_cost(tree: Tree, table: QuartetCostTable) -> float:
    """Total cost of the topologies embedded in ``tree``."""
    _check_dims(tree, table)
    codes = embedded_codes(tree)
    return float(table.costs[np.arange(table.n_quartets), codes].sum())


def score(tree: Tree, table: QuartetCostTable) -> ScoredTree:
    """Cost and normalized benefit score ``(M - C) / (M - m)`` of ``tree``."""
    _check_dims(tree, table)
    table.require_nondegenerate()
    return Scorer(table).scored(tree)


class Scorer:
    """Fast repeated scoring against one table.

    ``excess(tree)`` is the cost above ``m``; lower is better and ``0`` means
    ``S = 1``. Comparing excesses avoids the rounding of the division.
    """

    def __init__(self, table: QuartetCostTable):
        self.table = table
        self._excess_flat = np.ascontiguousarray(table.excess).ravel()
        self._cost_flat = np.ascontiguousarray(table.costs).ravel()
        self._base = 3 * np.arange(table.n_quartets)

    def codes(self, tree: Tree) -> np.ndarray:
        return embedded_codes(tree)

    def excess_of_codes(self, codes: np.ndarray) -> float:
        return float(self._excess_flat[self._base + codes].sum())

    def excess(self, tree: Tree) -> float:
        return self.excess_of_codes(embedded_codes(tree))

    def score_of_excess(self, excess: float) -> float:
        s = 1.0 - excess / self.table.spread
        return min(1.0, max(0.0, s))

    def scored(self, tree: Tree, codes: np.ndarray | None = None) -> ScoredTree:
        if codes is None:
            codes = embedded_codes(tree)
        cost = float(self._cost_flat[self._base + codes].sum())
        return ScoredTree(tree, cost, self.score_of_excess(self.excess_of_codes(codes)))
