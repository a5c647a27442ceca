"""Unrooted ternary trees with labeled leaves.

Node numbering is fixed for a tree on ``n`` leaves: ids ``0 .. n-1`` are the
leaves (leaf ``i`` carries ``labels[i]``) and ids ``n .. 2n-3`` are the
internal nodes, displayed as ``k0 .. k{n-3}``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import InputError


class Tree:
    """Immutable unrooted tree: ``n`` leaves of degree 1, ``n - 2`` internal
    nodes of degree 3, ``2n - 3`` edges.

    Parameters
    ----------
    labels : sequence of str
        Leaf names, indexed by leaf id.
    adjacency : sequence of sequences of int
        Neighbor lists for all ``2n - 2`` nodes.
    validate : bool
        Check the structural invariants (on by default).
    """

    __slots__ = ("labels", "_adj", "_dist")

    def __init__(self, labels: Sequence[str], adjacency, validate: bool = True):
        self.labels = tuple(labels)
        self._adj = tuple(tuple(int(w) for w in nbrs) for nbrs in adjacency)
        self._dist = None
        if validate:
            self.validate()

    @classmethod
    def _trusted(cls, labels: tuple, adj) -> "Tree":
        tree = cls.__new__(cls)
        tree.labels = labels
        tree._adj = tuple(tuple(nbrs) for nbrs in adj)
        tree._dist = None
        return tree

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def adjacency(self) -> tuple:
        return self._adj

    def neighbors(self, v: int) -> tuple:
        return self._adj[v]

    def is_leaf(self, v: int) -> bool:
        return v < self.n

    def node_name(self, v: int) -> str:
        return self.labels[v] if v < self.n else f"k{v - self.n}"

    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u, nbrs in enumerate(self._adj) for w in nbrs if u < w]

    def mutable_adjacency(self) -> list[list[int]]:
        return [list(nbrs) for nbrs in self._adj]

    def validate(self) -> None:
        """Raise InputError unless the tree is a valid unrooted ternary tree."""
        n = self.n
        if n < 4:
            raise InputError(f"a tree needs at least 4 leaves, got {n}")
        if len(set(self.labels)) != n or any(not lab for lab in self.labels):
            raise InputError("leaf labels must be unique and non-empty")
        if len(self._adj) != 2 * n - 2:
            raise InputError(f"expected {2 * n - 2} nodes, got {len(self._adj)}")
        n_edges = 0
        for v, nbrs in enumerate(self._adj):
            want = 1 if v < n else 3
            if len(nbrs) != want:
                raise InputError(f"node {self.node_name(v)} has degree {len(nbrs)}, expected {want}")
            for w in nbrs:
                if not 0 <= w < len(self._adj) or w == v:
                    raise InputError(f"bad neighbor {w} of node {v}")
                if v not in self._adj[w]:
                    raise InputError(f"edge {v}-{w} is not symmetric")
            if len(set(nbrs)) != len(nbrs):
                raise InputError(f"node {v} has a repeated neighbor")
            n_edges += len(nbrs)
        n_edges //= 2
        # connected with N - 1 edges <=> tree
        seen = {0}
        stack = [0]
        while stack:
            for w in self._adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self._adj) or n_edges != len(self._adj) - 1:
            raise InputError("adjacency is not a connected acyclic graph")

    def leaf_distances(self) -> np.ndarray:
        """Edge-count path lengths between all leaf pairs, shape ``(n, n)``.

        The result is cached and must not be modified.
        """
        if self._dist is None:
            self._dist = _leaf_distances(self._adj, self.n)
            self._dist.setflags(write=False)
        return self._dist

    def relabeled(self, labels: Sequence[str]) -> "Tree":
        """Same shape, new leaf names (leaf ``i`` gets ``labels[i]``)."""
        return Tree(labels, self._adj)

    def permuted(self, perm: Sequence[int]) -> "Tree":
        """Move the leaf with id ``i`` to id ``perm[i]``, keeping its label.

        Used to compare trees after the leaf set has been reordered.
        """
        n = self.n
        mapping = list(perm) + list(range(n, self.n_nodes))
        adj: list = [None] * self.n_nodes
        labels: list = [None] * n
        for v, nbrs in enumerate(self._adj):
            adj[mapping[v]] = [mapping[w] for w in nbrs]
        for i in range(n):
            labels[perm[i]] = self.labels[i]
        return Tree(labels, adj)

    def __repr__(self) -> str:
        return f"Tree(n={self.n})"


def _leaf_distances(adj, n: int) -> np.ndarray:
    # Root at internal node n and number nodes in preorder, so every subtree
    # is a contiguous range [pos, pos + size). Counting the common
    # ancestors-or-self of two leaves gives the depth of their LCA:
    #   d(a, b) = depth(a) + depth(b) - 2 * depth(lca(a, b))
    root = n
    n_nodes = len(adj)
    parent = [-1] * n_nodes
    depth = [0] * n_nodes
    pos = [0] * n_nodes
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        pos[v] = len(order)
        order.append(v)
        p = parent[v]
        for w in adj[v]:
            if w != p:
                parent[w] = v
                depth[w] = depth[v] + 1
                stack.append(w)
    size = [1] * n_nodes
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    start = np.array(pos)
    stop = start + np.array(size)
    leaf = start[:n, None]
    anc = ((start <= leaf) & (leaf < stop)).astype(np.int32)
    common = anc @ anc.T
    d = np.array(depth[:n], dtype=np.int32)
    return d[:, None] + d[None, :] - 2 * (common - 1)


def star_adjacency(n: int) -> list[list[int]]:
    """Partial adjacency for ``n`` final leaves with leaves 0, 1, 2 joined at
    internal node ``n``. Grow it with :func:`insert_leaf`."""
    adj: list[list[int]] = [[] for _ in range(2 * n - 2)]
    for leaf in range(3):
        adj[leaf].append(n)
        adj[n].append(leaf)
    return adj


def insert_leaf(adj: list[list[int]], n: int, leaf: int, u: int, v: int) -> None:
    """Subdivide edge ``u - v`` with a new internal node carrying ``leaf``.

    Leaves must be inserted in order 3, 4, ...; leaf ``i`` uses internal node
    ``n + i - 2``.
    """
    c = n + leaf - 2
    adj[u][adj[u].index(v)] = c
    adj[v][adj[v].index(u)] = c
    adj[c] = [u, v, leaf]
    adj[leaf] = [c]


def remove_leaf(adj: list[list[int]], n: int, leaf: int) -> None:
    """Undo :func:`insert_leaf` for the most recently inserted ``leaf``."""
    c = n + leaf - 2
    u, v, _ = adj[c]
    adj[u][adj[u].index(c)] = v
    adj[v][adj[v].index(c)] = u
    adj[c] = []
    adj[leaf] = []


def partial_edges(adj: list[list[int]]) -> list[tuple[int, int]]:
    return [(u, w) for u, nbrs in enumerate(adj) for w in nbrs if u < w]


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))
