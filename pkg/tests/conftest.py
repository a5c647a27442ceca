"""Shared fixtures and independent reference implementations.

The helpers here deliberately avoid the package's own distance and
consistency code: they work from plain edge lists with BFS and explicit
path intersection.
"""

import itertools
import random
from collections import deque

import pytest

from quartet_tree import Tree


def bfs_distances(tree):
    """All leaf-pair path lengths by breadth-first search from each leaf."""
    n = tree.n
    out = {}
    for a in range(n):
        dist = {a: 0}
        queue = deque([a])
        while queue:
            v = queue.popleft()
            for w in tree.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        for b in range(n):
            out[a, b] = dist[b]
    return out


def path_nodes(tree, a, b):
    parent = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in tree.neighbors(v):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    nodes = {b}
    while b != a:
        b = parent[b]
        nodes.add(b)
    return nodes


def crossing_oracle(tree, quartet):
    """The pairing (0, 1, 2) whose two paths share no node."""
    u, v, w, x = quartet
    pairings = (((u, v), (w, x)), ((u, w), (v, x)), ((u, x), (v, w)))
    disjoint = [
        code
        for code, ((a, b), (c, d)) in enumerate(pairings)
        if not path_nodes(tree, a, b) & path_nodes(tree, c, d)
    ]
    assert len(disjoint) == 1
    return disjoint[0]


def figure1_tree():
    """The n=4 tree uv|wx: u, v on internal node 4; w, x on node 5."""
    return Tree("uvwx", [[4], [4], [5], [5], [0, 1, 5], [2, 3, 4]])


def leaf_splits(tree):
    """Leaf bipartitions of every edge, as the leaf set on one side."""
    n = tree.n
    out = []
    for u, w in tree.edges():
        side = {w}
        stack = [w]
        while stack:
            for y in tree.neighbors(stack.pop()):
                if y != u and y not in side:
                    side.add(y)
                    stack.append(y)
        out.append(frozenset(v for v in side if v < n))
    return out


def in_common_clade(tree, members, excluded):
    """True if some edge separates all ``members`` from all ``excluded``."""
    everything = frozenset(range(tree.n))
    for split in leaf_splits(tree):
        for side in (split, everything - split):
            if members <= side and not excluded & side:
                return True
    return False


# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return random.Random(12345)


def all_quartets(n):
    return list(itertools.combinations(range(n), 4))
