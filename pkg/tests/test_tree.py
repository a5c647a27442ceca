import random

import numpy as np
import pytest
from conftest import bfs_distances, figure1_tree

from quartet_tree import InputError, Tree, random_tree, topo_distances


def test_figure1_distances():
    d = topo_distances(figure1_tree())
    assert d[0, 1] == 2
    assert d[0, 2] == 3
    assert d[2, 3] == 2
    assert np.all(np.diag(d) == 0)


@pytest.mark.parametrize("n", [4, 5, 7, 12, 18, 30])
def test_distances_match_bfs(n):
    rng = random.Random(n)
    for _ in range(5):
        tree = random_tree(n, rng)
        d = topo_distances(tree)
        ref = bfs_distances(tree)
        assert all(d[a, b] == ref[a, b] for a in range(n) for b in range(n))
        off = d[~np.eye(n, dtype=bool)]
        assert off.min() >= 2
        assert np.array_equal(d, d.T)


def test_random_tree_invariants():
    rng = random.Random(0)
    for n in (4, 5, 10, 33):
        tree = random_tree(n, rng)
        tree.validate()
        assert tree.n_nodes == 2 * n - 2
        assert len(tree.edges()) == 2 * n - 3


@pytest.mark.parametrize(
    "adj, message",
    [
        # leaf u of degree 2
        ([[4, 5], [4], [5], [5], [0, 1, 5], [0, 2, 3, 4]], "degree"),
        # 4 lists 5 but 5 does not list 4
        ([[4], [4], [5], [5], [0, 1, 5], [2, 3, 3]], "symmetric"),
        ([[4], [4], [5], [5], [0, 1, 5], [2, 3, 4], [0]], "nodes"),
        # two disjoint pieces: 4 joins u, v, w and 5 joins x with itself
        ([[4], [4], [4], [5], [0, 1, 2], [3, 5, 5]], "neighbor"),
    ],
)
def test_validate_rejects(adj, message):
    with pytest.raises(InputError, match=message):
        Tree("uvwx", adj)


def test_validate_rejects_small_and_duplicate_labels():
    with pytest.raises(InputError):
        Tree("uvw", [[3], [3], [3], [0, 1, 2]])
    with pytest.raises(InputError, match="unique"):
        Tree("uvwu", [[4], [4], [5], [5], [0, 1, 5], [2, 3, 4]])


def test_node_names():
    tree = figure1_tree()
    assert [tree.node_name(v) for v in range(6)] == ["u", "v", "w", "x", "k0", "k1"]


def test_permuted_keeps_labels_with_structure():
    tree = random_tree(9, random.Random(3), labels="abcdefghi")
    perm = [3, 0, 8, 1, 2, 7, 6, 5, 4]
    moved = tree.permuted(perm)
    d, dm = topo_distances(tree), topo_distances(moved)
    for a in range(9):
        for b in range(9):
            assert dm[perm[a], perm[b]] == d[a, b]
            assert moved.labels[perm[a]] == tree.labels[a]
