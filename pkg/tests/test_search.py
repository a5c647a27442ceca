import random
from collections import Counter

import numpy as np
import pytest
from conftest import leaf_splits
from hypothesis import given, settings
from hypothesis import strategies as st

from quartet_tree import (
    AgreementTimeout,
    DegenerateTableError,
    InputError,
    QuartetCostTable,
    Tree,
    count_trees,
    counterexample_table,
    enumerate_trees,
    quartet_key,
    random_cost_table,
    random_tree,
)
from quartet_tree.costs import DistanceMatrix, costs_from_matrix
from quartet_tree.datagen import random_tree_metric
from quartet_tree.search import (
    Agreement,
    MutationKind,
    SearchConfig,
    Simple,
    apply_simple_mutation,
    default_k_max,
    fat_tail_mass,
    hill_climb,
    k_distribution,
    k_mutation,
    make_rng,
    parse_termination,
    r_for_n,
    sample_k,
    search,
)


def test_fat_tail_spot_values():
    assert fat_tail_mass(62) == 1 / 2304
    assert fat_tail_mass(2) == 1 / 16
    p = k_distribution(64)
    assert p.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.argmax(p) == 0
    assert np.all(np.diff(p) < 0)


def test_sample_k_frequencies():
    rng = random.Random(0)
    draws = 200_000
    counts = Counter(sample_k(rng, 64) for _ in range(draws))
    p = k_distribution(64)
    assert set(counts) <= set(range(1, 65))
    for k in range(1, 9):
        se = np.sqrt(p[k - 1] * (1 - p[k - 1]) / draws)
        assert abs(counts[k] / draws - p[k - 1]) < 4 * se


def test_sample_k_truncation():
    rng = random.Random(1)
    assert {sample_k(rng, 1) for _ in range(100)} == {1}
    assert max(sample_k(rng, 3) for _ in range(2000)) == 3
    with pytest.raises(InputError):
        sample_k(rng, 0)
    assert default_k_max(10) == 64
    assert default_k_max(50) == 100


def test_random_tree_is_uniform_n5():
    rng = random.Random(5)
    counts = Counter(quartet_key(random_tree(5, rng)) for _ in range(15_000))
    assert len(counts) == 15
    # each count is Binomial(15000, 1/15): mean 1000, sd ~ 30.5
    assert all(abs(c - 1000) < 5 * 30.5 for c in counts.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 30), st.integers(0, 2**32 - 1), st.sampled_from(list(MutationKind)))
def test_simple_mutation_keeps_a_valid_tree(n, seed, kind):
    rng = random.Random(seed)
    tree = random_tree(n, rng)
    moved = apply_simple_mutation(tree, kind, rng)
    moved.validate()
    assert moved.labels == tree.labels


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 25), st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_k_mutation_keeps_a_valid_tree(n, seed, k):
    rng = random.Random(seed)
    k_mutation(random_tree(n, rng), k, rng).validate()


def _swap_leaves(tree, a, b):
    adj = tree.mutable_adjacency()
    pa, pb = adj[a][0], adj[b][0]
    adj[a][0], adj[b][0] = pb, pa
    adj[pa][adj[pa].index(a)] = b
    adj[pb][adj[pb].index(b)] = a
    return Tree(tree.labels, adj)


def test_leaf_swap_is_an_involution():
    # swapping the two moved leaves again restores the original tree
    for seed in range(30):
        tree = random_tree(9, random.Random(seed))
        once = apply_simple_mutation(tree, MutationKind.LEAF_SWAP, random.Random(1000 + seed))
        a, b = [v for v in range(9) if tree.neighbors(v) != once.neighbors(v)]
        assert quartet_key(_swap_leaves(once, a, b)) == quartet_key(tree)
        assert quartet_key(once) != quartet_key(tree)


def test_leaf_swap_changes_only_two_leaves():
    tree = random_tree(10, random.Random(2))
    moved = apply_simple_mutation(tree, MutationKind.LEAF_SWAP, random.Random(3))
    same = [a for a in range(10) if tree.neighbors(a) == moved.neighbors(a)]
    assert len(same) == 8


def test_subtree_transfer_preserves_the_moved_clade():
    rng = random.Random(4)
    for _ in range(30):
        tree = random_tree(10, rng)
        moved = apply_simple_mutation(tree, MutationKind.SUBTREE_TRANSFER, rng)
        # at least one nontrivial split survives a single prune and regraft
        before, after = _splits(tree), _splits(moved)
        assert before & after


def _splits(tree):
    n = tree.n
    out = set()
    for side in leaf_splits(tree):
        if 0 in side:
            side = frozenset(range(n)) - side
        if 2 <= len(side) <= n - 2:
            out.add(side)
    return out


@pytest.mark.parametrize("kind", list(MutationKind))
def test_mutations_change_the_tree(kind):
    rng = random.Random(6)
    changed = 0
    for _ in range(200):
        tree = random_tree(8, rng)
        changed += quartet_key(apply_simple_mutation(tree, kind, rng)) != quartet_key(tree)
    assert changed >= 190


@pytest.mark.parametrize("n", [5, 6])
def test_mutation_graph_reaches_every_tree(n):
    trees = {quartet_key(t): t for t in enumerate_trees(n)}
    rng = random.Random(n)
    reached = set()
    for key, tree in trees.items():
        for kind in MutationKind:
            for _ in range(40):
                reached.add((key, quartet_key(apply_simple_mutation(tree, kind, rng))))
    # connected: a breadth-first walk from one tree visits all of them
    graph = {}
    for a, b in reached:
        graph.setdefault(a, set()).add(b)
    start = next(iter(trees))
    seen, frontier = {start}, [start]
    while frontier:
        nxt = [b for a in frontier for b in graph.get(a, ()) if b not in seen]
        seen.update(nxt)
        frontier = list(set(nxt))
    assert len(seen) == count_trees(n)


def test_make_rng_streams_differ_and_repeat():
    a, b = make_rng(7, 0), make_rng(7, 1)
    assert a.random() != b.random()
    assert make_rng(7, 0).random() == make_rng(7, 0).random()
    with pytest.raises(InputError):
        make_rng(-1)


def test_r_for_n():
    assert [r_for_n(n) for n in (4, 5, 6, 9, 10, 15, 16, 17, 18, 60)] == [6, 6, 5, 5, 4, 4, 3, 3, 2, 2]
    with pytest.raises(InputError):
        r_for_n(3)


def test_parse_termination():
    assert parse_termination("simple") == Simple()
    assert parse_termination("simple:500") == Simple(500)
    assert parse_termination("agreement") == Agreement()
    assert parse_termination("agreement:auto") == Agreement()
    assert parse_termination("agreement:3") == Agreement(3)
    for bad in ("simple:x", "agreement:9", "anneal", "simple:0"):
        with pytest.raises(InputError):
            parse_termination(bad)


def test_config_validation():
    for kwargs in ({"seed": -1}, {"seed": 2**64}, {"k_max": 0}, {"max_trees": 0}):
        with pytest.raises(InputError):
            SearchConfig(**kwargs)


def test_trajectory_is_monotone_and_stats_add_up():
    table = random_cost_table(9, np.random.default_rng(1))
    best, stats = hill_climb(table, SearchConfig(termination=Simple(2000)), make_rng(1))
    scores = [s for _, s in stats.score_trajectory]
    times = [t for t, _ in stats.score_trajectory]
    assert all(a < b for a, b in zip(scores, scores[1:]))
    assert times == sorted(times) and times[0] == 0
    assert scores[-1] == pytest.approx(best.score, abs=1e-12)
    total = sum(stats.accepted_k_histogram.values()) + sum(stats.rejected_k_histogram.values())
    assert total == stats.trees_examined
    assert stats.trees_examined - times[-1] == 2000 or best.score == 1.0


def test_stats_lines():
    table = random_cost_table(7, np.random.default_rng(2))
    _, stats = hill_climb(table, SearchConfig(termination=Simple(200)), make_rng(2))
    for line in stats.trajectory_lines():
        t, s = line.split()
        assert int(t) >= 0 and len(s.split(".")[1]) == 6
    rows = [tuple(map(int, line.split())) for line in stats.histogram_lines()]
    assert [k for k, _, _ in rows] == sorted(k for k, _, _ in rows)
    assert sum(a + r for _, a, r in rows) == stats.trees_examined


def test_max_trees_caps_a_single_run():
    table = random_cost_table(12, np.random.default_rng(3))
    _, stats = hill_climb(table, SearchConfig(termination=Simple(10**6), max_trees=50), make_rng(3))
    assert stats.trees_examined == 50


def test_reproducible_for_a_seed():
    tree, m = random_tree_metric(10, random.Random(4))
    noisy = np.array(m.entries) + np.random.default_rng(4).random((10, 10)) * 0.05
    table = costs_from_matrix(DistanceMatrix(m.labels, (noisy + noisy.T) / 2))
    config = SearchConfig(seed=42, termination=Agreement(3), max_trees=20_000)
    (a, sa), (b, sb) = search(table, config), search(table, config)
    assert quartet_key(a.tree) == quartet_key(b.tree)
    assert a.score == b.score
    assert [s.trees_examined for s in sa] == [s.trees_examined for s in sb]


def test_tree_metric_recovered():
    tree, m = random_tree_metric(12, random.Random(8))
    best, _ = search(costs_from_matrix(m), SearchConfig(seed=8))
    assert best.score == 1.0
    assert quartet_key(best.tree) == quartet_key(tree)


def test_single_run_agreement():
    table = random_cost_table(8, np.random.default_rng(5))
    best, stats = search(table, SearchConfig(termination=Agreement(1), max_trees=3000))
    assert len(stats) == 1
    assert 0.0 <= best.score <= 1.0


def test_agreement_runs_hold_the_same_tree():
    table = random_cost_table(9, np.random.default_rng(6), kind="binary")
    best, stats = search(table, SearchConfig(seed=3, termination=Agreement(2)))
    assert len(stats) == 2
    assert best.score > 0.5


def test_agreement_timeout():
    table = random_cost_table(16, np.random.default_rng(7))
    with pytest.raises(AgreementTimeout) as info:
        search(table, SearchConfig(termination=Agreement(4), max_trees=30))
    assert len(info.value.snapshots) == 4
    assert info.value.exit_code == 4


def test_search_finds_the_unique_optimum():
    best, _ = search(counterexample_table(0.1), SearchConfig(seed=0))
    assert best.score == pytest.approx(4 / 4.9, abs=1e-12)


def test_degenerate_table_rejected():
    with pytest.raises(DegenerateTableError):
        search(QuartetCostTable(np.ones((15, 3))), SearchConfig())
