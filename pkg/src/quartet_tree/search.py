"""Randomized hill climbing over unrooted ternary trees.

Each proposal applies a k-mutation (k simple mutations, k drawn from a
fat-tailed distribution) to the current best tree and keeps the result if
its score is not worse. Runs end on a perfect score, after a patience window
without improvement, or (agreement mode) when several independent runs hold
the same tree.

All randomness in this module comes from :class:`random.Random` instances,
which are much cheaper per scalar draw than numpy generators.
"""

from __future__ import annotations

import bisect
import enum
import logging
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AgreementTimeout, InputError
from .quartets import QuartetCostTable, ScoredTree, Scorer
from .tree import Tree, insert_leaf, star_adjacency

log = logging.getLogger(__name__)

DEFAULT_PATIENCE = 100_000
MAX_REDRAWS = 16


class MutationKind(enum.Enum):
    LEAF_SWAP = "leaf-swap"
    SUBTREE_SWAP = "subtree-swap"
    SUBTREE_TRANSFER = "subtree-transfer"


_KINDS = tuple(MutationKind)


def make_rng(seed: int, stream: int = 0) -> random.Random:
    """Independent generator for run ``stream`` under a 64-bit ``seed``."""
    if seed < 0:
        raise InputError(f"seed must be non-negative, got {seed}")
    words = np.random.SeedSequence([seed, stream]).generate_state(4, dtype=np.uint32)
    return random.Random(int.from_bytes(words.tobytes(), "little"))


# ---------------------------------------------------------------- trees --


def random_tree(n: int, rng: random.Random, labels=None) -> Tree:
    """Uniformly random tree topology on ``n`` leaves.

    Leaves 3, 4, ... are attached to a uniformly chosen edge of the tree
    built so far; every topology has exactly one such insertion sequence, so
    all ``(2n-5)!!`` trees are equally likely.
    """
    if n < 4:
        raise InputError(f"need at least 4 leaves, got {n}")
    adj = star_adjacency(n)
    edges = [(0, n), (1, n), (2, n)]
    for leaf in range(3, n):
        i = rng.randrange(len(edges))
        u, v = edges[i]
        c = n + leaf - 2
        insert_leaf(adj, n, leaf, u, v)
        edges[i] = (u, c)
        edges.append((v, c))
        edges.append((leaf, c))
    if labels is None:
        labels = tuple(str(i) for i in range(n))
    return Tree._trusted(tuple(labels), adj)


# ------------------------------------------------------------ sampling --


def fat_tail_mass(k: int) -> float:
    """Unnormalized mass ``1 / ((k+2) * log2(k+2)**2)`` of mutation length k."""
    return 1.0 / ((k + 2) * math.log2(k + 2) ** 2)


@lru_cache(maxsize=64)
def _cumulative_mass(k_max: int) -> tuple[float, ...]:
    total = 0.0
    out = []
    for k in range(1, k_max + 1):
        total += fat_tail_mass(k)
        out.append(total)
    return tuple(out)


def k_distribution(k_max: int) -> np.ndarray:
    """Exact probabilities of ``k = 1 .. k_max`` (index ``k - 1``)."""
    mass = np.array([fat_tail_mass(k) for k in range(1, k_max + 1)])
    return mass / mass.sum()


def sample_k(rng: random.Random, k_max: int) -> int:
    """Draw a mutation length from the fat-tail mass truncated at ``k_max``."""
    if k_max < 1:
        raise InputError(f"k_max must be >= 1, got {k_max}")
    cum = _cumulative_mass(k_max)
    return bisect.bisect_right(cum, rng.random() * cum[-1]) + 1


def default_k_max(n: int) -> int:
    return max(64, 2 * n)


# ----------------------------------------------------------- mutations --
# Each mutation edits a mutable adjacency list in place and returns False
# when every redraw was degenerate (the tree is then left unchanged).


def _leaf_swap(adj: list[list[int]], n: int, rng: random.Random) -> bool:
    rand = rng.random
    for _ in range(MAX_REDRAWS):
        a = int(rand() * n)
        b = int(rand() * n)
        pa, pb = adj[a][0], adj[b][0]
        if pa == pb:
            # same leaf or two leaves of one cherry
            continue
        adj[a][0], adj[b][0] = pb, pa
        adj[pa][adj[pa].index(a)] = b
        adj[pb][adj[pb].index(b)] = a
        return True
    return False


def _path(adj: list[list[int]], a: int, b: int) -> list[int]:
    parent = {a: -1}
    stack = [a]
    while stack:
        v = stack.pop()
        if v == b:
            break
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                stack.append(w)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _subtree_swap(adj: list[list[int]], n: int, rng: random.Random) -> bool:
    # The subtree "rooted at" an internal node is the side facing away from
    # the other chosen node, so the two subtrees are always disjoint.
    rand = rng.random
    n_internal = n - 2
    for _ in range(MAX_REDRAWS):
        a = n + int(rand() * n_internal)
        b = n + int(rand() * n_internal)
        adj_a, adj_b = adj[a], adj[b]
        if a == b or b in adj_a or not set(adj_a).isdisjoint(adj_b):
            # adjacent, or hanging off a common node: swap is the identity
            continue
        path = _path(adj, a, b)
        a_in, b_in = path[1], path[-2]
        adj_a[adj_a.index(a_in)] = b_in
        adj_b[adj_b.index(b_in)] = a_in
        adj[a_in][adj[a_in].index(a)] = b
        adj[b_in][adj[b_in].index(b)] = a
        return True
    return False


def _subtree_transfer(adj: list[list[int]], n: int, rng: random.Random) -> bool:
    # Detach the subtree hanging from x via attachment node p, splice p out,
    # then use p to subdivide another edge and re-hang the subtree there.
    rand = rng.random
    n_nodes = len(adj)
    for _ in range(MAX_REDRAWS):
        x = int(rand() * n_nodes)
        nbrs = adj[x]
        p = nbrs[int(rand() * len(nbrs))]
        if p < n:
            continue
        side = {x}
        stack = [x]
        while stack:
            for w in adj[stack.pop()]:
                if w != p and w not in side:
                    side.add(w)
                    stack.append(w)
        # edges not touching p: re-inserting on p's two other neighbors'
        # joined edge would give back the same tree, and it is not listed
        side.add(p)
        candidates = [(u, w) for u in range(n_nodes) if u not in side for w in adj[u] if u < w and w not in side]
        if not candidates:
            continue
        u, w = candidates[int(rand() * len(candidates))]
        p1, p2 = [y for y in adj[p] if y != x]
        adj[p1][adj[p1].index(p)] = p2
        adj[p2][adj[p2].index(p)] = p1
        adj[u][adj[u].index(w)] = p
        adj[w][adj[w].index(u)] = p
        adj[p] = [x, u, w]
        return True
    return False


_APPLY = {
    MutationKind.LEAF_SWAP: _leaf_swap,
    MutationKind.SUBTREE_SWAP: _subtree_swap,
    MutationKind.SUBTREE_TRANSFER: _subtree_transfer,
}
_MUTATORS = tuple(_APPLY[kind] for kind in _KINDS)


def apply_simple_mutation(tree: Tree, kind: MutationKind, rng: random.Random) -> Tree:
    adj = tree.mutable_adjacency()
    _APPLY[MutationKind(kind)](adj, tree.n, rng)
    return Tree._trusted(tree.labels, adj)


def k_mutation(tree: Tree, k: int, rng: random.Random) -> Tree:
    """Apply ``k`` simple mutations, each of a uniformly chosen kind."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    adj = tree.mutable_adjacency()
    n = tree.n
    rand = rng.random
    for _ in range(k):
        _MUTATORS[int(rand() * 3)](adj, n, rng)
    return Tree._trusted(tree.labels, adj)


# -------------------------------------------------------------- config --


@dataclass(frozen=True)
class Simple:
    """Stop after ``patience`` examined trees without a score increase."""

    patience: int = DEFAULT_PATIENCE

    def __post_init__(self):
        if self.patience < 1:
            raise InputError(f"patience must be >= 1, got {self.patience}")


@dataclass(frozen=True)
class Agreement:
    """Stop when ``r`` independent runs hold the same tree.

    ``r=None`` picks the count from the number of objects (:func:`r_for_n`).
    ``r=1`` runs a single climb with the default patience (testing only).
    """

    r: int | None = None

    def __post_init__(self):
        if self.r is not None and not 1 <= self.r <= 6:
            raise InputError(f"agreement run count must be in [2, 6], got {self.r}")


def parse_termination(text: str) -> Simple | Agreement:
    """Parse ``simple[:PATIENCE]`` or ``agreement[:R]``."""
    name, _, arg = text.partition(":")
    try:
        if name == "simple":
            return Simple(int(arg)) if arg else Simple()
        if name == "agreement":
            return Agreement(None if arg in ("", "auto") else int(arg))
    except ValueError as exc:
        raise InputError(f"bad termination {text!r}: {exc}") from None
    raise InputError(f"unknown termination {text!r}; use simple[:PATIENCE] or agreement[:R]")


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    termination: Simple | Agreement = field(default_factory=Agreement)
    k_max: int | None = None
    max_trees: int | None = None

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.k_max is not None and self.k_max < 1:
            raise InputError(f"k_max must be >= 1, got {self.k_max}")
        if self.max_trees is not None and self.max_trees < 1:
            raise InputError(f"max_trees must be >= 1, got {self.max_trees}")


def r_for_n(n: int) -> int:
    """Number of runs that must agree, by object count."""
    if n < 4:
        raise InputError(f"need at least 4 objects, got {n}")
    if n <= 5:
        return 6
    if n <= 9:
        return 5
    if n <= 15:
        return 4
    if n <= 17:
        return 3
    return 2


# ----------------------------------------------------------- statistics --


@dataclass
class RunStats:
    trees_examined: int = 0
    accepted_k_histogram: Counter = field(default_factory=Counter)
    rejected_k_histogram: Counter = field(default_factory=Counter)
    score_trajectory: list[tuple[int, float]] = field(default_factory=list)

    def trajectory_lines(self) -> list[str]:
        return [f"{t} {s:.6f}" for t, s in self.score_trajectory]

    def histogram_lines(self) -> list[str]:
        ks = sorted(set(self.accepted_k_histogram) | set(self.rejected_k_histogram))
        return [f"{k} {self.accepted_k_histogram[k]} {self.rejected_k_histogram[k]}" for k in ks]


# ------------------------------------------------------------- climbing --


class _Run:
    """One hill-climbing run: the current best tree plus its statistics."""

    def __init__(self, scorer: Scorer, labels: tuple, k_max: int, rng: random.Random, check=None):
        self.scorer = scorer
        self.k_max = k_max
        self.rng = rng
        self.check = check
        self.tree = random_tree(len(labels), rng, labels)
        self.codes = scorer.codes(self.tree)
        self.excess = scorer.excess_of_codes(self.codes)
        self.last_improvement = 0
        self.stats = RunStats()
        self.stats.score_trajectory.append((0, self.score))

    @property
    def score(self) -> float:
        return self.scorer.score_of_excess(self.excess)

    @property
    def perfect(self) -> bool:
        return self.excess == 0.0

    def step(self) -> bool:
        """Examine one k-mutated candidate. Returns True if the score rose."""
        k = sample_k(self.rng, self.k_max)
        candidate = k_mutation(self.tree, k, self.rng)
        if self.check is not None:
            self.check(candidate)
        codes = self.scorer.codes(candidate)
        excess = self.scorer.excess_of_codes(codes)
        stats = self.stats
        stats.trees_examined += 1
        if excess <= self.excess:
            stats.accepted_k_histogram[k] += 1
            improved = excess < self.excess
            self.tree, self.codes, self.excess = candidate, codes, excess
            if improved:
                self.last_improvement = stats.trees_examined
                stats.score_trajectory.append((stats.trees_examined, self.score))
            return improved
        stats.rejected_k_histogram[k] += 1
        return False

    def result(self) -> ScoredTree:
        return self.scorer.scored(self.tree, self.codes)


def _prepare(table: QuartetCostTable, config: SearchConfig) -> tuple[Scorer, int]:
    table.require_nondegenerate()
    return Scorer(table), config.k_max or default_k_max(table.n)


def hill_climb(
    table: QuartetCostTable, config: SearchConfig, rng: random.Random, check=None
) -> tuple[ScoredTree, RunStats]:
    """Single run until S = 1, the patience window runs out, or ``max_trees``.

    The patience comes from a :class:`Simple` termination; under any other
    termination the default patience applies. ``check``, if given, is called
    on every candidate tree before it is scored (used by validity fuzzing).
    """
    scorer, k_max = _prepare(table, config)
    term = config.termination
    patience = term.patience if isinstance(term, Simple) else DEFAULT_PATIENCE
    run = _Run(scorer, table.labels, k_max, rng, check)
    while not run.perfect:
        examined = run.stats.trees_examined
        if examined - run.last_improvement >= patience:
            break
        if config.max_trees is not None and examined >= config.max_trees:
            break
        run.step()
    return run.result(), run.stats


def _agreed(runs: list[_Run]) -> bool:
    first = runs[0]
    return all(r.excess == first.excess for r in runs[1:]) and all(
        np.array_equal(r.codes, first.codes) for r in runs[1:]
    )


def search_with_agreement(table: QuartetCostTable, config: SearchConfig) -> tuple[ScoredTree, list[RunStats]]:
    """Dovetail ``r`` independently seeded runs until they hold the same tree.

    Runs take turns one proposal at a time, so the outcome depends only on
    the seed. Whenever some run's score rises, the runs are compared:
    agreement requires equal scores and identical embedded quartet
    topologies. A run reaching S = 1 is optimal and ends the search at once.
    Raises :class:`AgreementTimeout` if every run has examined ``max_trees``
    trees without agreement.
    """
    scorer, k_max = _prepare(table, config)
    term = config.termination
    r = term.r if isinstance(term, Agreement) and term.r is not None else r_for_n(table.n)
    if r == 1:
        best, stats = hill_climb(table, config, make_rng(config.seed, 0))
        return best, [stats]
    runs = [_Run(scorer, table.labels, k_max, make_rng(config.seed, i)) for i in range(r)]
    rose = True
    while True:
        for run in runs:
            if run.perfect:
                log.debug("run reached S=1 after %d trees", run.stats.trees_examined)
                return run.result(), [x.stats for x in runs]
        if rose and _agreed(runs):
            return runs[0].result(), [x.stats for x in runs]
        if config.max_trees is not None and runs[0].stats.trees_examined >= config.max_trees:
            raise AgreementTimeout(
                f"{r} runs did not agree within {config.max_trees} trees each",
                [x.result() for x in runs],
            )
        rose = False
        for run in runs:
            rose |= run.step()


def search(table: QuartetCostTable, config: SearchConfig) -> tuple[ScoredTree, list[RunStats]]:
    """Dispatch on the configured termination."""
    if isinstance(config.termination, Simple):
        best, stats = hill_climb(table, config, make_rng(config.seed, 0))
        return best, [stats]
    return search_with_agreement(table, config)
