"""Hierarchical clustering by quartet-tree search."""

from .costs import (
    DistanceMatrix,
    WeightedQuartetList,
    costs_from_matrix,
    costs_from_weights,
    counterexample_table,
    random_cost_table,
)
from .errors import (
    AgreementTimeout,
    DegenerateTableError,
    EnumerationCapError,
    InputError,
    QuartetTreeError,
)
from .oracle import brute_force_optimum, count_trees, enumerate_trees
from .quartets import (
    Quartet,
    QuartetCostTable,
    ScoredTree,
    Topology,
    consistent_topology,
    embedded_quartet_set,
    quartet_key,
    score,
    topo_distances,
    tree_cost,
)
from .search import (
    Agreement,
    MutationKind,
    RunStats,
    SearchConfig,
    Simple,
    apply_simple_mutation,
    hill_climb,
    k_mutation,
    r_for_n,
    random_tree,
    sample_k,
    search,
    search_with_agreement,
)
from .tree import Tree

__version__ = "0.1.0"

__all__ = [
    "Agreement",
    "AgreementTimeout",
    "apply_simple_mutation",
    "brute_force_optimum",
    "consistent_topology",
    "costs_from_matrix",
    "costs_from_weights",
    "count_trees",
    "counterexample_table",
    "DegenerateTableError",
    "DistanceMatrix",
    "embedded_quartet_set",
    "enumerate_trees",
    "EnumerationCapError",
    "hill_climb",
    "InputError",
    "k_mutation",
    "MutationKind",
    "Quartet",
    "quartet_key",
    "QuartetCostTable",
    "QuartetTreeError",
    "r_for_n",
    "random_cost_table",
    "random_tree",
    "RunStats",
    "sample_k",
    "score",
    "ScoredTree",
    "search",
    "search_with_agreement",
    "SearchConfig",
    "Simple",
    "topo_distances",
    "Topology",
    "Tree",
    "tree_cost",
    "WeightedQuartetList",
]
