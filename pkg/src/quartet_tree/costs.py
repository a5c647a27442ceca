"""Building quartet cost tables from distances or from weighted topologies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .quartets import Quartet, QuartetCostTable, Topology, _pair_index, quartet_array
from .tree import default_labels

SYMMETRY_TOLERANCE = 1e-9


class DistanceMatrix:
    """Labeled symmetric matrix of pairwise distances.

    Off-diagonal asymmetry up to ``SYMMETRY_TOLERANCE`` is averaged away;
    anything larger is rejected. Diagonal entries are kept as given but never
    enter a quartet cost.
    """

    def __init__(self, labels: Sequence[str], entries):
        labels = tuple(str(lab) for lab in labels)
        d = np.array(entries, dtype=np.float64)
        n = len(labels)
        if d.shape != (n, n):
            raise InputError(f"matrix shape {d.shape} does not match {n} labels")
        if len(set(labels)) != n or any(not lab or any(ch.isspace() for ch in lab) for lab in labels):
            raise InputError("labels must be unique, non-empty and contain no whitespace")
        off = ~np.eye(n, dtype=bool)
        if not np.all(np.isfinite(d[off])):
            raise InputError("off-diagonal distances must be finite")
        if np.any(d[off] < 0):
            raise InputError("off-diagonal distances must be non-negative")
        asym = np.abs(d - d.T)
        if n and np.max(asym[off], initial=0.0) > SYMMETRY_TOLERANCE:
            i, j = np.unravel_index(np.argmax(np.where(off, asym, -1.0)), d.shape)
            raise InputError(
                f"matrix is not symmetric: d[{labels[i]},{labels[j]}]={d[i, j]!r} "
                f"but d[{labels[j]},{labels[i]}]={d[j, i]!r}"
            )
        diag = d.diagonal().copy()
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, diag)
        d.setflags(write=False)
        self.labels = labels
        self.entries = d

    @property
    def n(self) -> int:
        return len(self.labels)

    def permuted(self, order: Sequence[int]) -> "DistanceMatrix":
        """Rows/columns reordered so that new index ``i`` is old ``order[i]``."""
        order = list(order)
        return DistanceMatrix([self.labels[i] for i in order], self.entries[np.ix_(order, order)])

    def __repr__(self) -> str:
        return f"DistanceMatrix(n={self.n})"


def costs_from_matrix(matrix: DistanceMatrix) -> QuartetCostTable:
    """Cost of ``ab|cd`` is ``d(a,b) + d(c,d)``."""
    n = matrix.n
    if n < 4:
        raise InputError(f"need at least 4 objects, got {n}")
    flat = matrix.entries.ravel()
    uv, wx, uw, vx, ux, vw = _pair_index(n)
    costs = np.column_stack((flat[uv] + flat[wx], flat[uw] + flat[vx], flat[ux] + flat[vw]))
    return QuartetCostTable(costs, matrix.labels)


@dataclass
class WeightedQuartetList:
    """Weighted quartet topologies over a universe of ``n`` objects."""

    n: int
    entries: list[tuple[Topology, float]]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        seen = set()
        for topo, weight in self.entries:
            if topo in seen:
                raise InputError(f"duplicate quartet topology {topo}")
            if not np.isfinite(weight):
                raise InputError(f"non-finite weight for {topo}")
            if topo.quartet.x >= self.n:
                raise InputError(f"topology {topo} out of range for n={self.n}")
            seen.add(topo)

    @classmethod
    def unweighted(cls, n: int, topologies, labels=None) -> "WeightedQuartetList":
        return cls(n, [(t, 1.0) for t in topologies], labels)


def costs_from_weights(weights: WeightedQuartetList, mode: str = "maximize-consistency") -> QuartetCostTable:
    """Turn "maximize summed weight of embedded listed topologies" into a cost
    table whose minimum-cost trees are exactly the maximizers.

    Weights are reflected about the largest listed weight ``w_max``: a listed
    topology costs ``w_max - w`` and an unlisted one ``w_max`` (unlisted
    topologies count as weight 0). With unit weights this gives cost 0 for
    listed and 1 for unlisted topologies, so ``C_T = C(n,4) - |P & Q_T|``.
    ``w_max`` falls back to 1 when no positive weight is listed.
    """
    if mode != "maximize-consistency":
        raise InputError(f"unknown weighting mode {mode!r}")
    n = weights.n
    if n < 4:
        raise InputError(f"need at least 4 objects, got {n}")
    w_max = max((w for _, w in weights.entries), default=0.0)
    if w_max <= 0:
        w_max = 1.0
    costs = np.full((quartet_array(n).shape[0], 3), w_max)
    for topo, weight in weights.entries:
        costs[topo.quartet.rank(n), topo.pairing] = w_max - weight
    return QuartetCostTable(costs, weights.labels or default_labels(n))


def counterexample_table(epsilon: float) -> QuartetCostTable:
    """Five-object table on ``u, v, w, x, y`` whose best tree has ``S < 1``.

    ``uv|wx`` costs ``1 - epsilon``; ``uw|vx``, ``ux|vw``, ``uv|xy``,
    ``uv|wy``, ``uy|wx`` and ``vy|wx`` cost 0; everything else costs 1. The
    unique optimum is ``(y, ((u, v), (w, x)))`` with cost ``1 - epsilon``,
    ``m = 0`` and ``M = 5 - epsilon``.
    """
    if not 0.0 < epsilon < 1.0:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    u, v, w, x, y = range(5)
    costs = np.ones((5, 3))
    assigned = {
        Topology.from_pairs(u, v, w, x): 1.0 - epsilon,
        Topology.from_pairs(u, w, x, v): 0.0,
        Topology.from_pairs(u, x, v, w): 0.0,
        Topology.from_pairs(x, y, u, v): 0.0,
        Topology.from_pairs(w, y, u, v): 0.0,
        Topology.from_pairs(u, y, w, x): 0.0,
        Topology.from_pairs(v, y, w, x): 0.0,
    }
    for topo, c in assigned.items():
        costs[topo.quartet.rank(5), topo.pairing] = c
    return QuartetCostTable(costs, ("u", "v", "w", "x", "y"))


def random_cost_table(n: int, rng: np.random.Generator, labels=None, kind: str = "uniform") -> QuartetCostTable:
    """Random table for experiments.

    ``kind="uniform"``: independent uniform [0, 1) cost per topology. A
    uniformly random tree then has expected score 1/2.

    ``kind="binary"``: one uniformly chosen topology per quartet costs 0, the
    other two cost 1, so the score is the fraction of quartets on which the
    tree picks the cheap topology (expected 1/3 for a random tree).
    """
    q = quartet_array(n).shape[0]
    if kind == "uniform":
        return QuartetCostTable(rng.random((q, 3)), labels)
    if kind == "binary":
        costs = np.ones((q, 3))
        costs[np.arange(q), rng.integers(0, 3, size=q)] = 0.0
        return QuartetCostTable(costs, labels)
    raise InputError(f"unknown random table kind {kind!r}")


__all__ = [
    "DistanceMatrix",
    "Quartet",
    "WeightedQuartetList",
    "costs_from_matrix",
    "costs_from_weights",
    "random_cost_table",
    "counterexample_table",
]
