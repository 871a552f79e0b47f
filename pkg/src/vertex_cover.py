"""Minimum-weight vertex cover on small conflict graphs.

A retained atom set T is admissible for a discrepancy level exactly when its
complement covers every pair whose discrepancy exceeds that level, so the
cheapest removal is a minimum-weight vertex cover. Three solvers live here:

* ``exact_min_cover``: branch and bound on bitmasks (a few dozen vertices at most)
* ``greedy_cover``: degree/weight greedy plus redundancy pruning, any size
* ``lp_cover_bound``: LP relaxation value, a lower bound on the optimum
"""
import logging
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from src.errors import SizeLimitError
from src.settings import EXACT_MAX_ATOMS

logger = logging.getLogger(__name__)


def conflict_adjacency(discrepancy: np.ndarray, level: float) -> np.ndarray:
    """Boolean adjacency of pairs whose discrepancy is strictly above ``level``."""
    adjacency = discrepancy > level
    np.fill_diagonal(adjacency, False)
    return adjacency


def _packing_bound(weights: list[float], neighbours: list[int], active: int) -> float:
    """Edge-packing (local ratio) lower bound on the cover of the active subgraph."""
    residual = list(weights)
    bound = 0.0
    remaining = active
    while remaining:
        u = (remaining & -remaining).bit_length() - 1
        remaining &= remaining - 1
        nbrs = neighbours[u] & active & ~((1 << (u + 1)) - 1)
        while nbrs and residual[u] > 0.0:
            v = (nbrs & -nbrs).bit_length() - 1
            nbrs &= nbrs - 1
            delta = min(residual[u], residual[v])
            if delta > 0.0:
                bound += delta
                residual[u] -= delta
                residual[v] -= delta
    return bound


class _BranchAndBound:
    """Depth-first branch and bound; ties on degree go to the lowest index."""

    def __init__(self, weights: np.ndarray, adjacency: np.ndarray):
        self.n = len(weights)
        self.weights = [float(w) for w in weights]
        self.neighbours = []
        for i in range(self.n):
            mask = 0
            for j in np.flatnonzero(adjacency[i]):
                mask |= 1 << int(j)
            self.neighbours.append(mask)
        self.best_cost = float("inf")
        self.best_cover = 0
        self.nodes = 0

    def _mask_cost(self, mask: int) -> float:
        cost = 0.0
        while mask:
            v = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            cost += self.weights[v]
        return cost

    def seed(self, cover_mask: int) -> None:
        self.best_cover = cover_mask
        self.best_cost = self._mask_cost(cover_mask)

    def solve(self) -> tuple[float, int]:
        active = 0
        free = 0
        for v in range(self.n):
            if self.neighbours[v]:
                if self.weights[v] == 0.0:
                    free |= 1 << v
                else:
                    active |= 1 << v
        self._branch(active & ~free, free, 0.0)
        return self.best_cost, self.best_cover

    def _branch(self, active: int, cover: int, cost: float) -> None:
        self.nodes += 1
        pick, pick_degree = -1, 0
        remaining = active
        while remaining:
            v = (remaining & -remaining).bit_length() - 1
            remaining &= remaining - 1
            degree = (self.neighbours[v] & active).bit_count()
            if degree > pick_degree:
                pick, pick_degree = v, degree
        if pick_degree == 0:
            if cost < self.best_cost:
                self.best_cost, self.best_cover = cost, cover
            return
        if cost + _packing_bound(self.weights, self.neighbours, active) >= self.best_cost:
            return

        bit = 1 << pick
        self._branch(active & ~bit, cover | bit, cost + self.weights[pick])

        nbrs = self.neighbours[pick] & active
        self._branch(active & ~nbrs & ~bit, cover | nbrs, cost + self._mask_cost(nbrs))


def exact_min_cover(
    weights: np.ndarray,
    adjacency: np.ndarray,
    max_vertices: int = EXACT_MAX_ATOMS,
) -> tuple[float, np.ndarray]:
    """Return ``(cost, cover_mask)`` of a minimum-weight vertex cover.

    Zero-weight endpoints enter the cover for free before branching.
    """
    n = len(weights)
    if n > max_vertices:
        raise SizeLimitError(
            f"exact vertex cover is limited to {max_vertices} vertices, got {n}; "
            "use heuristic mode"
        )
    solver = _BranchAndBound(weights, adjacency)
    greedy_cost, greedy_mask = greedy_cover(weights, adjacency)
    seed_mask = 0
    for v in np.flatnonzero(greedy_mask):
        seed_mask |= 1 << int(v)
    solver.seed(seed_mask)
    cost, mask = solver.solve()
    logger.debug("branch and bound: %d vertices, %d nodes, cost %.6g", n, solver.nodes, cost)
    cover = np.array([(mask >> v) & 1 for v in range(n)], dtype=bool)
    return float(np.sum(np.asarray(weights)[cover])), cover


def greedy_cover(weights: np.ndarray, adjacency: np.ndarray) -> tuple[float, np.ndarray]:
    """Greedy cover: repeatedly delete the vertex with most uncovered edges per unit weight."""
    weights = np.asarray(weights, dtype=float)
    n = len(weights)
    adjacency = np.asarray(adjacency, dtype=bool)
    degree = adjacency.sum(axis=1).astype(float)
    alive = np.ones(n, dtype=bool)
    cover = np.zeros(n, dtype=bool)

    inverse_weight = np.full(n, np.inf)
    positive = weights > 0.0
    with np.errstate(over="ignore"):
        inverse_weight[positive] = 1.0 / weights[positive]

    while degree.max(initial=0.0) > 0.0:
        score = np.full(n, -1.0)
        live = degree > 0.0
        score[live] = degree[live] * inverse_weight[live]
        v = int(np.argmax(score))
        cover[v] = True
        alive[v] = False
        degree[adjacency[v] & alive] -= 1.0
        degree[v] = 0.0

    # Drop cover vertices whose neighbours are all covered, heaviest first
    for v in sorted(np.flatnonzero(cover), key=lambda i: (-weights[i], i)):
        if not np.any(adjacency[v] & ~cover):
            cover[v] = False

    return float(weights[cover].sum()), cover


def lp_cover_bound(weights: np.ndarray, adjacency: np.ndarray) -> Optional[float]:
    """Optimal value of the LP relaxation, or None when the solver fails."""
    rows, cols = np.nonzero(np.triu(adjacency, 1))
    n_edges = len(rows)
    if n_edges == 0:
        return 0.0
    n = len(weights)
    data = -np.ones(2 * n_edges)
    edge_ids = np.repeat(np.arange(n_edges), 2)
    vertex_ids = np.column_stack([rows, cols]).ravel()
    constraints = sparse.csr_matrix((data, (edge_ids, vertex_ids)), shape=(n_edges, n))
    result = linprog(
        c=np.asarray(weights, dtype=float),
        A_ub=constraints,
        b_ub=-np.ones(n_edges),
        bounds=(0.0, 1.0),
        method="highs",
    )
    if not result.success:
        logger.warning("LP cover relaxation failed: %s", result.message)
        return None
    return float(result.fun)
