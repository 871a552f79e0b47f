"""Brute-force reference values and hypothesis helpers shared by the tests."""
import math
from itertools import combinations

import numpy as np
import hypothesis.strategies as st
from hypothesis.extra.numpy import arrays


def brute_force_box(weights, d1, d2, lam, tol=1e-9):
    """min over retained subsets T of max(max discrepancy on T, removed mass / lam)."""
    w = np.asarray(weights, dtype=float)
    gap = np.abs(np.asarray(d1, dtype=float) - np.asarray(d2, dtype=float))
    n = len(w)
    total = w.sum()
    best = math.inf
    for mask in range(2 ** n):
        members = [i for i in range(n) if (mask >> i) & 1]
        largest = max((gap[i, j] for i, j in combinations(members, 2)), default=0.0)
        removed = total - w[members].sum()
        if lam == 0.0:
            if removed > tol:
                continue
            candidate = largest
        else:
            candidate = max(largest, removed / lam)
        best = min(best, candidate)
    return best


def brute_force_cover(weights, adjacency):
    w = np.asarray(weights, dtype=float)
    n = len(w)
    edges = [(i, j) for i, j in combinations(range(n), 2) if adjacency[i, j]]
    best = math.inf
    for mask in range(2 ** n):
        if all((mask >> i) & 1 or (mask >> j) & 1 for i, j in edges):
            best = min(best, sum(w[i] for i in range(n) if (mask >> i) & 1))
    return best


def brute_force_partial_diameter(support, masses, kappa, tol=1e-9):
    total = float(np.sum(masses))
    if kappa >= total - tol:
        return 0.0
    best = math.inf
    n = len(support)
    for mask in range(1, 2 ** n):
        members = [i for i in range(n) if (mask >> i) & 1]
        if sum(masses[i] for i in members) >= total - kappa - tol:
            values = [support[i] for i in members]
            best = min(best, max(values) - min(values))
    return best


def binomial_tail(n, center, eps, tol=1e-9):
    """Exact mass of {k : |k/n - center| >= eps} under Binomial(n, 1/2)."""
    hits = sum(math.comb(n, k) for k in range(n + 1) if abs(k / n - center) >= eps - tol)
    return hits / 2 ** n


def euclidean_distances(points):
    points = np.asarray(points, dtype=float)
    return np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)


def simplex_distances(n, scale=1.0):
    dist = np.full((n, n), float(scale))
    np.fill_diagonal(dist, 0.0)
    return dist


def finite_floats(min_value, max_value):
    return st.floats(min_value=min_value, max_value=max_value, allow_nan=False, allow_infinity=False)


def draw_weights(data, n, min_value=0.05, max_value=1.0):
    return data.draw(arrays(np.float64, n, elements=finite_floats(min_value, max_value)))


def draw_points(data, n, dim=2, scale=5.0):
    return data.draw(arrays(np.float64, (n, dim), elements=finite_floats(-scale, scale)))


def draw_semimetric(data, n, max_value=3.0):
    """Symmetric, zero-diagonal, nonnegative matrix (no triangle inequality)."""
    raw = data.draw(arrays(np.float64, (n, n), elements=finite_floats(0.0, max_value)))
    upper = np.triu(raw, 1)
    return upper + upper.T
