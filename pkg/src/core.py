"""Finite mm-spaces and the function-space machinery on them.

Everything here works on weighted atoms: a FiniteMMSpace is a weight vector
plus a symmetric distance matrix. The operations cover me_lambda, push-forward
measures, partial and observable diameters, the 1-Lipschitz regularization
used to compare Lipschitz classes, and the box distance between two
semimetrics on one weighted atom set.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from src.errors import DimensionError, DomainError, PreconditionError, SizeLimitError, UnsupportedError
from src.reports import BoundReport
from src.settings import DEFAULT_TOL, EXACT_MAX_ATOMS, LP_EDGE_LIMIT
from src.vertex_cover import conflict_adjacency, exact_min_cover, greedy_cover, lp_cover_bound

logger = logging.getLogger(__name__)

SPACE_FORMAT_VERSION = 1

# Spaces up to this size get their triangle inequality verified when flagged metric
_TRIANGLE_CHECK_MAX_ATOMS = 512

BoxMode = Literal["exact", "heuristic"]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_semimetric(matrix: Any, n: Optional[int] = None, name: str = "dist", tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a symmetric, nonnegative, zero-diagonal matrix and return a clean copy."""
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {d.shape}")
    if n is not None and d.shape[0] != n:
        raise DimensionError(f"{name} has {d.shape[0]} rows but the space has {n} atoms")
    if not np.all(np.isfinite(d)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(d < -tol):
        raise DomainError(f"{name} has negative entries")
    if np.any(np.abs(np.diag(d)) > tol):
        raise DomainError(f"{name} must vanish on the diagonal")
    if np.any(np.abs(d - d.T) > tol):
        raise DomainError(f"{name} is not symmetric")
    upper = np.triu(np.clip(d, 0.0, None), 1)
    return upper + upper.T


def satisfies_triangle(dist: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Check d(x, z) <= d(x, y) + d(y, z) for every triple."""
    for j in range(dist.shape[0]):
        if np.any(dist > dist[:, [j]] + dist[[j], :] + tol):
            return False
    return True


def _weights_of(space: Any) -> np.ndarray:
    if isinstance(space, (FiniteMMSpace, SemiMetricPair)):
        return space.weights
    return _as_weights(space)


def _as_weights(weights: Any) -> np.ndarray:
    w = np.array(weights, dtype=float).ravel()
    if w.size == 0:
        raise DimensionError("a space needs at least one atom")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise DomainError("weights must be finite and nonnegative")
    if w.sum() <= 0.0:
        raise DomainError("total mass must be positive")
    return w


def _as_function(values: Any, n: int, name: str = "f") -> np.ndarray:
    f = np.asarray(values, dtype=float).ravel()
    if f.shape[0] != n:
        raise DimensionError(f"{name} has {f.shape[0]} values but the space has {n} atoms")
    if not np.all(np.isfinite(f)):
        raise DomainError(f"{name} has non-finite values")
    return f


class SpaceDocument(BaseModel):
    """Versioned JSON form of a FiniteMMSpace (full symmetric matrix kept)."""

    version: Literal[1] = SPACE_FORMAT_VERSION
    weights: list[float]
    dist: list[list[float]]
    label: Optional[str] = None
    is_metric: bool = False
    provenance: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class FiniteMMSpace:
    """Weighted atoms with a semimetric: the finite stand-in for (X, d_X, mu_X)."""

    weights: np.ndarray
    dist: np.ndarray
    label: Optional[str] = None
    is_metric: bool = False
    provenance: Optional[dict[str, Any]] = field(default=None, compare=False)

    def __post_init__(self):
        w = _as_weights(self.weights)
        d = _as_semimetric(self.dist, len(w))
        if self.is_metric and len(w) <= _TRIANGLE_CHECK_MAX_ATOMS and not satisfies_triangle(d):
            raise DomainError("space is flagged metric but violates the triangle inequality")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "dist", _readonly(d))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMMSpace):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and np.array_equal(self.dist, other.dist)
            and self.label == other.label
            and self.is_metric == other.is_metric
        )

    __hash__ = None

    @classmethod
    def uniform(cls, dist: Any, total_mass: float = 1.0, **kwargs) -> "FiniteMMSpace":
        """Equal-mass atoms over ``dist``."""
        n = np.asarray(dist).shape[0]
        return cls(weights=np.full(n, total_mass / n), dist=dist, **kwargs)

    @classmethod
    def point(cls, mass: float = 1.0, label: Optional[str] = "point") -> "FiniteMMSpace":
        return cls(weights=[mass], dist=[[0.0]], label=label, is_metric=True)

    @property
    def n_atoms(self) -> int:
        return int(self.weights.shape[0])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def is_probability(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def is_uniform(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.ptp(self.weights) <= tol)

    def scaled(self, factor: float) -> "FiniteMMSpace":
        """Same distances, every weight multiplied by ``factor``."""
        if factor <= 0.0:
            raise DomainError(f"mass scale factor must be positive, got {factor}")
        return FiniteMMSpace(
            weights=self.weights * factor,
            dist=self.dist,
            label=self.label,
            is_metric=self.is_metric,
            provenance=self.provenance,
        )

    def to_document(self) -> SpaceDocument:
        return SpaceDocument(
            weights=self.weights.tolist(),
            dist=self.dist.tolist(),
            label=self.label,
            is_metric=self.is_metric,
            provenance=self.provenance,
        )

    def to_json(self) -> str:
        return self.to_document().model_dump_json()

    @classmethod
    def from_document(cls, doc: SpaceDocument) -> "FiniteMMSpace":
        return cls(
            weights=doc.weights,
            dist=doc.dist,
            label=doc.label,
            is_metric=doc.is_metric,
            provenance=doc.provenance,
        )

    @classmethod
    def from_json(cls, text: str) -> "FiniteMMSpace":
        return cls.from_document(SpaceDocument.model_validate_json(text))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FiniteMMSpace":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True, eq=False)
class SemiMetricPair:
    """Two semimetrics d1, d2 over one weighted atom set."""

    weights: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        w = _as_weights(self.weights)
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "d1", _readonly(_as_semimetric(self.d1, len(w), "d1")))
        object.__setattr__(self, "d2", _readonly(_as_semimetric(self.d2, len(w), "d2")))

    @classmethod
    def of_space(cls, space: FiniteMMSpace, other_dist: Any) -> "SemiMetricPair":
        """Pair the space's own distance with a second semimetric on its atoms."""
        return cls(weights=space.weights, d1=space.dist, d2=other_dist)

    @property
    def n_atoms(self) -> int:
        return int(self.weights.shape[0])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def discrepancy(self) -> np.ndarray:
        return np.abs(self.d1 - self.d2)

    def swapped(self) -> "SemiMetricPair":
        return SemiMetricPair(weights=self.weights, d1=self.d2, d2=self.d1)


@dataclass(frozen=True, eq=False)
class RealMeasure1D:
    """Finite atomic measure on the real line."""

    support: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        s = np.array(self.support, dtype=float).ravel()
        m = np.array(self.masses, dtype=float).ravel()
        if s.shape != m.shape or s.size == 0:
            raise DimensionError("support and masses must be nonempty and aligned")
        if np.any(np.diff(s) <= 0.0):
            raise DomainError("support must be strictly increasing")
        if np.any(m <= 0.0):
            raise DomainError("masses must be positive")
        object.__setattr__(self, "support", _readonly(s))
        object.__setattr__(self, "masses", _readonly(m))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


# ---------------------------------------------------------------------------
# me_lambda, push-forwards and partial diameters
# ---------------------------------------------------------------------------

def _me_from_deviation(weights: np.ndarray, deviation: np.ndarray, lam: float) -> float:
    live = weights > 0.0
    h, w = deviation[live], weights[live]
    if h.size == 0:
        return 0.0
    if lam == 0.0:
        return float(h.max())

    order = np.argsort(h, kind="stable")
    h_sorted, w_sorted = h[order], w[order]
    levels = np.unique(h_sorted)
    tail_from = np.cumsum(w_sorted[::-1])[::-1]
    tails = tail_from[np.searchsorted(h_sorted, levels, side="left")]

    # On (previous level, level] the tail mass {h >= eps} is constant
    left_ends = np.concatenate(([0.0], levels[:-1]))
    candidates = np.maximum(left_ends, tails / lam)
    feasible = candidates <= levels
    if feasible.any():
        return float(candidates[int(np.argmax(feasible))])
    return float(levels[-1])


def me_lambda(space: Any, f: Any, g: Any, lam: float) -> float:
    """Infimum of eps >= 0 with mu(|f - g| >= eps) <= lam * eps.

    ``space`` may be a FiniteMMSpace, a SemiMetricPair or a bare weight vector.
    With ``lam == 0`` this is the essential supremum of |f - g|.
    """
    weights = _weights_of(space)
    if lam < 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam}")
    f = _as_function(f, len(weights), "f")
    g = _as_function(g, len(weights), "g")
    return _me_from_deviation(weights, np.abs(f - g), float(lam))


def pushforward(space: Any, f: Any) -> RealMeasure1D:
    """Image measure f_*(mu); atoms with equal values merge."""
    weights = _weights_of(space)
    f = _as_function(f, len(weights))
    live = weights > 0.0
    support, inverse = np.unique(f[live], return_inverse=True)
    masses = np.bincount(inverse, weights=weights[live], minlength=len(support))
    return RealMeasure1D(support=support, masses=masses)


def partial_diameter(nu: RealMeasure1D, kappa: float, tol: float = DEFAULT_TOL) -> float:
    """Smallest diameter of a set keeping at least ``total - kappa`` of the mass.

    Optimal sets can be taken to be runs of consecutive support points, so a
    sliding window over the sorted support is exact.
    """
    if kappa < 0.0:
        raise DomainError(f"kappa must be nonnegative, got {kappa}")
    total = nu.total_mass
    if kappa >= total - tol:
        return 0.0
    target = total - kappa - tol
    cumulative = np.concatenate(([0.0], np.cumsum(nu.masses)))
    ends = np.searchsorted(cumulative, cumulative[:-1] + target, side="left")
    valid = ends <= len(nu.support)
    starts = np.flatnonzero(valid)
    widths = nu.support[ends[valid] - 1] - nu.support[starts]
    return float(max(widths.min(), 0.0))


def weighted_median(nu: RealMeasure1D, tol: float = DEFAULT_TOL) -> float:
    """Lower median: the first support point whose cumulative mass reaches half."""
    cumulative = np.cumsum(nu.masses)
    index = int(np.searchsorted(cumulative, nu.total_mass / 2.0 - tol, side="left"))
    return float(nu.support[min(index, len(nu.support) - 1)])


def levy_tail_mass(
    space: Any,
    f: Any,
    eps: float,
    center: Optional[float] = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Mass of {x : |f(x) - center| >= eps}; the center defaults to the median of f_*(mu)."""
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    weights = _weights_of(space)
    f = _as_function(f, len(weights))
    if center is None:
        center = weighted_median(pushforward(weights, f), tol)
    return float(weights[np.abs(f - center) >= eps - tol].sum())


# ---------------------------------------------------------------------------
# Lipschitz functions and observable diameter
# ---------------------------------------------------------------------------

def lip1_regularize(space: Any, dprime: Any, f: Any, T: Sequence[int]) -> np.ndarray:
    """Inf-convolution f~(x) = min over y in T of f(y) + d'(x, y).

    The result is 1-Lipschitz for d' whenever d' satisfies the triangle
    inequality, and f~ <= f on T.
    """
    weights = _weights_of(space)
    n = len(weights)
    d = dprime if isinstance(dprime, np.ndarray) and dprime.shape == (n, n) else _as_semimetric(dprime, n, "dprime")
    f = _as_function(f, n)
    subset = np.asarray(T)
    if subset.dtype == bool:
        subset = np.flatnonzero(subset)
    subset = subset.astype(int).ravel()
    if subset.size == 0:
        raise DomainError("regularization needs a nonempty subset T")
    if subset.min() < 0 or subset.max() >= n:
        raise DimensionError("T refers to atoms outside the space")
    return (d[:, subset] + f[subset][None, :]).min(axis=1)


class LipschitzSearch(BaseModel):
    """Search settings for the observable-diameter lower estimate."""

    seed: int = 0
    sweeps: int = Field(default=200, ge=0)
    step_fraction: float = Field(default=0.1, gt=0.0)
    anchors: Optional[int] = Field(default=None, ge=1)


@dataclass(frozen=True, eq=False)
class ObservableDiameter:
    value: float
    witness: np.ndarray
    anchor_value: float
    anchor_index: int
    accepted_moves: int


def _anchor_diameters(space: FiniteMMSpace, rows: np.ndarray, kappa: float, tol: float) -> np.ndarray:
    """Partial diameters of the push-forwards of d(x0, .) for every x0 in ``rows``."""
    n = space.n_atoms
    total = space.total_mass
    if kappa >= total - tol:
        return np.zeros(len(rows))
    if space.is_uniform(tol):
        atom = float(space.weights[0])
        keep = max(1, int(math.ceil((total - kappa - tol) / atom)))
        if keep <= 1:
            return np.zeros(len(rows))
        out = np.empty(len(rows))
        for start in range(0, len(rows), 512):
            block = np.sort(space.dist[rows[start:start + 512]], axis=1)
            out[start:start + 512] = (block[:, keep - 1:] - block[:, :n - keep + 1]).min(axis=1)
        return out
    return np.array([
        partial_diameter(pushforward(space, space.dist[r]), kappa, tol) for r in rows
    ])


def observable_diameter(
    space: FiniteMMSpace,
    kappa: float,
    strategy: Optional[LipschitzSearch] = None,
    tol: float = DEFAULT_TOL,
) -> ObservableDiameter:
    """Best-found lower estimate of sup over 1-Lipschitz f of diam(f_*(mu), m - kappa).

    Distance functions d(x0, .) seed the search (their negatives give the same
    partial diameter); coordinate moves then lower or raise one value and
    restore the Lipschitz condition with ``lip1_regularize``. Distances are
    assumed to satisfy the triangle inequality.
    """
    if kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    strategy = strategy or LipschitzSearch()
    n = space.n_atoms
    if n == 1:
        return ObservableDiameter(0.0, np.zeros(1), 0.0, 0, 0)

    rng = np.random.default_rng(strategy.seed)
    rows = np.arange(n)
    if strategy.anchors is not None and strategy.anchors < n:
        rows = np.sort(rng.choice(n, size=strategy.anchors, replace=False))
    values = _anchor_diameters(space, rows, kappa, tol)
    best_row = int(np.argmax(values))
    anchor_index = int(rows[best_row])
    anchor_value = float(values[best_row])

    best = anchor_value
    witness = space.dist[anchor_index].copy()
    step_scale = strategy.step_fraction * float(space.dist.max())
    accepted = 0
    for _ in range(strategy.sweeps):
        i = int(rng.integers(n))
        step = step_scale * float(rng.random())
        if step <= 0.0:
            continue
        trial = witness.copy()
        if rng.random() < 0.5:
            trial[i] -= step
            candidate = np.minimum(witness, lip1_regularize(space, space.dist, trial, [i]))
        else:
            trial[i] += step
            candidate = -np.minimum(-witness, lip1_regularize(space, space.dist, -trial, [i]))
        value = partial_diameter(pushforward(space, candidate), kappa, tol)
        if value > best + tol:
            best, witness = value, candidate
            accepted += 1

    logger.debug(
        "observable diameter: anchor %.6g at atom %d, final %.6g after %d accepted moves",
        anchor_value, anchor_index, best, accepted,
    )
    return ObservableDiameter(best, witness, anchor_value, anchor_index, accepted)


def _distance_to_constants(space: Any, f: np.ndarray, lam: float, tol: float) -> float:
    """inf over constants c of me_lambda(f, c), found by bisection on eps."""
    nu = pushforward(space, f)
    lo, hi = 0.0, float(nu.support[-1] - nu.support[0]) / 2.0
    if hi <= tol:
        return 0.0
    # eps works iff some window of width 2 eps keeps all but lam * eps of the mass
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if partial_diameter(nu, lam * mid, tol) <= 2.0 * mid:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            break
    return hi


def observable_distance_to_point(
    space: FiniteMMSpace,
    lam: float,
    n_random: int = 8,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> float:
    """Lower estimate of the observable distance between ``space`` and a point of equal mass.

    Lipschitz functions of a point are the constants, so the distance is the
    largest me_lambda gap between a 1-Lipschitz function and the constants;
    the maximum runs over a finite net of Lipschitz functions.
    """
    if lam <= 0.0:
        raise UnsupportedError("the observable distance estimate needs lambda > 0")
    rng = np.random.default_rng(seed)
    best = 0.0
    for f in _lipschitz_net(space.weights, space.dist, rng, n_random):
        best = max(best, _distance_to_constants(space, f, lam, tol))
    return best


# ---------------------------------------------------------------------------
# Box distance between two semimetrics
# ---------------------------------------------------------------------------

def _first_feasible_level(levels: np.ndarray, removal_cost, lam: float, tol: float) -> int:
    """Binary search for the first level interval that admits a feasible eps.

    Interval j is [levels[j], levels[j + 1]); the last one is unbounded and
    always feasible because nothing conflicts above the largest discrepancy.
    """
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        cost = removal_cost(mid)
        if lam == 0.0:
            ok = cost <= tol
        else:
            ok = cost <= lam * levels[mid + 1] + tol
        if ok:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _level_value(levels: np.ndarray, j: int, cost: float, lam: float, clamp: bool) -> float:
    if lam == 0.0:
        return float(levels[j])
    value = max(float(levels[j]), cost / lam)
    if clamp and j + 1 < len(levels):
        value = min(value, float(levels[j + 1]))
    return value


def _box_from_discrepancy(
    weights: np.ndarray,
    discrepancy: np.ndarray,
    lam: float,
    mode: BoxMode,
    tol: float = DEFAULT_TOL,
    exact_max_atoms: int = EXACT_MAX_ATOMS,
) -> BoundReport:
    """Box value for a discrepancy matrix: inf eps with a subset of removed mass
    <= lam * eps on which every pairwise discrepancy is <= eps."""
    if lam < 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam}")
    n = len(weights)
    rows, cols = np.triu_indices(n, 1)
    levels = np.unique(np.concatenate(([0.0], discrepancy[rows, cols])))

    if mode == "exact":
        if n > exact_max_atoms:
            raise SizeLimitError(
                f"exact box computation is limited to {exact_max_atoms} atoms, got {n}; "
                "use heuristic mode"
            )
        covers: dict[int, tuple[float, np.ndarray]] = {}

        def exact_cost(j: int) -> float:
            if j not in covers:
                covers[j] = exact_min_cover(weights, conflict_adjacency(discrepancy, levels[j]), exact_max_atoms)
            return covers[j][0]

        j = _first_feasible_level(levels, exact_cost, lam, tol)
        cost = exact_cost(j)
        value = _level_value(levels, j, cost, lam, clamp=True)
        retained = np.flatnonzero(~covers[j][1])
        lower_witness: dict[str, Any] = {"level_index": j}
        if j > 0:
            lower_witness.update({
                "infeasible_below": float(levels[j]),
                "min_removed_mass_below": exact_cost(j - 1),
            })
        return BoundReport(
            lower=value,
            upper=value,
            lower_witness=lower_witness,
            upper_witness={
                "retained": retained.tolist(),
                "removed_mass": cost,
                "epsilon": value,
            },
            methods=["exact-vertex-cover"],
            lam=lam,
            tol=tol,
            exact=True,
        )

    if mode != "heuristic":
        raise DomainError(f"unknown box mode {mode!r}")

    greedy: dict[int, tuple[float, np.ndarray]] = {}

    def greedy_cost(j: int) -> float:
        if j not in greedy:
            greedy[j] = greedy_cover(weights, conflict_adjacency(discrepancy, levels[j]))
        return greedy[j][0]

    _first_feasible_level(levels, greedy_cost, lam, tol)
    if len(levels) - 1 not in greedy:
        greedy_cost(len(levels) - 1)
    upper, upper_j = min(
        (_level_value(levels, j, cost, lam, clamp=False), j) for j, (cost, _) in greedy.items()
        if lam > 0.0 or cost <= tol
    )
    retained = np.flatnonzero(~greedy[upper_j][1])
    removed_mass = greedy[upper_j][0]
    total = float(weights.sum())
    if lam > 0.0 and total / lam < upper:
        upper, retained, removed_mass = total / lam, np.array([], dtype=int), total

    methods = ["greedy-vertex-cover"]
    n_edges = int(np.count_nonzero(discrepancy[rows, cols] > 0.0))
    lower = 0.0
    lower_witness: dict[str, Any] = {}
    if n_edges <= LP_EDGE_LIMIT:
        relaxed: dict[int, float] = {}

        def lp_cost(j: int) -> float:
            if j not in relaxed:
                value = lp_cover_bound(weights, conflict_adjacency(discrepancy, levels[j]))
                relaxed[j] = 0.0 if value is None else max(value - tol, 0.0)
            return relaxed[j]

        j_lower = _first_feasible_level(levels, lp_cost, lam, tol)
        lower = min(_level_value(levels, j_lower, lp_cost(j_lower), lam, clamp=True), upper)
        lower_witness = {"level_index": j_lower, "lp_cover_value": lp_cost(j_lower)}
        if j_lower > 0:
            lower_witness["lp_cover_value_below"] = lp_cost(j_lower - 1)
        methods.append("lp-relaxation")
    else:
        methods.append("trivial-lower")
        lower_witness = {"reason": f"{n_edges} conflict edges exceed the LP limit {LP_EDGE_LIMIT}"}

    return BoundReport(
        lower=lower,
        upper=upper,
        lower_witness=lower_witness,
        upper_witness={
            "retained": retained.tolist(),
            "removed_mass": removed_mass,
            "epsilon": upper,
        },
        methods=methods,
        lam=lam,
        tol=tol,
        exact=False,
    )


def box_lambda_pair(
    pair: SemiMetricPair,
    lam: float,
    mode: BoxMode = "exact",
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Box distance between the two semimetrics of ``pair``.

    Exact mode decides each candidate level with a branch-and-bound vertex
    cover (lower == upper); heuristic mode brackets the value between an LP
    relaxation and a greedy cover.
    """
    return _box_from_discrepancy(pair.weights, pair.discrepancy, lam, mode, tol)


def distance_to_lip1(space: Any, dprime: Any, f: Any, lam: float, mode: BoxMode = "exact", tol: float = DEFAULT_TOL) -> BoundReport:
    """me_lambda distance from ``f`` to the class of d'-Lipschitz functions.

    A d'-Lipschitz g with |f - g| <= eps off a set S exists iff
    |f(x) - f(y)| - d'(x, y) <= 2 eps on S (interval Lipschitz extension), so
    the distance is a box value for the discrepancy max(0, |f(x)-f(y)| - d')/2.
    """
    weights = _weights_of(space)
    n = len(weights)
    d = _as_semimetric(dprime, n, "dprime")
    f = _as_function(f, n)
    excess = np.clip(np.abs(f[:, None] - f[None, :]) - d, 0.0, None) / 2.0
    return _box_from_discrepancy(weights, excess, lam, mode, tol)


def _lipschitz_net(weights: np.ndarray, dist: np.ndarray, rng: np.random.Generator, n_random: int) -> list[np.ndarray]:
    """Distance functions d(x0, .) plus regularized random functions."""
    net = [dist[i].copy() for i in range(len(weights))]
    scale = float(dist.max())
    everything = np.arange(len(weights))
    for _ in range(n_random):
        noise = rng.uniform(0.0, scale, size=len(weights))
        net.append(lip1_regularize(weights, dist, noise, everything))
    return net


def hausdorff_lip1(
    pair: SemiMetricPair,
    lam: float,
    n_random: int = 4,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Bounds on the me_lambda Hausdorff distance between Lip1(d1) and Lip1(d2).

    Upper side: the box value, with the regularization construction replayed on
    a function net as a numerical check. Lower side: the exact distance from
    each net function to the opposite Lipschitz class.
    """
    if lam <= 0.0:
        raise UnsupportedError(
            "lambda = 0 makes the Hausdorff distance a uniform distance; use lambda > 0"
        )
    for name, d in (("d1", pair.d1), ("d2", pair.d2)):
        if not satisfies_triangle(d, tol):
            raise PreconditionError(f"{name} must satisfy the triangle inequality")

    mode: BoxMode = "exact" if pair.n_atoms <= EXACT_MAX_ATOMS else "heuristic"
    box = box_lambda_pair(pair, lam, mode=mode, tol=tol)
    retained = box.upper_witness["retained"]
    rng = np.random.default_rng(seed)

    lower = 0.0
    lower_source: dict[str, Any] = {}
    deviation = 0.0
    for direction, (d_from, d_to) in (("d1->d2", (pair.d1, pair.d2)), ("d2->d1", (pair.d2, pair.d1))):
        for k, f in enumerate(_lipschitz_net(pair.weights, d_from, rng, n_random)):
            if retained:
                for sign in (1.0, -1.0):
                    f_tilde = lip1_regularize(pair.weights, d_to, sign * f, retained)
                    deviation = max(deviation, me_lambda(pair.weights, sign * f, f_tilde, lam))
            gap = distance_to_lip1(pair.weights, d_to, f, lam, mode=mode, tol=tol).lower
            if gap > lower:
                lower = gap
                lower_source = {"direction": direction, "net_index": k}

    upper = box.upper
    return BoundReport(
        lower=lower,
        upper=upper,
        lower_witness={**lower_source, "distance_to_class": lower},
        upper_witness={
            **box.upper_witness,
            "box_value": box.upper,
            "regularization_deviation": deviation,
        },
        methods=["box-upper", "regularization-check", f"class-distance-{mode}"],
        lam=lam,
        tol=tol,
        seed=seed,
        exact=False,
    )
