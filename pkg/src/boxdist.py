"""Box distance between two finite mm-spaces.

Upper bounds come from transport plans: any coupling of the two measures is
realized by a pair of parameters, and the box value of the cell-level
semimetric pair it induces bounds the box distance from above. Lower bounds
come from the ball-volume certificate and, for model spaces, the diameter
gap. Mass normalization reduces unequal totals to the equal-mass case.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.core import BoxMode, FiniteMMSpace, SemiMetricPair, box_lambda_pair
from src.errors import DomainError, PreconditionError, SizeLimitError, UnsupportedError
from src.modelgeom import ModelSpaceSpec, cp_ball_fraction, sphere_ball_fraction
from src.reports import BoundReport
from src.samplers import (
    cp_distances,
    empirical_ball_volume,
    sample_cp_points,
    sample_sphere_points,
    sphere_distances,
)
from src.settings import BIJECTION_MAX_CELLS, CERT_MARGIN, DEFAULT_SEED, DEFAULT_TOL, EXACT_MAX_ATOMS, UNIFORMITY_MAX_STD

logger = logging.getLogger(__name__)

SearchMode = Literal["exact", "local", "seeded-restart"]

# Bijection 2-swap search is offered while the common refinement stays this small
SWAP_MAX_CELLS = 64


# ---------------------------------------------------------------------------
# Mass normalization and transport plans
# ---------------------------------------------------------------------------

def normalize_masses(X: FiniteMMSpace, Y: FiniteMMSpace, tol: float = DEFAULT_TOL) -> tuple[FiniteMMSpace, FiniteMMSpace, float]:
    """Scale Y down to X's total mass; returns (X, scaled Y, m' - m)."""
    m, m_prime = X.total_mass, Y.total_mass
    if m <= 0.0 or m_prime <= 0.0:
        raise DomainError("both spaces need positive total mass")
    if m > m_prime + tol:
        raise PreconditionError(f"normalize_masses needs m <= m', got {m} > {m_prime}; swap the spaces")
    if abs(m - m_prime) <= tol:
        return X, Y, 0.0
    return X, Y.scaled(m / m_prime), m_prime - m


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Coupling of two atomic measures as a list of positive cells (i, j, mass)."""

    source: np.ndarray
    target: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.source, dtype=int).ravel()
        dst = np.asarray(self.target, dtype=int).ravel()
        mass = np.asarray(self.mass, dtype=float).ravel()
        if not (src.shape == dst.shape == mass.shape) or mass.size == 0:
            raise DomainError("a plan needs aligned, nonempty cell arrays")
        if np.any(mass <= 0.0):
            raise DomainError("plan cells must carry positive mass")
        for name, array in (("source", src), ("target", dst), ("mass", mass)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @classmethod
    def from_cells(cls, cells: dict[tuple[int, int], float], floor: float = 0.0) -> "TransportPlan":
        kept = sorted((key, value) for key, value in cells.items() if value > floor)
        return cls(
            source=[key[0] for key, _ in kept],
            target=[key[1] for key, _ in kept],
            mass=[value for _, value in kept],
        )

    @property
    def n_cells(self) -> int:
        return int(self.mass.shape[0])

    def check_marginals(self, source_weights: np.ndarray, target_weights: np.ndarray) -> None:
        """Raise PreconditionError unless the plan couples the two weight vectors."""
        rows = np.bincount(self.source, weights=self.mass, minlength=len(source_weights))
        cols = np.bincount(self.target, weights=self.mass, minlength=len(target_weights))
        slack = 1e-12 * max(1.0, float(np.sum(source_weights)))
        if len(rows) != len(source_weights) or len(cols) != len(target_weights):
            raise PreconditionError("plan refers to atoms outside the spaces")
        if np.max(np.abs(rows - source_weights)) > slack or np.max(np.abs(cols - target_weights)) > slack:
            raise PreconditionError("plan marginals do not match the space weights")

    def cell_pair(self, X: FiniteMMSpace, Y: FiniteMMSpace) -> SemiMetricPair:
        """Cell (i, j) against cell (k, l) compares d_X(i, k) with d_Y(j, l)."""
        return SemiMetricPair(
            weights=self.mass,
            d1=X.dist[np.ix_(self.source, self.source)],
            d2=Y.dist[np.ix_(self.target, self.target)],
        )

    def transposed(self) -> "TransportPlan":
        return TransportPlan(source=self.target, target=self.source, mass=self.mass)

    def as_rows(self) -> list[list[float]]:
        return [[int(i), int(j), float(w)] for i, j, w in zip(self.source, self.target, self.mass)]


def _northwest_corner(row_mass: np.ndarray, col_mass: np.ndarray, row_order: np.ndarray, col_order: np.ndarray) -> dict[tuple[int, int], float]:
    """Basic feasible plan (a spanning tree of nr + nc - 1 cells, zero flows allowed)."""
    ra = row_mass[row_order].astype(float).copy()
    rb = col_mass[col_order].astype(float).copy()
    nr, nc = len(ra), len(rb)
    basis: dict[tuple[int, int], float] = {}
    i = j = 0
    while True:
        x = min(ra[i], rb[j])
        basis[(int(row_order[i]), int(col_order[j]))] = x
        ra[i] -= x
        rb[j] -= x
        if i == nr - 1 and j == nc - 1:
            break
        if j == nc - 1 or (ra[i] <= 0.0 and i < nr - 1):
            i += 1
        else:
            j += 1
    return basis


def _tree_path(basis: dict[tuple[int, int], float], row: int, col: int) -> Optional[list[tuple[int, int]]]:
    """Cells on the basis-tree path from row node ``row`` to column node ``col``."""
    rows_of: dict[int, list[int]] = {}
    cols_of: dict[int, list[int]] = {}
    for i, j in basis:
        cols_of.setdefault(i, []).append(j)
        rows_of.setdefault(j, []).append(i)
    start = ("r", row)
    parent: dict[tuple[str, int], Optional[tuple[str, int]]] = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for side, idx in frontier:
            neighbours = [("c", j) for j in cols_of.get(idx, [])] if side == "r" else [("r", i) for i in rows_of.get(idx, [])]
            for node in neighbours:
                if node not in parent:
                    parent[node] = (side, idx)
                    nxt.append(node)
        frontier = nxt
    goal = ("c", col)
    if goal not in parent:
        return None
    path = []
    node = goal
    while parent[node] is not None:
        prev = parent[node]
        cell = (prev[1], node[1]) if prev[0] == "r" else (node[1], prev[1])
        path.append(cell)
        node = prev
    path.reverse()
    return path


def _pivot(basis: dict[tuple[int, int], float], entering: tuple[int, int], floor: float) -> Optional[dict[tuple[int, int], float]]:
    """Move to the adjacent vertex through ``entering``; None for degenerate or impossible pivots."""
    path = _tree_path(basis, *entering)
    if not path:
        return None
    # Path cells alternate -, +, -, ... starting next to the entering cell
    minus = path[0::2]
    plus = path[1::2]
    leaving = min(minus, key=lambda cell: (basis[cell], cell))
    theta = basis[leaving]
    if theta <= floor:
        return None
    moved = dict(basis)
    for cell in minus:
        moved[cell] = max(moved[cell] - theta, 0.0)
    for cell in plus:
        moved[cell] += theta
    del moved[leaving]
    moved[entering] = theta
    return moved


# ---------------------------------------------------------------------------
# Plan evaluation and search
# ---------------------------------------------------------------------------

@dataclass
class _PlanEvaluator:
    X: FiniteMMSpace
    Y: FiniteMMSpace
    lam: float
    tol: float
    max_evaluations: int
    evaluations: int = 0
    best_value: float = math.inf
    best_plan: Optional[TransportPlan] = None
    best_report: Optional[BoundReport] = None
    best_stage: str = ""
    cache: dict = field(default_factory=dict)

    @property
    def exhausted(self) -> bool:
        return self.evaluations >= self.max_evaluations

    def evaluate(self, plan: TransportPlan, stage: str) -> float:
        key = (plan.source.tobytes(), plan.target.tobytes(), plan.mass.tobytes())
        if key in self.cache:
            return self.cache[key]
        self.evaluations += 1
        mode: BoxMode = "exact" if plan.n_cells <= EXACT_MAX_ATOMS else "heuristic"
        report = box_lambda_pair(plan.cell_pair(self.X, self.Y), self.lam, mode=mode, tol=self.tol)
        self.cache[key] = report.upper
        if report.upper < self.best_value - self.tol or self.best_plan is None:
            self.best_value, self.best_plan, self.best_report, self.best_stage = report.upper, plan, report, stage
        return report.upper


def _uniform_refinement(X: FiniteMMSpace, Y: FiniteMMSpace, tol: float) -> Optional[int]:
    if not (X.is_uniform(tol) and Y.is_uniform(tol)):
        return None
    return math.lcm(X.n_atoms, Y.n_atoms)


def _bijection_plan(X: FiniteMMSpace, Y: FiniteMMSpace, cells: int, perm: Sequence[int]) -> TransportPlan:
    """Merge the refined bijection k -> perm[k] back onto the original atoms."""
    copies_x, copies_y = cells // X.n_atoms, cells // Y.n_atoms
    mass = X.total_mass / cells
    merged: dict[tuple[int, int], float] = {}
    for k, target in enumerate(perm):
        key = (k // copies_x, int(target) // copies_y)
        merged[key] = merged.get(key, 0.0) + mass
    return TransportPlan.from_cells(merged)


def _refined_dist(space: FiniteMMSpace, cells: int) -> np.ndarray:
    index = np.arange(cells) // (cells // space.n_atoms)
    return space.dist[np.ix_(index, index)]


def _subset_box_values(discrepancies: np.ndarray, cells: int, cell_mass: float, lam: float) -> np.ndarray:
    """Box value of each row of pair discrepancies on equal-mass cells, by subset enumeration."""
    if cells < 2:
        return np.zeros(len(discrepancies))
    rows, cols = np.triu_indices(cells, 1)
    subsets = np.arange(2 ** cells)
    members = ((subsets[:, None] >> np.arange(cells)) & 1).astype(bool)
    inside = members[:, rows] & members[:, cols]
    largest = np.where(inside[None, :, :], discrepancies[:, None, :], 0.0).max(axis=2)
    if lam == 0.0:
        return largest[:, -1]
    removed = (cells - members.sum(axis=1)) * cell_mass
    return np.maximum(largest, removed[None, :] / lam).min(axis=1)


def _exact_bijection_search(X: FiniteMMSpace, Y: FiniteMMSpace, evaluator: _PlanEvaluator, cells: int) -> None:
    dx, dy = _refined_dist(X, cells), _refined_dist(Y, cells)
    rows, cols = np.triu_indices(cells, 1)
    perms = np.array(list(itertools.permutations(range(cells))), dtype=int)
    best_value, best_perm = math.inf, None
    for start in range(0, len(perms), 512):
        block = perms[start:start + 512]
        gaps = np.abs(dx[rows, cols][None, :] - dy[block[:, rows], block[:, cols]])
        values = _subset_box_values(gaps, cells, X.total_mass / cells, evaluator.lam)
        k = int(np.argmin(values))
        if values[k] < best_value - evaluator.tol:
            best_value, best_perm = float(values[k]), block[k]
    logger.debug("exact bijection search over %d plans: %.6g", len(perms), best_value)
    evaluator.evaluate(_bijection_plan(X, Y, cells, best_perm), "exact-bijection")


def _swap_search(X: FiniteMMSpace, Y: FiniteMMSpace, evaluator: _PlanEvaluator, cells: int, perm: np.ndarray, rng: Optional[np.random.Generator]) -> None:
    perm = perm.copy()
    current = evaluator.evaluate(_bijection_plan(X, Y, cells, perm), "bijection-2swap")
    pairs = [(a, b) for a in range(cells) for b in range(a + 1, cells)]
    improved = True
    while improved and not evaluator.exhausted:
        improved = False
        order = rng.permutation(len(pairs)) if rng is not None else range(len(pairs))
        for idx in order:
            a, b = pairs[idx]
            if perm[a] // (cells // Y.n_atoms) == perm[b] // (cells // Y.n_atoms):
                continue
            perm[a], perm[b] = perm[b], perm[a]
            value = evaluator.evaluate(_bijection_plan(X, Y, cells, perm), "bijection-2swap")
            if value < current - evaluator.tol:
                current, improved = value, True
                break
            perm[a], perm[b] = perm[b], perm[a]
            if evaluator.exhausted:
                break


def _pivot_search(X: FiniteMMSpace, Y: FiniteMMSpace, evaluator: _PlanEvaluator, row_order: np.ndarray, col_order: np.ndarray, rng: Optional[np.random.Generator]) -> None:
    floor = 1e-14 * max(1.0, X.total_mass)
    basis = _northwest_corner(X.weights, Y.weights, row_order, col_order)
    current = evaluator.evaluate(TransportPlan.from_cells(basis, floor), "vertex-pivot")
    improved = True
    while improved and not evaluator.exhausted:
        improved = False
        candidates = [(i, j) for i in range(X.n_atoms) for j in range(Y.n_atoms) if (i, j) not in basis]
        order = rng.permutation(len(candidates)) if rng is not None else range(len(candidates))
        for idx in order:
            moved = _pivot(basis, candidates[idx], floor)
            if moved is None:
                continue
            value = evaluator.evaluate(TransportPlan.from_cells(moved, floor), "vertex-pivot")
            if value < current - evaluator.tol:
                basis, current, improved = moved, value, True
                break
            if evaluator.exhausted:
                break


def box_upper_plan_search(
    X: FiniteMMSpace,
    Y: FiniteMMSpace,
    lam: float = 1.0,
    search: SearchMode = "seeded-restart",
    seed: int = DEFAULT_SEED,
    restarts: int = 8,
    max_evaluations: int = 2000,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Best box value over searched transport plans: an upper bound on the box distance.

    ``exact`` enumerates every bijection of the uniform common refinement
    (at most BIJECTION_MAX_CELLS cells). ``local`` runs first-improvement 2-swap
    search on bijections and pivot search on polytope vertices from the natural
    starts. ``seeded-restart`` adds the exact stage when it applies and repeats
    local search from random northwest-corner starts.
    """
    if lam < 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam}")
    if abs(X.total_mass - Y.total_mass) > tol * max(1.0, X.total_mass):
        raise PreconditionError(
            f"plan search needs equal total masses, got {X.total_mass} and {Y.total_mass}; "
            "normalize the masses first"
        )
    evaluator = _PlanEvaluator(X, Y, lam, tol, max_evaluations)
    cells = _uniform_refinement(X, Y, tol)
    exact_ok = cells is not None and cells <= BIJECTION_MAX_CELLS

    if search == "exact":
        if cells is None:
            raise PreconditionError("exact plan search needs uniform equal-mass atoms in both spaces")
        if not exact_ok:
            raise SizeLimitError(
                f"exact plan search enumerates {cells}! bijections; the limit is "
                f"{BIJECTION_MAX_CELLS} cells, use local or seeded-restart search"
            )
        _exact_bijection_search(X, Y, evaluator, cells)
    elif search in ("local", "seeded-restart"):
        swap_ok = cells is not None and cells <= SWAP_MAX_CELLS
        if search == "seeded-restart" and exact_ok:
            _exact_bijection_search(X, Y, evaluator, cells)
        if swap_ok:
            _swap_search(X, Y, evaluator, cells, np.arange(cells), None)
        _pivot_search(X, Y, evaluator, np.arange(X.n_atoms), np.arange(Y.n_atoms), None)
        if search == "seeded-restart":
            for r, child in enumerate(np.random.SeedSequence(seed).spawn(restarts)):
                rng = np.random.default_rng(child)
                if swap_ok:
                    _swap_search(X, Y, evaluator, cells, rng.permutation(cells), rng)
                _pivot_search(X, Y, evaluator, rng.permutation(X.n_atoms), rng.permutation(Y.n_atoms), rng)
                logger.debug("restart %d: best upper %.6g after %d evaluations", r, evaluator.best_value, evaluator.evaluations)
    else:
        raise DomainError(f"unknown search mode {search!r}")

    plan, report = evaluator.best_plan, evaluator.best_report
    plan.check_marginals(X.weights, Y.weights)
    logger.info("plan search (%s): upper %.6g from %s, %d evaluations", search, report.upper, evaluator.best_stage, evaluator.evaluations)
    return BoundReport(
        lower=0.0,
        upper=report.upper,
        lower_witness={"reason": "plan search bounds the box distance from above only"},
        upper_witness={
            "plan": plan.as_rows(),
            "retained_cells": report.upper_witness.get("retained", []),
            "stage": evaluator.best_stage,
            "evaluations": evaluator.evaluations,
        },
        methods=[f"plan-search-{search}", *report.methods, "trivial-lower"],
        lam=lam,
        tol=tol,
        seed=seed if search == "seeded-restart" else None,
        exact=False,
    )


# ---------------------------------------------------------------------------
# Ball volumes and lower-bound certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BallVolumeFunction:
    """r -> mass fraction of a closed r-ball, assumed independent of the center."""

    evaluator: Callable[[float], float]
    diameter: float
    provenance: dict[str, Any]
    uniformly_distributed: bool
    center_std: float = 0.0

    def __call__(self, r: float) -> float:
        if r < 0.0:
            raise DomainError(f"radius must be nonnegative, got {r}")
        if r >= self.diameter:
            return 1.0
        return min(max(float(self.evaluator(r)), 0.0), 1.0)

    @classmethod
    def closed_form(cls, kind: Literal["sphere", "cp"], n: int) -> "BallVolumeFunction":
        """Exact ball fractions of S^n or CP^n."""
        if kind == "sphere":
            return cls(lambda r: sphere_ball_fraction(n, r), math.pi, {"source": "closed-form", "kind": kind, "n": n}, True)
        if kind == "cp":
            return cls(lambda r: cp_ball_fraction(n, r), math.pi / 2.0, {"source": "closed-form", "kind": kind, "n": n}, True)
        raise UnsupportedError(f"no closed-form ball volumes for {kind!r}")

    @classmethod
    def from_space(
        cls,
        space: FiniteMMSpace,
        seed: Optional[int] = None,
        max_std: float = UNIFORMITY_MAX_STD,
        probe_radii: int = 16,
        tol: float = DEFAULT_TOL,
    ) -> "BallVolumeFunction":
        """Pooled empirical ball volumes; the uniformity flag checks the spread across centers."""
        if not space.is_probability(tol):
            raise DomainError("ball volumes are measured on probability spaces")
        flat = space.dist.ravel()
        order = np.argsort(flat, kind="stable")
        sorted_dist = flat[order]
        cumulative = np.cumsum(np.outer(space.weights, space.weights).ravel()[order])

        def pooled(r: float) -> float:
            idx = int(np.searchsorted(sorted_dist, r + tol, side="right"))
            return float(cumulative[idx - 1]) if idx > 0 else 0.0

        off_diagonal = space.dist[np.triu_indices(space.n_atoms, 1)]
        spread = 0.0
        if off_diagonal.size:
            for r in np.unique(np.quantile(off_diagonal, np.linspace(0.0, 1.0, probe_radii))):
                spread = max(spread, empirical_ball_volume(space, float(r), tol).center_std)
        if seed is None and space.provenance:
            seed = space.provenance.get("seed")
        provenance = {"source": "empirical", "N": space.n_atoms, "seed": seed, "label": space.label}
        return cls(pooled, float(space.dist.max()), provenance, spread <= max_std, spread)


class VolumeCertificate(BaseModel):
    """Outcome of one premise check v_X(a + c) <= (1 - c) v_Y(a / 2)."""

    certified: bool
    lower: float
    a: float
    c: float
    vx_at_a_plus_c: float
    vy_at_half_a: float
    rhs: float
    margin: float
    source_x: dict[str, Any]
    source_y: dict[str, Any]


def box_lower_volume_certificate(
    vX: BallVolumeFunction,
    vY: BallVolumeFunction,
    a: float,
    c: float,
    margin: float = CERT_MARGIN,
) -> VolumeCertificate:
    """Certify box_1(X, Y) >= c when the ball-volume premise holds with ``margin`` to spare."""
    if not 0.0 < c < 1.0:
        raise DomainError(f"c must lie strictly between 0 and 1, got {c}")
    if a <= 0.0:
        raise DomainError(f"a must be positive, got {a}")
    for name, v in (("X", vX), ("Y", vY)):
        if not v.uniformly_distributed:
            raise PreconditionError(
                f"ball volumes of {name} depend on the center (spread {v.center_std:.3g}); "
                "the certificate needs uniformly distributed measures"
            )
    left = vX(a + c)
    right_volume = vY(a / 2.0)
    rhs = (1.0 - c) * right_volume
    certified = left <= rhs - margin
    return VolumeCertificate(
        certified=certified,
        lower=c if certified else 0.0,
        a=a,
        c=c,
        vx_at_a_plus_c=left,
        vy_at_half_a=right_volume,
        rhs=rhs,
        margin=margin,
        source_x=vX.provenance,
        source_y=vY.provenance,
    )


def best_volume_certificate(
    vX: BallVolumeFunction,
    vY: BallVolumeFunction,
    a_values: Optional[Sequence[float]] = None,
    c_values: Optional[Sequence[float]] = None,
    margin: float = CERT_MARGIN,
) -> Optional[VolumeCertificate]:
    """Scan an (a, c) grid and return the firing certificate with the largest c."""
    if a_values is None:
        reach = 2.0 * max(vX.diameter, vY.diameter, 1e-12)
        a_values = np.linspace(reach / 64.0, reach, 64)
    if c_values is None:
        c_values = np.round(np.arange(1, 100) / 100.0, 2)
    c_sorted = sorted((float(c) for c in c_values), reverse=True)
    best: Optional[VolumeCertificate] = None
    for a in a_values:
        for c in c_sorted:
            if best is not None and c <= best.c:
                break
            record = box_lower_volume_certificate(vX, vY, float(a), c, margin)
            if record.certified:
                best = record
                break
    return best


def box_lower_diameter_gap(X_spec: ModelSpaceSpec, Y_spec: ModelSpaceSpec) -> float:
    """min(1/2, |diam X - diam Y|) for diameter-homogeneous model spaces."""
    for spec in (X_spec, Y_spec):
        if not spec.diameter_homogeneous:
            raise UnsupportedError(f"{spec.kind}({spec.n}) is not flagged diameter-homogeneous")
    return min(0.5, abs(X_spec.diameter - Y_spec.diameter))


def box_distance(
    X: FiniteMMSpace,
    Y: FiniteMMSpace,
    lam: float = 1.0,
    search: SearchMode = "seeded-restart",
    seed: int = DEFAULT_SEED,
    restarts: int = 8,
    certificates: bool = True,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Two-sided bounds on the box distance between two finite mm-spaces.

    The lighter space comes first; the heavier one is scaled to match and the
    mass difference is added to both sides. Volume certificates join in for
    lambda = 1 between probability spaces with center-independent ball volumes.
    """
    if X.total_mass > Y.total_mass:
        X, Y = Y, X
    X, Y_scaled, term = normalize_masses(X, Y, tol)
    report = box_upper_plan_search(X, Y_scaled, lam, search=search, seed=seed, restarts=restarts, tol=tol)

    if certificates and lam == 1.0 and X.is_probability(tol) and Y_scaled.is_probability(tol):
        vX, vY = BallVolumeFunction.from_space(X, tol=tol), BallVolumeFunction.from_space(Y_scaled, tol=tol)
        if vX.uniformly_distributed and vY.uniformly_distributed:
            for first, second, orientation in ((vX, vY, "X,Y"), (vY, vX, "Y,X")):
                cert = best_volume_certificate(first, second)
                if cert is None or cert.lower <= report.lower:
                    continue
                if cert.lower > report.upper + tol:
                    logger.warning(
                        "volume certificate %.6g (%s) exceeds the plan upper bound %.6g; certificate dropped",
                        cert.lower, orientation, report.upper,
                    )
                    continue
                certified = BoundReport(
                    lower=min(cert.lower, report.upper),
                    upper=report.upper,
                    lower_witness={**cert.model_dump(), "orientation": orientation},
                    upper_witness=report.upper_witness,
                    methods=["volume-certificate"],
                    lam=lam,
                    tol=tol,
                )
                report = report.merged(certified)
        else:
            logger.info("volume certificate skipped: ball volumes depend on the center")

    if term > 0.0:
        report = report.shifted(term)
    return report


# ---------------------------------------------------------------------------
# Projection couplings onto a codimension-one equator
# ---------------------------------------------------------------------------

def _coupling_report(dx: np.ndarray, dy: np.ndarray, near: np.ndarray, lam: float, witness: dict[str, Any], methods: list[str], seed: int, tol: float) -> BoundReport:
    count = len(near)
    pair = SemiMetricPair(weights=np.full(count, 1.0 / count), d1=dx, d2=dy)
    mode: BoxMode = "exact" if count <= EXACT_MAX_ATOMS else "heuristic"
    box = box_lambda_pair(pair, lam, mode=mode, tol=tol)

    # Keeping exactly the projected points costs the far mass
    near_idx = np.flatnonzero(near)
    near_gap = float(pair.discrepancy[np.ix_(near_idx, near_idx)].max()) if near_idx.size else 0.0
    far_mass = 1.0 - near_idx.size / count
    direct = max(near_gap, far_mass / lam) if lam > 0.0 else (near_gap if far_mass == 0.0 else math.inf)
    upper = min(box.upper, direct)
    return BoundReport(
        lower=0.0,
        upper=upper,
        lower_witness={"reason": "coupling constructions bound the box distance from above only"},
        upper_witness={
            **witness,
            "near_fraction": near_idx.size / count,
            "near_discrepancy": near_gap,
            "projection_value": direct,
            "search_value": box.upper,
            "retained": box.upper_witness["retained"] if box.upper <= direct else near_idx.tolist(),
        },
        methods=[*methods, *box.methods, "trivial-lower"],
        lam=lam,
        tol=tol,
        seed=seed,
        exact=False,
    )


def _check_coupling_args(n: int, N: int, eps: float) -> None:
    if n < 2:
        raise DomainError(f"the coupling needs n >= 2, got {n}")
    if N < 100:
        raise DomainError(f"the coupling needs at least 100 samples, got {N}")
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")


def sphere_codim1_coupling_upper(n: int, N: int, eps: float, seed: int = DEFAULT_SEED, lam: float = 1.0, tol: float = DEFAULT_TOL) -> BoundReport:
    """Empirical upper bound on box_lam(S^n, S^(n-1)) from the equator projection coupling.

    Samples within geodesic distance eps of the equator S^(n-1) pair with
    their normalized projections; the rest pair with fresh uniform samples of
    S^(n-1). Both sides get mass 1/N per sample and the identity plan.
    """
    _check_coupling_args(n, N, eps)
    points = sample_sphere_points(n, N, seed)
    for i in np.flatnonzero(np.linalg.norm(points[:, :n], axis=1) == 0.0):
        # Poles have no projection; redraw them from a separate stream block
        points[i] = sample_sphere_points(n, 1, seed, offset=2 * N + int(i))[0]
    near = np.arcsin(np.clip(np.abs(points[:, n]), 0.0, 1.0)) <= eps
    fresh = sample_sphere_points(n - 1, N, seed, offset=N)
    image = fresh.copy()
    projected = points[near, :n]
    image[near] = projected / np.linalg.norm(projected, axis=1, keepdims=True)
    return _coupling_report(
        sphere_distances(points), sphere_distances(image), near, lam,
        {"family": "sphere", "n": n, "N": N, "eps": eps},
        ["projection-coupling"], seed, tol,
    )


def cp_codim1_coupling_upper(n: int, N: int, eps: float, seed: int = DEFAULT_SEED, lam: float = 1.0, tol: float = DEFAULT_TOL) -> BoundReport:
    """CP^n against the hyperplane CP^(n-1) = {z_n = 0}, same construction as the sphere case."""
    _check_coupling_args(n, N, eps)
    points = sample_cp_points(n, N, seed)
    for i in np.flatnonzero(np.linalg.norm(points[:, :n], axis=1) == 0.0):
        points[i] = sample_cp_points(n, 1, seed, offset=2 * N + int(i))[0]
    near = np.arcsin(np.clip(np.abs(points[:, n]), 0.0, 1.0)) <= eps
    fresh = sample_cp_points(n - 1, N, seed, offset=N)
    image = fresh.copy()
    projected = points[near, :n]
    image[near] = projected / np.linalg.norm(projected, axis=1, keepdims=True)
    return _coupling_report(
        cp_distances(points), cp_distances(image), near, lam,
        {"family": "cp", "n": n, "N": N, "eps": eps},
        ["projection-coupling"], seed, tol,
    )


def codim1_coupling_curve(
    dims: Sequence[int],
    N: int,
    eps: float,
    seeds: Sequence[int],
    family: Literal["sphere", "cp"] = "sphere",
    lam: float = 1.0,
) -> pd.DataFrame:
    """One row per (n, seed) with the coupling upper bound and the near fraction."""
    coupling = sphere_codim1_coupling_upper if family == "sphere" else cp_codim1_coupling_upper
    rows = []
    for n in dims:
        for seed in seeds:
            report = coupling(n, N, eps, seed=seed, lam=lam)
            rows.append({
                "family": family,
                "n": n,
                "N": N,
                "eps": eps,
                "seed": seed,
                "upper": report.upper,
                "near_fraction": report.upper_witness["near_fraction"],
            })
            logger.info("%s codim-1 coupling n=%d seed=%d: upper %.6g", family, n, seed, report.upper)
    return pd.DataFrame(rows, columns=["family", "n", "N", "eps", "seed", "upper", "near_fraction"])
