"""Seeded Monte Carlo samples of the model spaces as finite mm-spaces.

Each sampled point draws from its own Philox stream keyed by (seed, index),
so a point's coordinates never depend on how many other points are drawn or
in which order.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from src.core import FiniteMMSpace, LipschitzSearch, RealMeasure1D, levy_tail_mass, observable_diameter, partial_diameter
from src.errors import DomainError, SizeLimitError
from src.modelgeom import ModelKind
from src.settings import DEFAULT_TOL, HAMMING_EXHAUSTIVE_MAX, MAX_DENSE_ATOMS

logger = logging.getLogger(__name__)

CURVE_COLUMNS = [
    "kind", "n", "N", "seed", "kappa", "observable_diameter", "anchor_value",
    "tail_eps", "tail_mass", "binomial_exact",
]


class SampleConfig(BaseModel):
    """What to sample: model kind, dimension parameter, sample count and seed."""

    kind: ModelKind
    n: int = Field(ge=1)
    N: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    metric: Literal["frobenius", "geodesic"] = "frobenius"
    exhaustive: Optional[bool] = None

    @model_validator(mode="after")
    def _check_kind(self) -> "SampleConfig":
        if self.kind == "so" and self.n < 2:
            raise ValueError("SO(n) needs n >= 2")
        if self.metric != "frobenius" and self.kind != "so":
            raise ValueError("the metric flag only applies to SO(n)")
        return self

    @property
    def is_exhaustive(self) -> bool:
        if self.kind != "hamming":
            return False
        if self.exhaustive is None:
            return self.n <= HAMMING_EXHAUSTIVE_MAX
        return self.exhaustive


def point_stream(seed: int, index: int) -> np.random.Generator:
    """Generator for one sample point; streams for distinct (seed, index) never overlap."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(index)))


def _check_dense(count: int) -> None:
    if count > MAX_DENSE_ATOMS:
        raise SizeLimitError(
            f"{count} atoms exceed the dense distance-matrix limit of {MAX_DENSE_ATOMS}"
        )


def sample_sphere_points(n: int, N: int, seed: int, offset: int = 0) -> np.ndarray:
    """N uniform points on S^n as rows of an (N, n+1) array."""
    points = np.empty((N, n + 1))
    for i in range(N):
        rng = point_stream(seed, offset + i)
        v = rng.standard_normal(n + 1)
        norm = np.linalg.norm(v)
        while norm == 0.0:
            v = rng.standard_normal(n + 1)
            norm = np.linalg.norm(v)
        points[i] = v / norm
    return points


def sample_cp_points(n: int, N: int, seed: int, offset: int = 0) -> np.ndarray:
    """N unit vectors of C^(n+1); their classes are uniform on CP^n."""
    points = np.empty((N, n + 1), dtype=complex)
    for i in range(N):
        rng = point_stream(seed, offset + i)
        z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        norm = np.linalg.norm(z)
        while norm == 0.0:
            z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            norm = np.linalg.norm(z)
        points[i] = z / norm
    return points


def haar_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed element of SO(n) from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


def sample_so_points(n: int, N: int, seed: int) -> np.ndarray:
    """N Haar rotations stacked into an (N, n, n) array."""
    return np.stack([haar_rotation(point_stream(seed, i), n) for i in range(N)])


def sphere_distances(points: np.ndarray) -> np.ndarray:
    gram = np.clip(points @ points.T, -1.0, 1.0)
    dist = np.arccos(gram)
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def cp_distances(points: np.ndarray) -> np.ndarray:
    overlap = np.clip(np.abs(points @ points.conj().T), 0.0, 1.0)
    dist = np.arccos(overlap)
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def so_frobenius_distances(rotations: np.ndarray) -> np.ndarray:
    n = rotations.shape[1]
    flat = rotations.reshape(len(rotations), -1)
    dist = np.sqrt(np.clip(2.0 * n - 2.0 * (flat @ flat.T), 0.0, None))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def so_geodesic_distances(rotations: np.ndarray) -> np.ndarray:
    count = len(rotations)
    dist = np.zeros((count, count))
    for i in range(count - 1):
        relative = np.einsum("ji,bjk->bik", rotations[i], rotations[i + 1:])
        angles = np.angle(np.linalg.eigvals(relative))
        dist[i, i + 1:] = np.sqrt(np.sum(angles ** 2, axis=1))
    return dist + dist.T


def hamming_vertices(n: int) -> np.ndarray:
    """All 2^n vertices of the cube as a (2^n, n) uint8 array, row i = binary digits of i."""
    if n < 1 or n > HAMMING_EXHAUSTIVE_MAX:
        raise SizeLimitError(f"exhaustive Hamming cubes support 1 <= n <= {HAMMING_EXHAUSTIVE_MAX}, got {n}")
    codes = np.arange(2 ** n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)


def hamming_distances(bits: np.ndarray) -> np.ndarray:
    x = bits.astype(float)
    n = x.shape[1]
    mismatches = x @ (1.0 - x).T + (1.0 - x) @ x.T
    return np.rint(mismatches) / n


def exact_binomial_measure(n: int) -> RealMeasure1D:
    """Law of the normalized distance to a fixed vertex of {0,1}^n: mass C(n, k) / 2^n at k / n."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    total = 2 ** n
    masses = np.array([math.comb(n, k) / total for k in range(n + 1)])
    return RealMeasure1D(support=np.arange(n + 1) / n, masses=masses)


def sample_space(cfg: SampleConfig) -> FiniteMMSpace:
    """Sample the configured model space as a probability mm-space."""
    provenance = {"kind": cfg.kind, "n": cfg.n, "N": cfg.N, "seed": cfg.seed, "metric": cfg.metric}
    label = f"{cfg.kind}({cfg.n})"

    if cfg.kind == "hamming" and cfg.is_exhaustive:
        _check_dense(2 ** cfg.n)
        bits = hamming_vertices(cfg.n)
        provenance["exhaustive"] = True
        return FiniteMMSpace.uniform(hamming_distances(bits), label=label, is_metric=True, provenance=provenance)

    _check_dense(cfg.N)
    if cfg.kind == "sphere":
        dist = sphere_distances(sample_sphere_points(cfg.n, cfg.N, cfg.seed))
    elif cfg.kind == "cp":
        dist = cp_distances(sample_cp_points(cfg.n, cfg.N, cfg.seed))
    elif cfg.kind == "so":
        rotations = sample_so_points(cfg.n, cfg.N, cfg.seed)
        dist = so_frobenius_distances(rotations) if cfg.metric == "frobenius" else so_geodesic_distances(rotations)
    else:
        bits = np.stack([point_stream(cfg.seed, i).integers(0, 2, size=cfg.n, dtype=np.uint8) for i in range(cfg.N)])
        dist = hamming_distances(bits)
        provenance["exhaustive"] = False

    logger.info("sampled %s with %d atoms (seed %d)", label, cfg.N, cfg.seed)
    # Triangle checks on arccos of rounded Gram entries can fail at the 1e-9 level
    return FiniteMMSpace.uniform(dist, label=label, is_metric=False, provenance=provenance)


@dataclass(frozen=True)
class BallVolumeSample:
    """Ball volume at one radius, pooled over centers, with the spread across centers."""

    r: float
    value: float
    center_std: float

    @property
    def center_variance(self) -> float:
        return self.center_std ** 2


def empirical_ball_volume(space: FiniteMMSpace, r: float, tol: float = DEFAULT_TOL) -> BallVolumeSample:
    """Mass of closed r-balls averaged over centers (center weights as the averaging measure)."""
    if not space.is_probability(tol):
        raise DomainError("ball volumes are measured on probability spaces")
    if r < 0.0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    per_center = (space.dist <= r + tol) @ space.weights
    value = float(space.weights @ per_center)
    spread = float(np.sqrt(max(space.weights @ (per_center - value) ** 2, 0.0)))
    return BallVolumeSample(r=float(r), value=min(value, 1.0), center_std=spread)


@dataclass(frozen=True)
class ConcentrationCurve:
    table: pd.DataFrame
    strictly_decreasing: bool


def concentration_curve(
    configs: Sequence[SampleConfig],
    kappa: float,
    eps: Optional[float] = None,
    strategy: Optional[LipschitzSearch] = None,
) -> ConcentrationCurve:
    """Observable-diameter estimates across a grid of sampled spaces.

    ``tail_mass`` is the Levy tail of the witness function at ``tail_eps``
    around its median. Without ``eps`` each row uses half its own observable
    diameter estimate, and a zero estimate has zero tail mass.
    ``binomial_exact`` is the exact partial diameter of the distance-to-vertex
    law for exhaustive Hamming cubes.
    """
    if kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if eps is not None and eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    strategy = strategy or LipschitzSearch()
    rows = []
    for cfg in configs:
        space = sample_space(cfg)
        estimate = observable_diameter(space, kappa, strategy)
        tail_eps = eps if eps is not None else 0.5 * estimate.value
        tail = levy_tail_mass(space, estimate.witness, tail_eps) if tail_eps > 0.0 else 0.0
        exact = math.nan
        if cfg.kind == "hamming" and cfg.is_exhaustive:
            exact = partial_diameter(exact_binomial_measure(cfg.n), kappa)
        rows.append({
            "kind": cfg.kind,
            "n": cfg.n,
            "N": space.n_atoms,
            "seed": cfg.seed,
            "kappa": kappa,
            "observable_diameter": estimate.value,
            "anchor_value": estimate.anchor_value,
            "tail_eps": tail_eps,
            "tail_mass": tail,
            "binomial_exact": exact,
        })
        logger.info("%s(%d): observable diameter %.6g", cfg.kind, cfg.n, estimate.value)

    table = pd.DataFrame(rows, columns=CURVE_COLUMNS)
    values = table["observable_diameter"].to_numpy()
    decreasing = bool(np.all(np.diff(values) < 0.0))
    if len(values) > 1 and not decreasing:
        logger.warning("observable diameters are not strictly decreasing along the grid")
    return ConcentrationCurve(table=table, strictly_decreasing=decreasing)
