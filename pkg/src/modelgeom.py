"""Closed-form geometry of the model spaces.

Sphere volumes and ball fractions, Bishop-Gromov / Bishop comparison bounds,
the Gamma-function inequality that turns volume comparison into a box
distance lower bound, and the constants of the sphere, complex projective
and rotation-group families. Every Gamma ratio is evaluated through
``gammaln`` so dimensions in the hundreds stay finite.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy import integrate
from scipy.special import gammaln

from src.errors import DimensionError, DomainError, PreconditionError, UnsupportedError
from src.settings import DEFAULT_TOL

logger = logging.getLogger(__name__)

ModelKind = Literal["sphere", "cp", "so", "hamming"]
Family = Literal["sphere", "cp"]

LOG_2 = math.log(2.0)
LOG_PI = math.log(math.pi)


def _require_int(name: str, value: int, minimum: int) -> int:
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0.0:
            raise DomainError(f"{name} must be positive, got {value}")


def log_sphere_volume(n: int) -> float:
    """log vol(S^n) = log 2 + (n+1)/2 log pi - log Gamma((n+1)/2); n = 0 gives log 2."""
    return LOG_2 + 0.5 * (n + 1) * LOG_PI - float(gammaln(0.5 * (n + 1)))


def sphere_total_volume(n: int) -> float:
    """Riemannian volume of the unit n-sphere."""
    n = _require_int("n", n, 1)
    return math.exp(log_sphere_volume(n))


def _sine_power_fraction(n: int, r: float) -> float:
    ratio = math.exp(log_sphere_volume(n - 1) - log_sphere_volume(n))
    integral, _ = integrate.quad(lambda t: math.sin(t) ** (n - 1), 0.0, r, epsabs=1e-13, epsrel=1e-12, limit=200)
    return ratio * integral


def sphere_ball_fraction(n: int, r: float, tol: float = DEFAULT_TOL) -> float:
    """Normalized volume of a closed geodesic ball of radius r in S^n."""
    n = _require_int("n", n, 1)
    if r < -tol or r > math.pi + tol:
        raise DomainError(f"radius must lie in [0, pi], got {r}")
    r = min(max(r, 0.0), math.pi)
    if r == math.pi:
        return 1.0
    if r == 0.0:
        return 0.0
    if n == 1:
        return r / math.pi
    # Integrate over the shorter side; v(r) + v(pi - r) = 1
    if r > math.pi / 2.0:
        value = 1.0 - _sine_power_fraction(n, math.pi - r)
    else:
        value = _sine_power_fraction(n, r)
    return min(max(value, 0.0), 1.0)


def cp_ball_fraction(n: int, r: float, tol: float = DEFAULT_TOL) -> float:
    """Fubini-Study ball fraction on CP^n with d = arccos|<z, w>|: sin(r)^(2n)."""
    n = _require_int("n", n, 1)
    if r < -tol:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r >= math.pi / 2.0:
        return 1.0
    return math.sin(max(r, 0.0)) ** (2 * n)


def bishop_gromov_lower(m: int, kappa1: float, r: float, tol: float = DEFAULT_TOL) -> float:
    """Lower bound v_{S^m}(r sqrt(kappa1)) on v_M(r) when Ric_M >= (m - 1) kappa1."""
    _require_positive(kappa1=kappa1)
    if r < 0.0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    scaled = r * math.sqrt(kappa1)
    if scaled > math.pi + tol:
        raise DomainError(f"r * sqrt(kappa1) = {scaled} exceeds pi")
    return sphere_ball_fraction(m, min(scaled, math.pi))


class BishopUpper(NamedTuple):
    exact: Optional[float]
    relaxed: float


def bishop_upper(n: int, kappa2: float, a_N: float, r: float) -> BishopUpper:
    """Upper bounds on v_N(r) for an n-manifold with Ric_N >= (n - 1) kappa2.

    ``exact`` is v_{S^n}(r sqrt(kappa2)) / (a_N kappa2^(n/2)) and is None once
    r sqrt(kappa2) passes pi; ``relaxed`` replaces the sine integral by the
    polynomial bound r^n vol(S^(n-1)) / (n a_N vol(S^n)).
    """
    n = _require_int("n", n, 1)
    _require_positive(kappa2=kappa2, a_N=a_N, r=r)
    scaled = r * math.sqrt(kappa2)
    exact = None
    if scaled <= math.pi:
        exact = sphere_ball_fraction(n, scaled) / (a_N * kappa2 ** (n / 2.0))
    log_relaxed = (
        n * math.log(r) + log_sphere_volume(n - 1) - math.log(n) - math.log(a_N) - log_sphere_volume(n)
    )
    return BishopUpper(exact=exact, relaxed=math.exp(log_relaxed))


def hyouka_log_constant(m: int, n: int, kappa1: float, a_N: float) -> float:
    """log of the right-hand constant K in c^(n-m) <= (1 - c) K."""
    return (
        math.log(n) + math.log(a_N) + 0.5 * m * math.log(kappa1)
        + float(gammaln(0.5 * (m + 1))) + float(gammaln(0.5 * n))
        - math.log(m) - (n + 1) * LOG_2 - (m - 1) * LOG_PI
        - float(gammaln(0.5 * m)) - float(gammaln(0.5 * (n + 1)))
    )


def hyouka_max_c(m: int, n: int, kappa1: float, a_N: float, tol: float = DEFAULT_TOL) -> float:
    """Largest c with c^(n-m) <= (1 - c) K and c sqrt(kappa1) <= pi.

    M is the m-manifold with Ric_M >= (m - 1) kappa1 and N the n-manifold with
    volume ratio a_N to S^n; the returned c is a certified lower bound for the
    unit box distance between them. The left side increases and the right
    side decreases in c, so bisection on the log gap finds the crossing.
    """
    m = _require_int("m", m, 1)
    n = _require_int("n", n, 1)
    if n <= m:
        raise UnsupportedError(f"the bound needs n > m, got m={m}, n={n}")
    _require_positive(kappa1=kappa1, a_N=a_N)
    log_k = hyouka_log_constant(m, n, kappa1, a_N)
    power = n - m

    def gap(c: float) -> float:
        return power * math.log(c) - math.log1p(-c) - log_k

    cap = min(1.0, math.pi / math.sqrt(kappa1))
    if cap < 1.0 and gap(cap) <= 0.0:
        logger.debug("hyouka: curvature cap %.6g binds for m=%d n=%d", cap, m, n)
        return cap
    lo, hi = 0.0, cap
    while hi - lo > min(tol, 1e-13):
        mid = 0.5 * (lo + hi)
        if gap(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


class CPFacts(NamedTuple):
    volume: float
    a_cp: float
    sectional_lower: float
    diameter: float


def cp_log_volume(n: int) -> float:
    return n * LOG_PI - float(gammaln(n + 1))


def cp_log_a(n: int) -> float:
    return float(gammaln(n + 0.5)) - LOG_2 - 0.5 * LOG_PI - float(gammaln(n + 1))


def cp_facts(n: int) -> CPFacts:
    """Volume pi^n / n!, sphere ratio a_cp, sectional lower bound and diameter of CP^n."""
    n = _require_int("n", n, 1)
    return CPFacts(
        volume=math.exp(cp_log_volume(n)),
        a_cp=math.exp(cp_log_a(n)),
        sectional_lower=1.0,
        diameter=math.pi / 2.0,
    )


def so_diameter(n: int) -> float:
    """Frobenius diameter of SO(n): 2 sqrt(n) for even n, 2 sqrt(n - 1) for odd n."""
    n = _require_int("n", n, 2)
    return 2.0 * math.sqrt(n if n % 2 == 0 else n - 1)


def so_log_volume(n: int) -> float:
    """log volume of SO(n) for the metric induced by the Frobenius inner product."""
    n = _require_int("n", n, 2)
    return 0.25 * n * (n - 1) * LOG_2 + sum(log_sphere_volume(k) for k in range(1, n))


class ModelSpaceSpec(BaseModel):
    """Closed-form descriptor of a model space.

    ``ricci_lower`` uses the (dimension - 1) kappa convention; ``a_N`` is the
    volume ratio to the unit sphere of the same dimension. Hamming cubes carry
    their counting volume and no curvature data.
    """

    kind: ModelKind
    n: int
    dimension: int
    ricci_lower: Optional[float] = None
    sectional_lower: Optional[float] = None
    log_total_volume: float
    diameter: float
    log_a_N: Optional[float] = None
    diameter_homogeneous: bool

    @property
    def total_volume(self) -> float:
        return math.exp(self.log_total_volume) if self.log_total_volume < 709.0 else math.inf

    @property
    def a_N(self) -> Optional[float]:
        if self.log_a_N is None:
            return None
        return math.exp(self.log_a_N) if self.log_a_N < 709.0 else math.inf

    @property
    def kappa1(self) -> Optional[float]:
        """Ricci lower bound divided by (dimension - 1)."""
        if self.ricci_lower is None or self.dimension < 2:
            return None
        return self.ricci_lower / (self.dimension - 1)

    def facts_row(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "volume": self.total_volume,
            "a_N": self.a_N,
            "ricci_lower": self.ricci_lower,
            "diameter": self.diameter,
        }


def model_spec(kind: ModelKind, n: int) -> ModelSpaceSpec:
    """Build the ModelSpaceSpec of S^n, CP^n, SO(n) or the Hamming cube {0,1}^n."""
    if kind == "sphere":
        n = _require_int("n", n, 1)
        return ModelSpaceSpec(
            kind=kind, n=n, dimension=n, ricci_lower=float(n - 1), sectional_lower=1.0,
            log_total_volume=log_sphere_volume(n), diameter=math.pi, log_a_N=0.0,
            diameter_homogeneous=True,
        )
    if kind == "cp":
        n = _require_int("n", n, 1)
        # Ricci bound comes from the sectional lower bound 1 in real dimension 2n
        return ModelSpaceSpec(
            kind=kind, n=n, dimension=2 * n, ricci_lower=float(2 * n - 1), sectional_lower=1.0,
            log_total_volume=cp_log_volume(n), diameter=math.pi / 2.0, log_a_N=cp_log_a(n),
            diameter_homogeneous=False,
        )
    if kind == "so":
        n = _require_int("n", n, 2)
        dimension = n * (n - 1) // 2
        log_volume = so_log_volume(n)
        return ModelSpaceSpec(
            kind=kind, n=n, dimension=dimension, ricci_lower=(n - 1) / 4.0,
            log_total_volume=log_volume, diameter=so_diameter(n),
            log_a_N=log_volume - log_sphere_volume(dimension),
            diameter_homogeneous=True,
        )
    if kind == "hamming":
        n = _require_int("n", n, 1)
        return ModelSpaceSpec(
            kind=kind, n=n, dimension=n, log_total_volume=n * LOG_2, diameter=1.0,
            diameter_homogeneous=True,
        )
    raise DomainError(f"unknown model kind {kind!r}")


def asobisugi_bound(n: int, m: int) -> float:
    """Diameter-gap lower bound min(1/2, |diam SO(n) - diam SO(m)|)."""
    return min(0.5, abs(so_diameter(n) - so_diameter(m)))


def kaotan_constant(C1: float, C2: float, C3: float) -> float:
    """min(2^(-C1/C3) pi^(-C2/C3), 2^(-C2/C3) pi^(-C1/C3))."""
    _require_positive(C1=C1, C2=C2, C3=C3)
    return min(kaotan_branch_limit(C1, C2, C3), kaotan_branch_limit(C2, C1, C3))


def kaotan_branch_limit(C1: float, C2: float, C3: float) -> float:
    """Limit 2^(-C1/C3) pi^(-C2/C3) of the finite-k threshold when n_k is the larger dimension."""
    _require_positive(C1=C1, C2=C2, C3=C3)
    return math.exp(-(C1 / C3) * LOG_2 - (C2 / C3) * LOG_PI)


@dataclass(frozen=True)
class KaotanThreshold:
    threshold: float
    c_probe: float
    family: Family
    k: int


def kaotan_finite_k(
    n_k: int,
    m_k: int,
    C1: float,
    C2: float,
    C3: float,
    k: int,
    family: Family = "sphere",
    c_probe: float = 0.0,
) -> KaotanThreshold:
    """Evaluate the k-th threshold below which c is a certified box lower bound.

    The sphere family compares S^(n_k) with S^(m_k); the cp family compares
    CP^(n_k) with CP^(m_k). The threshold depends on c through a (1 - c)
    factor, so it is evaluated at ``c_probe``; a probe above the threshold
    raises PreconditionError.
    """
    n_k = _require_int("n_k", n_k, 1)
    m_k = _require_int("m_k", m_k, 1)
    k = _require_int("k", k, 1)
    _require_positive(C1=C1, C2=C2, C3=C3)
    if not 0.0 <= c_probe < 1.0:
        raise DomainError(f"c_probe must lie in [0, 1), got {c_probe}")
    checks = [
        (n_k > m_k, f"n_k > m_k fails: {n_k} <= {m_k}"),
        (n_k <= C1 * k, f"n_k <= C1 k fails: {n_k} > {C1 * k}"),
        (m_k <= C2 * k, f"m_k <= C2 k fails: {m_k} > {C2 * k}"),
        (n_k - m_k >= C3 * k, f"n_k - m_k >= C3 k fails: {n_k - m_k} < {C3 * k}"),
    ]
    for ok, message in checks:
        if not ok:
            raise PreconditionError(message)

    log_one_minus_c = math.log1p(-c_probe)
    if family == "sphere":
        bracket = (
            log_one_minus_c + math.log(n_k) + float(gammaln(0.5 * n_k))
            - math.log(m_k) - float(gammaln(0.5 * (n_k + 1)))
        )
        exponent = 1.0 / (C3 * k)
        log_threshold = exponent * bracket - (C1 / C3) * LOG_2 + (-(C2 / C3) + exponent) * LOG_PI
    elif family == "cp":
        bracket = log_one_minus_c - LOG_2 - 0.5 * LOG_PI - math.log(C2 * k)
        exponent = 1.0 / (2.0 * C3 * k)
        log_threshold = exponent * bracket - (C1 / C3 + exponent) * LOG_2 + (-(C2 / C3) + exponent) * LOG_PI
    else:
        raise DomainError(f"unknown family {family!r}")

    threshold = math.exp(log_threshold)
    if c_probe > threshold:
        raise PreconditionError(f"c_probe {c_probe} exceeds the threshold {threshold:.6g}")
    return KaotanThreshold(
        threshold=threshold,
        c_probe=c_probe,
        family=family,
        k=k,
    )


def oosawa_constant(C1: float, C2: float, C3: float) -> float:
    """min(1/2, C3 / (sqrt(C1) + sqrt(C2)))."""
    if C1 <= 0.0 or C2 <= 0.0 or C3 < 0.0:
        raise DomainError("C1 and C2 must be positive and C3 nonnegative")
    return min(0.5, C3 / (math.sqrt(C1) + math.sqrt(C2)))


@dataclass(frozen=True)
class OosawaChain:
    diameter_gap: float
    chain: float
    scaled_chain: float
    bound: float


def oosawa_finite_k(n_k: int, m_k: int, C1: float, C2: float, C3: float, k: int) -> OosawaChain:
    """Evaluate the diameter-gap chain for SO(n_k) against SO(m_k).

    ``chain`` is 2 (n_k - m_k - 1) / (sqrt(n_k - 1) + sqrt(m_k)), a lower
    bound on 2 sqrt(n_k - 1) - 2 sqrt(m_k). Under the admissibility
    conditions ``chain`` is at least ``scaled_chain``,
    2 (C3 - 1/sqrt(k)) / (sqrt(C1 - 1/k) + sqrt(C2)).
    """
    n_k = _require_int("n_k", n_k, 2)
    m_k = _require_int("m_k", m_k, 2)
    k = _require_int("k", k, 1)
    _require_positive(C1=C1, C2=C2, C3=C3)
    if n_k <= m_k:
        raise PreconditionError(f"n_k > m_k fails: {n_k} <= {m_k}")
    if n_k > C1 * k:
        raise PreconditionError(f"n_k <= C1 k fails: {n_k} > {C1 * k}")
    if m_k > C2 * k:
        raise PreconditionError(f"m_k <= C2 k fails: {m_k} > {C2 * k}")
    if n_k - m_k < C3 * math.sqrt(k):
        raise PreconditionError(f"n_k - m_k >= C3 sqrt(k) fails: {n_k - m_k} < {C3 * math.sqrt(k)}")

    chain = 2.0 * (n_k - m_k - 1) / (math.sqrt(n_k - 1) + math.sqrt(m_k))
    scaled = 2.0 * (C3 - 1.0 / math.sqrt(k)) / (math.sqrt(max(C1 - 1.0 / k, 0.0)) + math.sqrt(C2))
    return OosawaChain(
        diameter_gap=so_diameter(n_k) - so_diameter(m_k),
        chain=chain,
        scaled_chain=scaled,
        bound=min(0.5, chain),
    )


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> float:
    """Fraction of coordinates where the bit vectors differ."""
    a, b = np.asarray(x), np.asarray(y)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"bit vectors must have equal length, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise DimensionError("bit vectors must be nonempty")
    return float(np.count_nonzero(a != b)) / a.size


def so_geodesic_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Bi-invariant Riemannian distance sqrt(sum of squared rotation angles of A^T B).

    Not the Frobenius metric the diameter bounds are stated for.
    """
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("rotations must be square matrices of equal size")
    angles = np.angle(np.linalg.eigvals(A.T @ B))
    return float(np.sqrt(np.sum(angles ** 2)))
