import math

import numpy as np
import pytest

from src.errors import DimensionError, DomainError, PreconditionError, UnsupportedError
from src.modelgeom import (
    asobisugi_bound,
    bishop_gromov_lower,
    bishop_upper,
    cp_ball_fraction,
    cp_facts,
    hamming_distance,
    hyouka_log_constant,
    hyouka_max_c,
    kaotan_branch_limit,
    kaotan_constant,
    kaotan_finite_k,
    model_spec,
    oosawa_constant,
    oosawa_finite_k,
    so_diameter,
    so_geodesic_distance,
    sphere_ball_fraction,
    sphere_total_volume,
)

RADII = np.linspace(0.0, math.pi, 25)


# --- sphere volumes --------------------------------------------------------

def test_sphere_volumes():
    assert sphere_total_volume(1) == pytest.approx(2 * math.pi, rel=1e-12)
    assert sphere_total_volume(2) == pytest.approx(4 * math.pi, rel=1e-12)
    assert sphere_total_volume(3) == pytest.approx(2 * math.pi ** 2, rel=1e-12)
    assert 0.0 < sphere_total_volume(300) < 1e-100
    with pytest.raises(DomainError):
        sphere_total_volume(0)


def test_sphere_ball_fraction_closed_forms():
    for r in RADII:
        assert sphere_ball_fraction(1, r) == pytest.approx(r / math.pi, abs=1e-12)
        assert sphere_ball_fraction(2, r) == pytest.approx((1 - math.cos(r)) / 2, abs=1e-10)
    assert sphere_ball_fraction(7, math.pi) == 1.0
    with pytest.raises(DomainError):
        sphere_ball_fraction(3, 4.0)


@pytest.mark.parametrize("n", [3, 7, 20])
def test_sphere_ball_fraction_shape(n):
    values = [sphere_ball_fraction(n, r) for r in RADII]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    for r in RADII[1:-1]:
        assert sphere_ball_fraction(n, r) + sphere_ball_fraction(n, math.pi - r) == pytest.approx(1.0, abs=1e-10)


def test_cp_line_is_a_half_size_sphere():
    for r in np.linspace(0.0, math.pi / 2, 13):
        assert cp_ball_fraction(1, r) == pytest.approx(sphere_ball_fraction(2, 2 * r), abs=1e-10)
    assert cp_ball_fraction(4, math.pi / 2) == 1.0


# --- comparison bounds -----------------------------------------------------

def test_bishop_gromov_lower():
    assert bishop_gromov_lower(2, 4.0, math.pi / 4) == pytest.approx(0.5, abs=1e-10)
    assert bishop_gromov_lower(5, 1.0, 0.7) == pytest.approx(sphere_ball_fraction(5, 0.7))
    assert bishop_gromov_lower(3, 1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        bishop_gromov_lower(3, 4.0, 2.0)


def test_bishop_upper():
    assert bishop_upper(2, 1.0, 1.0, 0.1).relaxed == pytest.approx(0.0025, rel=1e-12)
    assert bishop_upper(4, 1.0, 1.0, 0.8).exact == pytest.approx(sphere_ball_fraction(4, 0.8))
    assert bishop_upper(3, 1.0, 1.0, 4.0).exact is None
    with pytest.raises(DomainError):
        bishop_upper(3, 1.0, 1.0, 0.0)


@pytest.mark.parametrize("n", range(2, 21))
def test_relaxed_upper_dominates_exact(n):
    for r in np.linspace(0.05, math.pi / 2, 10):
        bound = bishop_upper(n, 1.0, 1.0, r)
        assert bound.exact <= bound.relaxed * (1 + 1e-10)


# --- the Ricci-curvature box bound -----------------------------------------

def test_hyouka_needs_larger_target_dimension():
    with pytest.raises(UnsupportedError):
        hyouka_max_c(5, 5, 1.0, 1.0)
    with pytest.raises(UnsupportedError):
        hyouka_max_c(6, 3, 1.0, 1.0)


def test_hyouka_sphere_example():
    c = hyouka_max_c(2, 10, 1.0, 1.0)
    assert 0.33 <= c <= 0.36
    log_k = hyouka_log_constant(2, 10, 1.0, 1.0)
    assert 8 * math.log(c) <= math.log1p(-c) + log_k + 1e-9
    above = c + 1e-9
    assert 8 * math.log(above) > math.log1p(-above) + log_k


def test_hyouka_one_step_solution():
    # With n - m = 1 the crossing solves c = (1 - c) K
    base = hyouka_log_constant(1, 2, 1.0, 1.0)
    a_N = 3.0 * math.exp(-base)
    assert hyouka_max_c(1, 2, 1.0, a_N) == pytest.approx(0.75, abs=1e-12)


def test_hyouka_curvature_cap_binds():
    assert hyouka_max_c(2, 3, 100.0, 1.0) == pytest.approx(math.pi / 10)


def test_hyouka_grows_with_target_dimension():
    values = [hyouka_max_c(2, n, 1.0, 1.0) for n in range(3, 53)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] < 0.5


# --- complex projective space and SO(n) ------------------------------------

def test_cp_facts():
    assert cp_facts(1).volume == pytest.approx(math.pi, rel=1e-12)
    assert cp_facts(1).a_cp == pytest.approx(0.25, rel=1e-12)
    assert cp_facts(2).volume == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    for n in range(1, 11):
        facts = cp_facts(n)
        assert facts.a_cp == pytest.approx(facts.volume / sphere_total_volume(2 * n), rel=1e-12)
        assert facts.diameter == pytest.approx(math.pi / 2)
        assert facts.sectional_lower == 1.0


def test_so_diameter():
    assert so_diameter(2) == pytest.approx(2 * math.sqrt(2))
    assert so_diameter(3) == pytest.approx(2 * math.sqrt(2))
    assert so_diameter(4) == pytest.approx(4.0)
    for n in range(2, 51):
        assert so_diameter(n) == 2 * math.sqrt(n if n % 2 == 0 else n - 1)
    with pytest.raises(DomainError):
        so_diameter(1)


def test_so_geodesic_distance_of_plane_rotation():
    theta = 0.7
    rotation = np.array([
        [math.cos(theta), -math.sin(theta), 0.0],
        [math.sin(theta), math.cos(theta), 0.0],
        [0.0, 0.0, 1.0],
    ])
    assert so_geodesic_distance(np.eye(3), rotation) == pytest.approx(math.sqrt(2) * theta)
    with pytest.raises(DimensionError):
        so_geodesic_distance(np.eye(3), np.eye(2))


def test_model_specs():
    sphere = model_spec("sphere", 5)
    assert sphere.a_N == 1.0
    assert sphere.ricci_lower == 4.0
    assert sphere.kappa1 == 1.0
    assert sphere.diameter_homogeneous

    cp = model_spec("cp", 3)
    assert cp.dimension == 6
    assert cp.a_N == pytest.approx(cp_facts(3).a_cp, rel=1e-12)
    assert not cp.diameter_homogeneous

    so = model_spec("so", 2)
    assert so.total_volume == pytest.approx(2 * math.pi * math.sqrt(2), rel=1e-12)
    assert model_spec("so", 5).ricci_lower == 1.0
    assert model_spec("so", 5).diameter == so_diameter(5)

    cube = model_spec("hamming", 8)
    assert cube.total_volume == pytest.approx(256.0)
    assert cube.diameter == 1.0
    assert cube.kappa1 is None

    with pytest.raises(DomainError):
        model_spec("torus", 2)


# --- asymptotic families ---------------------------------------------------

def test_asobisugi_bound():
    assert asobisugi_bound(4, 3) == 0.5
    assert asobisugi_bound(3, 2) == 0.0
    assert asobisugi_bound(10, 4) == 0.5
    assert asobisugi_bound(6, 6) == 0.0


def test_kaotan_constant():
    assert kaotan_constant(1, 1, 1) == pytest.approx(1 / (2 * math.pi), rel=1e-12)
    assert kaotan_constant(1, 1, 1e6) == pytest.approx(1.0, abs=1e-5)
    assert kaotan_constant(2, 3, 1) == kaotan_constant(3, 2, 1)
    with pytest.raises(DomainError):
        kaotan_constant(0, 1, 1)


def test_kaotan_finite_k_converges_to_branch_limit():
    thresholds = {k: kaotan_finite_k(2 * k, k, 2, 1, 1, k).threshold for k in (10, 100, 1000)}
    limit = kaotan_branch_limit(2, 1, 1)
    assert 0.0 < thresholds[10] < 1.0
    assert thresholds[100] < thresholds[1000]
    assert abs(thresholds[1000] - limit) <= 0.05 * limit
    for value in thresholds.values():
        assert value >= kaotan_constant(2, 1, 1)


def test_kaotan_finite_k_threshold_checks():
    base = kaotan_finite_k(20, 10, 2, 1, 1, 10)
    assert base.c_probe == 0.0
    assert kaotan_finite_k(20, 10, 2, 1, 1, 10, c_probe=0.5 * base.threshold).threshold < base.threshold
    with pytest.raises(PreconditionError):
        kaotan_finite_k(20, 10, 2, 1, 1, 10, c_probe=0.5)
    with pytest.raises(PreconditionError):
        kaotan_finite_k(30, 10, 2, 1, 1, 10)
    with pytest.raises(DomainError):
        kaotan_finite_k(20, 10, 2, 1, 1, 10, c_probe=1.0)
    assert 0.0 < kaotan_finite_k(20, 10, 2, 1, 1, 10, family="cp").threshold < 1.0


@pytest.mark.parametrize("k", [10, 100])
def test_value_below_threshold_is_a_sphere_lower_bound(k):
    c = 0.5 * kaotan_finite_k(2 * k, k, 2, 1, 1, k).threshold
    result = kaotan_finite_k(2 * k, k, 2, 1, 1, k, c_probe=c)
    assert result.c_probe == c
    assert c <= hyouka_max_c(k, 2 * k, 1.0, 1.0) + 1e-12


def test_oosawa_constant():
    assert oosawa_constant(1, 1, 1) == 0.5
    assert oosawa_constant(4, 1, 0) == 0.0
    assert oosawa_constant(4, 9, 1) == pytest.approx(0.2)


def test_oosawa_finite_k_chain():
    chain = oosawa_finite_k(100, 25, 4, 1, 1, 25)
    assert chain.chain == pytest.approx(148 / (math.sqrt(99) + 5))
    assert chain.bound == 0.5
    assert chain.diameter_gap >= chain.chain
    with pytest.raises(PreconditionError):
        oosawa_finite_k(26, 25, 4, 1, 2, 25)


@pytest.mark.parametrize(
    "n_k, m_k, C1, C2, C3, k",
    [
        (100, 25, 4, 1, 1, 25),
        (30, 25, 2, 1, 1, 25),
        (9, 3, 1, 1, 2, 9),
        (50, 40, 1, 1, 1, 64),
        (12, 2, 3, 1, 0.5, 4),
    ],
)
def test_oosawa_chain_dominates_scaled_chain(n_k, m_k, C1, C2, C3, k):
    chain = oosawa_finite_k(n_k, m_k, C1, C2, C3, k)
    assert chain.chain >= chain.scaled_chain
    assert chain.diameter_gap >= chain.chain
    assert chain.bound == min(0.5, chain.chain)


def test_hamming_distance():
    assert hamming_distance([0, 1, 1, 0], [0, 1, 1, 0]) == 0.0
    assert hamming_distance([0, 1, 1, 0], [1, 1, 0, 0]) == 0.5
    with pytest.raises(DimensionError):
        hamming_distance([0, 1], [0, 1, 1])
