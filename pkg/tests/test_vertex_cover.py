import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings
from hypothesis.extra.numpy import arrays

from src.errors import SizeLimitError
from src.vertex_cover import conflict_adjacency, exact_min_cover, greedy_cover, lp_cover_bound
from tests.oracles import brute_force_cover, draw_weights


def _graph(n, edges):
    adjacency = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adjacency[i, j] = adjacency[j, i] = True
    return adjacency


def _covers(mask, adjacency):
    rows, cols = np.nonzero(np.triu(adjacency, 1))
    return bool(np.all(mask[rows] | mask[cols]))


def test_conflict_adjacency_is_strict():
    gap = np.array([[0.0, 0.5, 1.0], [0.5, 0.0, 0.2], [1.0, 0.2, 0.0]])
    adjacency = conflict_adjacency(gap, 0.5)
    assert adjacency[0, 2] and adjacency[2, 0]
    assert not adjacency[0, 1]
    assert not adjacency.diagonal().any()


def test_triangle_keeps_the_heaviest_vertex():
    cost, mask = exact_min_cover(np.array([1.0, 2.0, 3.0]), _graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert cost == pytest.approx(3.0)
    assert mask.tolist() == [True, True, False]


def test_star_prefers_cheap_leaves():
    adjacency = _graph(4, [(0, 1), (0, 2), (0, 3)])
    cost, mask = exact_min_cover(np.array([5.0, 1.0, 1.0, 1.0]), adjacency)
    assert cost == pytest.approx(3.0)
    assert mask.tolist() == [False, True, True, True]


def test_zero_weight_endpoints_are_free():
    cost, mask = exact_min_cover(np.array([0.0, 5.0, 0.0]), _graph(3, [(0, 1), (1, 2)]))
    assert cost == 0.0
    assert _covers(mask, _graph(3, [(0, 1), (1, 2)]))


def test_empty_graph_needs_no_cover():
    cost, mask = exact_min_cover(np.ones(5), np.zeros((5, 5), dtype=bool))
    assert cost == 0.0
    assert not mask.any()


def test_exact_refuses_large_graphs():
    with pytest.raises(SizeLimitError):
        exact_min_cover(np.ones(17), np.zeros((17, 17), dtype=bool))


def test_lp_relaxation_of_unit_triangle():
    value = lp_cover_bound(np.ones(3), _graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert value == pytest.approx(1.5, abs=1e-7)


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_solvers_agree_with_enumeration(data):
    n = data.draw(st.integers(min_value=1, max_value=10))
    weights = draw_weights(data, n, min_value=0.0, max_value=2.0)
    raw = data.draw(arrays(np.bool_, (n, n)))
    upper = np.triu(raw, 1)
    adjacency = upper | upper.T

    best = brute_force_cover(weights, adjacency)
    cost, mask = exact_min_cover(weights, adjacency)
    assert cost == pytest.approx(best, abs=1e-12)
    assert _covers(mask, adjacency)

    greedy_cost, greedy_mask = greedy_cover(weights, adjacency)
    assert _covers(greedy_mask, adjacency)
    assert greedy_cost >= best - 1e-12

    relaxed = lp_cover_bound(weights, adjacency)
    assert relaxed is not None
    assert relaxed <= best + 1e-7


@pytest.mark.filterwarnings("error")
def test_greedy_cover_with_subnormal_weights():
    tiny = np.nextafter(0.0, 1.0)
    weights = np.array([tiny, 1.0, tiny])
    adjacency = np.array([[False, True, False], [True, False, True], [False, True, False]])
    cost, cover = greedy_cover(weights, adjacency)
    assert cover.tolist() == [True, False, True]
    assert cost < 1e-300
