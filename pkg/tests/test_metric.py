from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dhom.metric import (INF, MetricError, as_distance, as_scale, connectivity_threshold,
                         critical_scales, disjoint_union, from_edges, from_matrix, from_points,
                         is_connected_at_scale, product_with_interval, quotient)


def test_as_distance_exact():
    assert as_distance("0.1") == Fraction(1, 10)
    assert as_distance("3/2") == Fraction(3, 2)
    assert as_distance("inf") == INF
    with pytest.raises(MetricError):
        as_distance("-1")
    with pytest.raises(MetricError):
        as_scale(0)


def test_matrix_validation():
    with pytest.raises(MetricError, match="triangle"):
        from_matrix("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(MetricError, match="asymmetric"):
        from_matrix("ab", [[0, 1], [2, 0]])
    with pytest.raises(MetricError, match="distance 0"):
        from_matrix("ab", [[0, 0], [0, 0]])
    with pytest.raises(MetricError, match="duplicate"):
        from_matrix("aa", [[0, 1], [1, 0]])


def test_infinite_distances_allowed():
    X = from_matrix("ab", [[0, "inf"], ["inf", 0]])
    assert X.d(0, 1) == INF
    assert not is_connected_at_scale(X, 100)
    assert connectivity_threshold(X) == INF


def test_edges_shortest_path():
    X = from_edges([("a", "b"), ("b", "c", "2")])
    assert X.d(X.index("a"), X.index("c")) == 3
    assert critical_scales(X) == [1, 2, 3]
    assert X.diameter == 3


def test_points_l2_rounds_up():
    X = from_points(["o", "p"], [["0", "0"], ["1", "1"]], p="2", precision="0.001")
    assert X.d(0, 1) == Fraction(1415, 1000)
    X1 = from_points(["o", "p"], [["0", "0"], ["1", "1"]], p="1")
    assert X1.d(0, 1) == 2
    Xi = from_points(["o", "p"], [["0", "0"], ["1", "3"]], p="inf")
    assert Xi.d(0, 1) == 3


def test_product_with_interval_l1():
    X = from_edges([("a", "b")])
    Y = product_with_interval(X, 2)
    assert len(Y) == 6
    assert Y.d(Y.index("a.0"), Y.index("b.2")) == 3


def test_quotient_and_union():
    X = from_edges([(0, 1), (1, 2), (2, 3)])
    Q = quotient(X, [[0, 3]], names=["*"])
    assert len(Q) == 3
    assert Q.d(Q.index("*"), Q.index("1")) == 1
    assert Q.d(Q.index("1"), Q.index("2")) == 1
    U = disjoint_union(X, X)
    assert len(U) == 8 and U.d(0, 4) == INF


def _random_space(draw_weights, n):
    edges = [(i, i + 1, w) for i, w in zip(range(n - 1), draw_weights)]
    return from_edges(edges)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=6))
def test_critical_scales_are_pairwise_distances(ws):
    X = _random_space(ws, len(ws) + 1)
    brute = sorted({X.d(i, j) for i in range(len(X)) for j in range(i + 1, len(X))})
    assert critical_scales(X) == brute
    assert connectivity_threshold(X) == max(ws)
    for r in brute:
        adj = X.adjacency(r)
        assert all(adj[i, j] == (X.d(i, j) <= r) for i in range(len(X)) for j in range(len(X)))
