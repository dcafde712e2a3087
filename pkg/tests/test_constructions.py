import pytest

from dhom.constructions import (coarse_hawaiian, cycle, fixture, path, point, sphere_space,
                                suspension, torus_grid, two_point_extended, wedge)
from dhom.homology import homology
from dhom.metric import INF, connectivity_threshold


def test_suspension_shape():
    S = suspension(cycle(4))
    Xs = S.space
    assert len(Xs) == 4 * 2 + 2
    assert Xs.d(S.bottom, S.top) == 3
    assert Xs.d(S.bottom, Xs.index("0.1")) == 1
    low, high = S.halves()
    assert S.top not in low and S.bottom not in high


def test_suspension_of_two_points_is_hexagon():
    Xs = suspension(two_point_extended()).space
    assert len(Xs) == 6
    assert str(homology(Xs, 1, 1).group) == "Z"


def test_spheres_sizes():
    assert len(sphere_space(0)) == 2 and sphere_space(0).d(0, 1) == INF
    assert len(sphere_space(1)) == 6
    assert len(sphere_space(2)) == 14


def test_simple_fixtures():
    assert len(point()) == 1
    assert len(path(5)) == 5 and path(5).diameter == 4
    assert len(torus_grid(5, 5)) == 25 and torus_grid(5, 5).diameter == 4
    W = wedge([cycle(5), cycle(6)])
    assert len(W) == 10 and "*" in W.labels


def test_hawaiian():
    X = coarse_hawaiian(2)
    assert X.labels[0] == "o"
    assert len(X) == 1 + 6 + 25
    assert connectivity_threshold(X) <= 1


def test_fixture_parser():
    assert len(fixture("cycle:7")) == 7
    assert len(fixture("torus:3x4")) == 12
    assert len(fixture("suspend:cycle:5")) == 12
    assert len(fixture("wedge:cycle:5+cycle:5")) == 9
    with pytest.raises(ValueError):
        fixture("blob")
    with pytest.raises(ValueError):
        fixture("cycle:2")
