import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from dhom.constructions import cycle, path, point, torus_grid, two_point_extended, wedge
from dhom.cubes import CubeMap, boundary_of_cube, brute_force_cubes
from dhom.homology import (AbelianGroup, LipschitzError, compose, homology, induced_map)
from dhom.metric import from_edges


def brute_homology(X, r, n):
    """Dense sympy computation from brute-force cubes and cubewise boundaries."""
    cubes = {k: brute_force_cubes(X, r, k) for k in (n - 1, n, n + 1) if k >= 0}

    def dmat(k):
        if k <= 0 or k not in cubes or k - 1 not in cubes:
            return None
        rows = {c: i for i, c in enumerate(cubes[k - 1])}
        M = [[0] * len(cubes[k]) for _ in cubes[k - 1]]
        for j, c in enumerate(cubes[k]):
            for f, x in boundary_of_cube(CubeMap(k, c)).items():
                M[rows[f.verts]][j] += x
        return Matrix(M) if M and cubes[k] else None

    dim = len(cubes[n])
    dn, dn1 = dmat(n), dmat(n + 1)
    rank_n = dn.rank() if dn is not None else 0
    if dn1 is None:
        return AbelianGroup(dim - rank_n, ())
    S = smith_normal_form(dn1, domain=ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    return AbelianGroup(dim - rank_n - len(diag), tuple(d for d in diag if d > 1))


def test_group_strings():
    assert str(AbelianGroup(0, ())) == "0"
    assert str(AbelianGroup(1, ())) == "Z"
    assert str(AbelianGroup(2, (2,))) == "Z^2 + Z/2"
    assert AbelianGroup(1, (3,)).annihilators == (3, 0)
    assert AbelianGroup(1, (3,)).reduce((7, 5)) == (1, 5)


def test_cycles():
    assert str(homology(cycle(3), 1, 1).group) == "0"
    assert str(homology(cycle(4), 1, 1).group) == "0"
    assert str(homology(cycle(5), 1, 1).group) == "Z"
    assert str(homology(cycle(6), 1, 1).group) == "Z"
    assert str(homology(cycle(6), 2, 1).group) == "0"
    assert str(homology(cycle(5), 1, 0).group) == "Z"


def test_point_and_two_points():
    for n in range(1, 4):
        assert homology(point(), 1, n).group.trivial
    assert str(homology(two_point_extended(), 1, 0).group) == "Z^2"
    assert str(homology(two_point_extended(), 1, 0, "reduced").group) == "Z"
    assert homology(cycle(5), 1, 0, "reduced").group.trivial


def test_relative_empty_is_absolute():
    X = cycle(6)
    for n in range(3):
        assert homology(X, 1, n, "relative", A=[]).group == homology(X, 1, n).group


def test_relative_pair():
    X = path(4)
    H = homology(X, 1, 1, "relative", A=["0", "3"])
    assert str(H.group) == "Z"


def test_torus_and_wedge():
    assert str(homology(torus_grid(5, 5), 1, 1).group) == "Z^2"
    assert str(homology(wedge([cycle(5), cycle(6)]), 1, 1).group) == "Z^2"


graphs = st.integers(3, 5).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                       .filter(lambda e: e[0] != e[1]), max_size=2 * n)
    .map(lambda es: from_edges(es + [(i, i + 1) for i in range(n - 1)],
                               labels=[str(i) for i in range(n)])))


@settings(max_examples=25, deadline=None)
@given(graphs)
def test_matches_dense_oracle(X):
    for n in (0, 1):
        assert homology(X, 1, n).group == brute_homology(X, 1, n)


def test_cycle_reps_are_cycles_and_generate():
    H = homology(torus_grid(5, 5), 1, 1)
    assert len(H.cycle_reps) == 2
    assert H.coordinates(H.cycle_reps[0]) == (1, 0)
    assert H.coordinates(H.cycle_reps[1]) == (0, 1)
    twice = {k: 2 * v for k, v in H.cycle_reps[0].items()}
    assert H.coordinates(twice) == (2, 0)


def test_induced_identity_and_inclusion():
    X = cycle(5)
    m = induced_map(list(range(5)), X, X, 1, 1)
    assert m.matrix == [[1]]
    up = induced_map(list(range(5)), X, X, 1, 1, k=2)
    assert up.shape == (0, 1)


def test_constant_map_is_zero():
    X = cycle(6)
    m = induced_map([0] * 6, X, X, 1, 1)
    assert m.matrix == [[0]]


def test_functoriality_of_rotation():
    X = cycle(6)
    rot = [(i + 1) % 6 for i in range(6)]
    f = induced_map(rot, X, X, 1, 1)
    g = induced_map(rot, X, X, 1, 1)
    gf = induced_map([rot[rot[i]] for i in range(6)], X, X, 1, 1)
    assert compose(g, f) == gf.matrix
    refl = induced_map([(-i) % 6 for i in range(6)], X, X, 1, 1)
    assert refl.matrix == [[-1]]


def test_lipschitz_witness():
    X = cycle(6)
    with pytest.raises(LipschitzError) as exc:
        induced_map([0, 3, 0, 3, 0, 3], X, X, 1, 1)
    assert exc.value.witness == ("0", "1")
