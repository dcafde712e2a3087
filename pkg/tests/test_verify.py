import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dhom.constructions import cycle, path
from dhom.homotopy import retraction_certificate
from dhom.verify import (CoverError, GroupMap, axiom_suite, boundary_law_check, check_exact,
                         excision_check, homotopy_axiom_check, is_discrete_cover, is_isomorphism,
                         mayer_vietoris_check, pair_les_check)

C6_A = ["5", "0", "1", "2", "3"]
C6_B = ["2", "3", "4", "5", "0"]


def test_exactness_basic():
    Z = (0,)
    ident = GroupMap([[1]], Z, Z)
    zero = GroupMap([[0]], Z, Z)
    assert check_exact(zero, ident).exact
    assert not check_exact(ident, ident).exact
    two = GroupMap([[2]], Z, Z)
    mod2 = GroupMap([[1]], Z, (2,))
    assert check_exact(two, mod2).exact
    assert not check_exact(GroupMap([[3]], Z, Z), mod2).exact
    assert is_isomorphism(ident)
    assert not is_isomorphism(two)
    assert is_isomorphism(GroupMap([[2, 1], [1, 1]], (0, 0), (0, 0)))


def _elements(m, k):
    return list(itertools.product(range(m), repeat=k))


def _apply(M, v, m):
    return tuple(sum(a * x for a, x in zip(row, v)) % m for row in M)


dims = st.integers(0, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 6]), dims, dims, dims, st.data())
def test_exactness_matches_enumeration(m, a, b, c, data):
    ent = st.integers(0, m - 1)
    F = [data.draw(st.lists(ent, min_size=a, max_size=a)) for _ in range(b)]
    G = [data.draw(st.lists(ent, min_size=b, max_size=b)) for _ in range(c)]
    f = GroupMap(F, (m,) * a, (m,) * b)
    g = GroupMap(G, (m,) * b, (m,) * c)
    image = {_apply(F, v, m) if b else () for v in _elements(m, a)}
    kernel = {w for w in _elements(m, b) if not any(_apply(G, w, m))}
    assert check_exact(f, g).exact == (image == kernel)


def test_c5_split_is_not_a_cover():
    X = cycle(5)
    rep = is_discrete_cover(X, [["0"], ["1", "2", "3", "4"]], 1, 1)
    assert not rep.ok
    assert rep.first_failure == 1
    assert set(rep.witness()["cube"]) in ({"0", "1"}, {"0", "4"})


def test_cover_must_exhaust():
    with pytest.raises(CoverError):
        is_discrete_cover(cycle(5), [["0"], ["1"]], 1, 1)


def test_c6_mayer_vietoris():
    rep = mayer_vietoris_check(cycle(6), C6_A, C6_B, 1, 2, cover_dim=2)
    assert rep.ok and len(rep.nodes) == 9
    conn = rep.maps["conn_1"]
    assert len(conn.src) == 1 and any(conn.matrix[i][0] for i in range(len(conn.tgt)))


def test_mv_refuses_bad_cover():
    rep = mayer_vietoris_check(cycle(5), ["0"], ["1", "2", "3", "4"], 1, 1)
    assert rep.refused and not rep.ok
    assert rep.cover.witness() is not None


def test_pair_les_and_excision():
    X = cycle(6)
    assert pair_les_check(X, C6_A, 1, 2).ok
    ex = excision_check(X, C6_A, C6_B, 1, 2, cover_dim=2)
    assert ex.ok and [d["iso"] for d in ex.degrees] == [True, True, True]


def test_homotopy_axiom_on_pendant_fold():
    X = path(4)
    rho, cert = retraction_certificate(X, 3, 2)
    rep = homotopy_axiom_check(X, X, cert, 1, 2, A=["0"])
    assert rep.ok and rep.relative == [True, True, True]


def test_homotopy_axiom_rejects_bad_certificate():
    X = cycle(6)
    _, cert = retraction_certificate(X, 0, 3)
    rep = homotopy_axiom_check(X, X, cert, 1, 1)
    assert not rep.certificate_ok and rep.witness is not None


def test_boundary_law_and_suite():
    assert all(d["zero"] for d in boundary_law_check(cycle(5), 2, 3))
    rho, cert = retraction_certificate(path(4), 3, 2)
    suite = axiom_suite(path(4), ["0"], 1, 2, certificates=[(path(4), cert)])
    assert suite.ok and suite.dimension == [True, True]
