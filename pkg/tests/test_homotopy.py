import pytest

import dhom.homotopy as hom
from dhom.constructions import cycle, path, torus_grid, wedge
from dhom.homology import homology
from dhom.homotopy import (HomotopyMatrixCertificate, MapHomotopyCertificate, RLoop,
                           abelianized_A1_oracle, dominated_vertices, hurewicz_phi,
                           loop_from_json, loop_homotopy_search, loop_to_json, oracle_move_check,
                           phi_class, retraction_certificate, surjectivity_witness,
                           verify_certificate)
from dhom.cubes import CubeComplex


def test_loop_checks():
    X = cycle(5)
    assert RLoop((0, 1, 2, 3, 4, 0), 1).check(X)
    bad = RLoop((0, 2, 0), 1).check(X)
    assert not bad and bad.witness["pair"] == ["0", "2"]
    assert not RLoop((0, 1), 1).check(X)
    loop = RLoop((0, 1, 0), 1)
    assert (loop * loop).points == (0, 1, 0, 0, 1, 0)
    assert loop_from_json(loop_to_json(loop, X), X) == loop


def test_c4_loop_contracts_with_certificate():
    X = cycle(4)
    a = RLoop((0, 1, 2, 3, 0), 1)
    b = RLoop((0,), 1)
    cert = loop_homotopy_search(X, 1, a, b, max_len=6, max_height=4)
    assert cert is not None
    assert cert.verify(X, a, b)
    data = cert.to_json(X)
    assert HomotopyMatrixCertificate.from_json(data, X).verify(X, a, b)


def test_c5_loop_does_not_contract():
    X = cycle(5)
    a = RLoop((0, 1, 2, 3, 4, 0), 1)
    assert loop_homotopy_search(X, 1, a, RLoop((0,), 1), max_len=6, max_height=6) is None


def test_matrix_certificate_rejects_jumps():
    X = cycle(5)
    cert = HomotopyMatrixCertificate([(0, 1, 2, 3, 4, 0), (0, 0, 0, 0, 0, 0)], 1)
    v = cert.verify(X)
    assert not v and "column" in v.witness


def test_phi_and_classes():
    X = cycle(5)
    H = homology(X, 1, 1)
    loop = RLoop((0, 1, 2, 3, 4, 0), 1)
    assert len(hurewicz_phi(loop, H.view.cx).coeffs) == 5
    c = phi_class(loop, H)
    assert abs(c[0]) == 1
    assert phi_class(loop * loop, H) == (2 * c[0],)
    assert phi_class(loop.reversed(), H) == (-c[0],)
    assert phi_class(RLoop((0, 1, 1, 0), 1), H) == (0,)


def test_surjectivity_witnesses():
    H = homology(torus_grid(5, 5), 1, 1)
    wit = surjectivity_witness(H)
    assert len(wit) == 2 and all(ok for _, ok in wit)
    for loop, _ in wit:
        assert loop.check(H.X)


def test_oracle_examples():
    assert str(abelianized_A1_oracle(cycle(5), 1).group) == "Z"
    assert str(abelianized_A1_oracle(cycle(4), 1).group) == "0"
    assert str(abelianized_A1_oracle(torus_grid(5, 5), 1).group) == "Z^2"
    assert str(abelianized_A1_oracle(wedge([cycle(5), cycle(7)]), 1).group) == "Z^2"
    with pytest.raises(ValueError):
        abelianized_A1_oracle(cycle(5).subspace([0, 2]), 1)


def test_oracle_move_check_passes():
    for X in (cycle(4), cycle(5), path(3)):
        assert oracle_move_check(X, 1, 0, max_len=6).ok


def test_oracle_without_squares_is_caught(monkeypatch):
    real = hom._square_cycles
    monkeypatch.setattr(hom, "_square_cycles", lambda G: [w for w in real(G) if len(w) == 3])
    res = oracle_move_check(cycle(4), 1, 0, max_len=6)
    assert not res.ok
    assert res.counterexample["top"][0] == "0"


def test_map_certificates():
    X = path(4)
    assert dominated_vertices(X) == [(0, 1), (3, 2)]
    rho, cert = retraction_certificate(X, 3, 2)
    assert rho == [0, 1, 2, 2]
    assert verify_certificate(cert, X, f=list(range(4)), g=rho)
    assert not verify_certificate(cert, X, g=list(range(4)))
    back = MapHomotopyCertificate.from_json(cert.to_json(X, X), X, X)
    assert back == cert
    jump = MapHomotopyCertificate([(0, 1, 2, 3), (3, 1, 2, 3)])
    v = jump.verify(X, X)
    assert not v and v.witness["pair"]
