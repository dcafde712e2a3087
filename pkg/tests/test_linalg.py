import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from hypothesis import given, settings, strategies as st

from dhom.linalg import (EchelonLattice, determinant, image_lattice, kernel_basis, matmul,
                         smith_normal_form)


def _sympy_invariants(M):
    S = sympy_snf(sympy.Matrix(M), domain=sympy.ZZ)
    return sorted(abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_smith_matches_sympy(M):
    snf = smith_normal_form(M)
    got = sorted(d for d in snf.divisors if d)
    assert got == _sympy_invariants(M)
    nz = [d for d in snf.divisors if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_is_kernel(M):
    cols = [{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(len(M[0]))]
    ker, lat = kernel_basis(cols)
    for v in ker:
        img = [sum(M[i][j] * v.get(j, 0) for j in range(len(cols))) for i in range(len(M))]
        assert not any(img)
    rank = sympy.Matrix(M).rank()
    assert len(ker) == len(cols) - rank
    assert image_lattice(cols).rank == rank


def test_lattice_membership():
    L = EchelonLattice()
    L.insert({0: 2})
    L.insert({0: 1, 1: 3})
    assert L.contains({0: 3, 1: 3})
    assert not L.contains({1: 1})
    assert L.contains({1: 6})


def test_determinant_and_matmul():
    A = [[2, 1], [1, 1]]
    assert determinant(A) == 1
    assert matmul(A, [[1, -1], [-1, 2]]) == [[1, 0], [0, 1]]
