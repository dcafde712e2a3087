"""Exact integer linear algebra on sparse vectors (dicts ``{index: int}``).

Python integers throughout, so no overflow.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _axpy(y: dict, x: dict, c: int) -> None:
    """y += c * x, in place, dropping zeros."""
    if not c:
        return
    for k, v in x.items():
        s = y.get(k, 0) + c * v
        if s:
            y[k] = s
        else:
            del y[k]


def _comb(u: dict, v: dict, a: int, b: int) -> dict:
    out = {}
    if a:
        for k, x in u.items():
            out[k] = a * x
    if b:
        for k, x in v.items():
            s = out.get(k, 0) + b * x
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


class EchelonLattice:
    """Integer lattice kept in echelon form: one basis vector per pivot index.

    The pivot of a vector is its largest index. Inserting a vector reduces it
    against the basis; when two vectors share a pivot they are replaced by a
    unimodular (gcd) combination. With ``track=True`` every basis vector carries
    the combination of inserted vectors that produced it, so inserting the
    columns of a matrix yields its kernel as the transforms of vectors that
    reduce to zero.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[int, dict] = {}
        self.trans: dict[int, dict] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def unit_pivots(self) -> bool:
        return all(abs(v[p]) == 1 for p, v in self.pivots.items())

    def insert(self, vec: dict, tr: dict | None = None):
        """Add ``vec``; returns the transform of the zero residual, or None."""
        v = {k: x for k, x in vec.items() if x}
        t = dict(tr) if (self.track and tr is not None) else ({} if self.track else None)
        piv = self.pivots
        while v:
            p = max(v)
            b = piv.get(p)
            if b is None:
                if v[p] < 0:
                    v = {k: -x for k, x in v.items()}
                    if self.track:
                        t = {k: -x for k, x in t.items()}
                piv[p] = v
                if self.track:
                    self.trans[p] = t
                return None
            bp, vp = b[p], v[p]
            if vp % bp == 0:
                q = vp // bp
                _axpy(v, b, -q)
                if self.track:
                    _axpy(t, self.trans[p], -q)
                continue
            g, x, y = _xgcd(bp, vp)
            nb = _comb(b, v, x, y)
            nv = _comb(b, v, vp // g, -(bp // g))
            piv[p] = nb
            if self.track:
                tb = self.trans[p]
                self.trans[p] = _comb(tb, t, x, y)
                t = _comb(tb, t, vp // g, -(bp // g))
            v = nv
        return t if self.track else {}

    def reduce(self, vec: dict) -> dict:
        """Residual of ``vec`` after exact division by pivots, high to low."""
        v = {k: x for k, x in vec.items() if x}
        while v:
            p = max(v)
            b = self.pivots.get(p)
            if b is None or v[p] % b[p]:
                return v
            _axpy(v, b, -(v[p] // b[p]))
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def canonical(self, vec: dict) -> dict:
        """Canonical coset representative of ``vec`` modulo the lattice."""
        v = {k: x for k, x in vec.items() if x}
        out = {}
        while v:
            p = max(v)
            b = self.pivots.get(p)
            if b is None:
                out[p] = v.pop(p)
                continue
            _axpy(v, b, -(v[p] // b[p]))
            if p in v:
                out[p] = v.pop(p)
        return out

    def basis(self) -> list[dict]:
        return [self.pivots[p] for p in sorted(self.pivots)]

    def solve(self, vec: dict) -> dict | None:
        """Coordinates ``{i: c}`` of ``vec`` in ``basis()`` order, or None if not a member."""
        order = {p: i for i, p in enumerate(sorted(self.pivots))}
        v = {k: x for k, x in vec.items() if x}
        out = {}
        while v:
            p = max(v)
            b = self.pivots.get(p)
            if b is None or v[p] % b[p]:
                return None
            q = v[p] // b[p]
            out[order[p]] = q
            _axpy(v, b, -q)
        return out


def kernel_basis(columns: Iterable[dict]) -> tuple[list[dict], EchelonLattice]:
    """Kernel basis (as column combinations) and the image lattice of a matrix."""
    lat = EchelonLattice(track=True)
    ker = []
    for j, col in enumerate(columns):
        t = lat.insert(col, {j: 1})
        if t is not None:
            ker.append(t)
    return ker, lat


def image_lattice(columns: Iterable[dict], stop_rank: int | None = None) -> EchelonLattice:
    """Echelon basis of the column lattice.

    If ``stop_rank`` is given, stop once the lattice has that rank with unit
    pivots: it is then saturated, hence equal to any lattice of that rank
    containing it.
    """
    lat = EchelonLattice()
    for col in columns:
        lat.insert(col)
        if stop_rank is not None and lat.rank == stop_rank and lat.unit_pivots():
            break
    return lat


# -- Smith normal form ---------------------------------------------------------

class _SparseSmith:
    """Diagonalize a sparse integer matrix by tracked unimodular row/column ops.

    Tracks U (rows), U^-1 (columns) and V (columns) so that U M V = S.
    """

    def __init__(self, rows: dict, nrows: int, ncols: int, track_u=True, track_v=True):
        self.nrows, self.ncols = nrows, ncols
        self.R = {i: dict(r) for i, r in rows.items() if r}
        self.C: dict[int, dict] = {}
        for i, r in self.R.items():
            for j, x in r.items():
                self.C.setdefault(j, {})[i] = x
        self.track_u, self.track_v = track_u, track_v
        self.U = {i: {i: 1} for i in range(nrows)} if track_u else None
        self.Uinv = {i: {i: 1} for i in range(nrows)} if track_u else None
        self.V = {j: {j: 1} for j in range(ncols)} if track_v else None

    # 2x2 unimodular combinations -------------------------------------------
    def rows2(self, k: int, l: int, a: int, b: int, c: int, d: int) -> None:
        """row_k, row_l <- a row_k + b row_l, c row_k + d row_l."""
        rk, rl = self.R.get(k, {}), self.R.get(l, {})
        nk, nl = _comb(rk, rl, a, b), _comb(rk, rl, c, d)
        for j in set(rk) | set(rl):
            col = self.C[j]
            col.pop(k, None)
            col.pop(l, None)
        for i, r in ((k, nk), (l, nl)):
            if r:
                self.R[i] = r
                for j, x in r.items():
                    self.C.setdefault(j, {})[i] = x
            else:
                self.R.pop(i, None)
        if self.track_u:
            uk, ul = self.U[k], self.U[l]
            self.U[k], self.U[l] = _comb(uk, ul, a, b), _comb(uk, ul, c, d)
            det = a * d - b * c
            # U^-1 <- U^-1 E^-1, E^-1 = det * [[d, -b], [-c, a]]
            ik, il = self.Uinv[k], self.Uinv[l]
            self.Uinv[k], self.Uinv[l] = _comb(ik, il, det * d, -det * c), _comb(ik, il, -det * b, det * a)

    def cols2(self, k: int, l: int, a: int, b: int, c: int, d: int) -> None:
        """col_k, col_l <- a col_k + b col_l, c col_k + d col_l."""
        ck, cl = self.C.get(k, {}), self.C.get(l, {})
        nk, nl = _comb(ck, cl, a, b), _comb(ck, cl, c, d)
        for i in set(ck) | set(cl):
            row = self.R[i]
            row.pop(k, None)
            row.pop(l, None)
        for j, c_ in ((k, nk), (l, nl)):
            if c_:
                self.C[j] = c_
                for i, x in c_.items():
                    self.R.setdefault(i, {})[j] = x
            else:
                self.C.pop(j, None)
        for i in [i for i, r in self.R.items() if not r]:
            del self.R[i]
        if self.track_v:
            vk, vl = self.V[k], self.V[l]
            self.V[k], self.V[l] = _comb(vk, vl, a, b), _comb(vk, vl, c, d)

    def _pick(self, rows_active, cols_active):
        best = None
        for i in sorted(self.R):
            if i not in rows_active:
                continue
            for j, x in self.R[i].items():
                if j in cols_active:
                    key = (abs(x), i, j)
                    if best is None or key < best:
                        best = key
                        if key[0] == 1:
                            break
            if best is not None and best[0] == 1:
                break
        return best

    def run(self) -> list[tuple[int, int, int]]:
        rows_active = set(range(self.nrows))
        cols_active = set(range(self.ncols))
        diag = []
        while True:
            best = self._pick(rows_active, cols_active)
            if best is None:
                break
            _, i, j = best
            while True:
                v = self.R[i][j]
                dirty = False
                for k in sorted(self.C.get(j, {})):
                    if k == i:
                        continue
                    q = self.C[j][k] // v
                    if q:
                        self.rows2(k, i, 1, -q, 0, 1)
                    if self.C.get(j, {}).get(k):
                        dirty = True
                if dirty:
                    k = min((abs(x), k) for k, x in self.C[j].items() if k != i)[1]
                    i = k
                    continue
                v = self.R[i][j]
                for l in sorted(self.R.get(i, {})):
                    if l == j:
                        continue
                    q = self.R[i][l] // v
                    if q:
                        self.cols2(l, j, 1, -q, 0, 1)
                    if self.R.get(i, {}).get(l):
                        dirty = True
                if dirty:
                    l = min((abs(x), l) for l, x in self.R[i].items() if l != j)[1]
                    j = l
                    continue
                break
            diag.append([i, j, self.R[i][j]])
            rows_active.discard(i)
            cols_active.discard(j)
        # divisibility chain d_1 | d_2 | ...
        for a in range(len(diag)):
            for b in range(a + 1, len(diag)):
                (i1, j1, x), (i2, j2, y) = diag[a], diag[b]
                if y % x == 0:
                    continue
                g, s, t = _xgcd(x, y)
                self.rows2(i1, i2, s, t, -y // g, x // g)
                self.cols2(j1, j2, 1, 1, -t * y // g, s * x // g)
                diag[a][2], diag[b][2] = self.R[i1][j1], self.R[i2][j2]
        for entry in diag:
            i, j, x = entry
            if x < 0:
                self._neg_row(i)
                entry[2] = -x
        return [tuple(e) for e in diag]

    def _neg_row(self, i: int) -> None:
        r = self.R.get(i, {})
        for j in r:
            r[j] = -r[j]
            self.C[j][i] = -self.C[j][i]
        if self.track_u:
            self.U[i] = {k: -x for k, x in self.U[i].items()}
            self.Uinv[i] = {k: -x for k, x in self.Uinv[i].items()}


@dataclass
class SmithDecomposition:
    S: list[list[int]]
    U: list[list[int]]
    V: list[list[int]]
    divisors: list[int]


def smith_normal_form(M: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form with unimodular U, V such that U M V = S.

    Pivoting is deterministic: smallest nonzero magnitude, ties by position.
    ``divisors`` lists the diagonal d_1 | d_2 | ... (zeros included up to min(m, n)).
    """
    m = len(M)
    n = len(M[0]) if m else 0
    rows = {i: {j: int(x) for j, x in enumerate(M[i]) if x} for i in range(m)}
    eng = _SparseSmith(rows, m, n)
    diag = eng.run()
    row_order = [i for i, _, _ in diag] + [i for i in range(m) if i not in {d[0] for d in diag}]
    col_order = [j for _, j, _ in diag] + [j for j in range(n) if j not in {d[1] for d in diag}]
    U = [[eng.U[i].get(k, 0) for k in range(m)] for i in row_order]
    V = [[eng.V[j].get(k, 0) for j in col_order] for k in range(n)]
    divisors = [x for _, _, x in diag] + [0] * (min(m, n) - len(diag))
    S = [[0] * n for _ in range(m)]
    for k, x in enumerate(divisors):
        S[k][k] = x
    return SmithDecomposition(S, U, V, divisors)


@dataclass
class SmithReduction:
    """Result of diagonalizing a sparse matrix (used by the homology engine)."""
    divisors: list[int]          # nonzero diagonal, d_1 | d_2 | ...
    row_order: list[int]         # new position k <- old pivot row row_order[k]
    U: dict                      # old row index -> sparse row of U
    Uinv: dict                   # old row index -> sparse column of U^-1


def smith_reduce(rows: dict, nrows: int, ncols: int) -> SmithReduction:
    eng = _SparseSmith(rows, nrows, ncols, track_u=True, track_v=False)
    diag = eng.run()
    used = {i for i, _, _ in diag}
    order = [i for i, _, _ in diag] + [i for i in range(nrows) if i not in used]
    return SmithReduction([x for _, _, x in diag], order, eng.U, eng.Uinv)


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    inner = len(B)
    cols = len(B[0]) if inner else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
