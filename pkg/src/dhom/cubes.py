"""Singular (n, r)-cubes: enumeration, faces, boundaries and chain complexes.

A cube of dimension n is stored as an array of ``2**n`` point indices. Position
``m`` holds the image of the vertex ``(a_1, ..., a_n)`` of Q_n whose bitmask is
``m = a_1 + 2 a_2 + ... + 2**(n-1) a_n``.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .metric import FiniteMetricSpace, as_scale

DEFAULT_BASIS_CAP = int(os.environ.get("DHOM_CAP_BASIS", 5_000_000))
DEFAULT_MAX_DIM = int(os.environ.get("DHOM_MAX_DIM", 3))


class CapExceeded(RuntimeError):
    """A basis would exceed the configured size or dimension cap."""

    def __init__(self, message: str, count: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.count = count
        self.cap = cap


class ComplexError(RuntimeError):
    """Internal inconsistency between bases (should never happen)."""


class CubeMap(NamedTuple):
    n: int
    verts: tuple

    def is_degenerate(self) -> bool:
        v = np.asarray(self.verts)[None, :]
        return bool(degenerate_mask(v, self.n)[0])

    def is_lipschitz(self, X: FiniteMetricSpace, r) -> bool:
        adj = X.adjacency(r)
        return all(adj[self.verts[m], self.verts[m ^ (1 << b)]]
                   for m in range(1 << self.n) for b in range(self.n))


@dataclass(frozen=True)
class Chain:
    n: int
    coeffs: dict = field(default_factory=dict)  # basis position -> nonzero int

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(self.n, add_sparse(self.coeffs, other.coeffs))

    def __neg__(self) -> "Chain":
        return Chain(self.n, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self.coeffs)


def add_sparse(a: dict, b: dict, c: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + c * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


# -- face index tables ---------------------------------------------------------

def face_masks(n: int, i: int, side: int) -> np.ndarray:
    """Full-cube masks of the (n-1)-face fixing coordinate ``i`` (1-based) to ``side``."""
    if not 1 <= i <= n:
        raise ValueError(f"axis {i} out of range 1..{n}")
    low = (1 << (i - 1)) - 1
    out = []
    for f in range(1 << (n - 1)):
        out.append((f & low) | (side << (i - 1)) | ((f & ~low) << 1))
    return np.array(out, dtype=np.int64)


def degenerate_mask(verts: np.ndarray, n: int) -> np.ndarray:
    """Rows whose front and back faces agree along some axis."""
    deg = np.zeros(len(verts), dtype=bool)
    for i in range(1, n + 1):
        deg |= np.all(verts[:, face_masks(n, i, 0)] == verts[:, face_masks(n, i, 1)], axis=1)
    return deg


def face(sigma: CubeMap, i: int, side: str) -> CubeMap:
    """Front (``A_i``) or back (``B_i``) face along axis ``i``."""
    if sigma.n < 1:
        raise ValueError("0-cubes have no faces")
    s = {"front": 0, "back": 1}[side]
    idx = face_masks(sigma.n, i, s)
    return CubeMap(sigma.n - 1, tuple(sigma.verts[m] for m in idx))


def boundary_terms(n: int):
    """(axis, side, sign) triples of the boundary sum_i (-1)^i (A_i - B_i)."""
    for i in range(1, n + 1):
        sign = -1 if i % 2 else 1
        yield i, 0, sign
        yield i, 1, -sign


def boundary_of_cube(sigma: CubeMap) -> dict:
    """Boundary as ``{face CubeMap: coefficient}`` with degenerate faces dropped."""
    out: dict = {}
    for i, s, sign in boundary_terms(sigma.n):
        f = face(sigma, i, "back" if s else "front")
        if sigma.n - 1 > 0 and f.is_degenerate():
            continue
        out[f] = out.get(f, 0) + sign
        if out[f] == 0:
            del out[f]
    return out


# -- enumeration ---------------------------------------------------------------

def _csr(adj: np.ndarray, support: np.ndarray):
    a = adj & support[None, :] & support[:, None]
    counts = a.sum(axis=1)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    indices = np.nonzero(a)[1]
    return a, counts, indptr, indices


def _extend(rows: np.ndarray, m: int, a, counts, indptr, indices, limit: int | None = None) -> np.ndarray:
    low = m & -m
    parent = m ^ low
    others = [m ^ (1 << b) for b in range(m.bit_length()) if (m >> b) & 1 and (1 << b) != low]
    p = rows[:, parent]
    c = counts[p]
    total = int(c.sum())
    if limit is not None and total > 4 * limit:
        # candidates are materialized before pruning; refuse before allocating them
        raise CapExceeded(f"{total} candidate extensions exceed {4 * limit} (basis cap {limit})",
                          total, limit)
    if total == 0:
        return np.empty((0, rows.shape[1] + 1), dtype=rows.dtype)
    rep = np.repeat(np.arange(len(rows)), c)
    start = np.repeat(indptr[p] - np.concatenate([[0], np.cumsum(c)[:-1]]), c)
    cand = indices[start + np.arange(total)].astype(rows.dtype)
    keep = np.ones(total, dtype=bool)
    for o in others:
        keep &= a[rows[rep, o], cand]
    rep, cand = rep[keep], cand[keep]
    return np.column_stack([rows[rep], cand])


def _enumerate_from(roots: np.ndarray, n: int, a, counts, indptr, indices, cap: int) -> np.ndarray:
    rows = roots.astype(np.int32)[:, None]
    for m in range(1, 1 << n):
        rows = _extend(rows, m, a, counts, indptr, indices, cap)
        if len(rows) > 4 * cap:
            raise CapExceeded(f"partial {n}-cube assignments exceed {4 * cap} (basis cap {cap})",
                              len(rows), cap)
    if n:
        rows = rows[~degenerate_mask(rows, n)]
    return rows


def _worker(args):
    return _enumerate_from(*args)


def enumerate_cube_array(X: FiniteMetricSpace, r, n: int, *, support=None,
                         cap: int = DEFAULT_BASIS_CAP, max_dim: int | None = None,
                         workers: int = 1) -> np.ndarray:
    """All non-degenerate (n, r)-cubes with image in ``support``, lexicographically sorted.

    Backtracking over vertex masks in increasing order; each new vertex is drawn
    from the r-ball of an assigned neighbour and checked against the other
    assigned neighbours, so partial assignments violating the edge condition are
    pruned immediately. The output is in canonical (lexicographic) order
    because rows and candidates are both produced in increasing order.
    """
    if n < 0:
        raise ValueError("dimension must be >= 0")
    if max_dim is not None and n > max_dim:
        raise CapExceeded(f"dimension {n} exceeds cap {max_dim}")
    N = len(X)
    support = np.ones(N, dtype=bool) if support is None else np.asarray(support, dtype=bool)
    a, counts, indptr, indices = _csr(X.adjacency(r), support)
    roots = np.flatnonzero(support)
    if workers > 1 and len(roots) > 1 and n > 0:
        chunks = [c for c in np.array_split(roots, workers) if len(c)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_worker, [(c, n, a, counts, indptr, indices, cap) for c in chunks]))
        rows = np.concatenate(parts) if parts else np.empty((0, 1 << n), dtype=np.int32)
    else:
        rows = _enumerate_from(roots, n, a, counts, indptr, indices, cap)
    if len(rows) > cap:
        raise CapExceeded(f"{len(rows)} non-degenerate {n}-cubes exceed basis cap {cap}", len(rows), cap)
    rows.setflags(write=False)
    return rows


def _keys(verts: np.ndarray) -> np.ndarray:
    v = np.ascontiguousarray(verts.astype(">u2"))
    return v.view(np.dtype((np.void, 2 * v.shape[1]))).ravel()


class ChainBasis:
    """Ordered non-degenerate (n, r)-cubes of a space (optionally of a subset)."""

    def __init__(self, n: int, r, verts: np.ndarray):
        self.n = n
        self.r = r
        self.verts = verts
        self._keys = None

    def __len__(self) -> int:
        return len(self.verts)

    def __getitem__(self, j: int) -> CubeMap:
        return CubeMap(self.n, tuple(int(v) for v in self.verts[j]))

    @property
    def cubes(self) -> list[CubeMap]:
        return [self[j] for j in range(len(self))]

    def lookup(self, verts: np.ndarray) -> np.ndarray:
        """Positions of the given cube rows; -1 where absent."""
        verts = np.asarray(verts).reshape(-1, self.verts.shape[1] if len(self.verts) else verts.shape[-1])
        if len(self.verts) == 0 or len(verts) == 0:
            return np.full(len(verts), -1, dtype=np.int64)
        if self._keys is None:
            self._keys = _keys(self.verts)
        q = _keys(verts)
        pos = np.searchsorted(self._keys, q)
        pos = np.minimum(pos, len(self._keys) - 1)
        return np.where(self._keys[pos] == q, pos, -1)

    def index(self, cube: CubeMap | Sequence) -> int:
        verts = cube.verts if isinstance(cube, CubeMap) else tuple(cube)
        j = int(self.lookup(np.array([verts]))[0])
        if j < 0:
            raise KeyError(f"{verts} is not in the {self.n}-basis")
        return j

    def inside(self, subset: np.ndarray) -> np.ndarray:
        """Mask of basis cubes whose image lies in the boolean point mask ``subset``."""
        if len(self.verts) == 0:
            return np.zeros(0, dtype=bool)
        return np.all(np.asarray(subset)[self.verts], axis=1)

    def to_json(self, labels=None) -> dict:
        rows = self.verts.tolist()
        if labels is not None:
            rows = [[labels[v] for v in row] for row in rows]
        return {"dimension": self.n, "scale": str(self.r), "cubes": rows}


def enumerate_cubes(X: FiniteMetricSpace, r, n: int, **kwargs) -> ChainBasis:
    r = as_scale(r)
    return ChainBasis(n, r, enumerate_cube_array(X, r, n, **kwargs))


class BoundaryMatrix:
    """Sparse integer matrix of d_n: columns = n-basis, rows = (n-1)-basis."""

    def __init__(self, n: int, matrix: sp.csc_matrix):
        self.n = n
        self.matrix = matrix

    @property
    def shape(self):
        return self.matrix.shape

    def column(self, j: int) -> dict:
        m = self.matrix
        lo, hi = m.indptr[j], m.indptr[j + 1]
        return {int(i): int(v) for i, v in zip(m.indices[lo:hi], m.data[lo:hi])}

    def to_json(self) -> dict:
        coo = self.matrix.tocoo()
        trip = sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
        return {"dimension": self.n, "shape": list(self.shape), "triplets": trip}


def boundary_matrix(basis_n: ChainBasis, basis_prev: ChainBasis) -> BoundaryMatrix:
    n = basis_n.n
    if basis_prev.n != n - 1:
        raise ValueError("bases must differ in dimension by one")
    ncols, nrows = len(basis_n), len(basis_prev)
    rows_l, cols_l, vals_l = [], [], []
    cols = np.arange(ncols)
    for i, s, sign in boundary_terms(n):
        fv = basis_n.verts[:, face_masks(n, i, s)] if ncols else np.empty((0, 1 << (n - 1)), np.int32)
        if n - 1 > 0:
            live = ~degenerate_mask(fv, n - 1)
        else:
            live = np.ones(len(fv), dtype=bool)
        pos = basis_prev.lookup(fv[live])
        if np.any(pos < 0):
            bad = fv[live][np.flatnonzero(pos < 0)[0]]
            raise ComplexError(f"non-degenerate face {tuple(bad)} missing from the {n - 1}-basis")
        rows_l.append(pos)
        cols_l.append(cols[live])
        vals_l.append(np.full(len(pos), sign, dtype=np.int64))
    if rows_l:
        r_ = np.concatenate(rows_l)
        c_ = np.concatenate(cols_l)
        v_ = np.concatenate(vals_l)
    else:
        r_ = c_ = v_ = np.empty(0, dtype=np.int64)
    m = sp.coo_matrix((v_, (r_, c_)), shape=(nrows, ncols), dtype=np.int64).tocsc()
    m.sum_duplicates()
    m.eliminate_zeros()
    return BoundaryMatrix(n, m)


def boundary_chain(sigma: CubeMap, basis_prev: ChainBasis) -> Chain:
    out: dict = {}
    for f, c in boundary_of_cube(sigma).items():
        j = basis_prev.index(f)
        out[j] = out.get(j, 0) + c
    return Chain(sigma.n - 1, {k: v for k, v in out.items() if v})


class CubeComplex:
    """Cubical chain complex of X at scale r, restricted to a support set.

    Bases and boundary matrices are built lazily and cached. ``support`` is a
    boolean point mask; cubes of a subset A are the cubes of X with image in A.
    """

    def __init__(self, X: FiniteMetricSpace, r, support=None, *, cap: int = DEFAULT_BASIS_CAP,
                 max_dim: int | None = None, workers: int = 1):
        self.X = X
        self.r = as_scale(r)
        self.support = (np.ones(len(X), dtype=bool) if support is None
                        else _as_mask(X, support))
        self.cap = cap
        self.max_dim = max_dim
        self.workers = workers
        self._bases: dict[int, ChainBasis] = {}
        self._bd: dict[int, BoundaryMatrix] = {}

    def basis(self, n: int) -> ChainBasis:
        if n < 0:
            return ChainBasis(n, self.r, np.empty((0, 1), dtype=np.int32))
        if n not in self._bases:
            self._bases[n] = ChainBasis(n, self.r, enumerate_cube_array(
                self.X, self.r, n, support=self.support, cap=self.cap, max_dim=self.max_dim,
                workers=self.workers))
        return self._bases[n]

    def boundary(self, n: int) -> BoundaryMatrix:
        if n not in self._bd:
            if n <= 0:
                self._bd[n] = BoundaryMatrix(n, sp.csc_matrix((0, len(self.basis(n))), dtype=np.int64))
            else:
                self._bd[n] = boundary_matrix(self.basis(n), self.basis(n - 1))
        return self._bd[n]

    def sub(self, subset) -> "CubeComplex":
        return CubeComplex(self.X, self.r, _as_mask(self.X, subset) & self.support, cap=self.cap,
                           max_dim=self.max_dim, workers=self.workers)


def _as_mask(X: FiniteMetricSpace, subset) -> np.ndarray:
    arr = np.asarray(subset) if not isinstance(subset, (set, frozenset)) else None
    if arr is not None and arr.dtype == bool and arr.shape == (len(X),):
        return arr.copy()
    mask = np.zeros(len(X), dtype=bool)
    for p in subset:
        mask[p if isinstance(p, (int, np.integer)) else X.index(p)] = True
    return mask


def map_cubes(verts: np.ndarray, f: np.ndarray, n: int, target: ChainBasis, *,
              allow_missing: np.ndarray | None = None):
    """Push cube rows through a point map; returns (target positions, keep mask).

    Degenerate images are dropped. Non-degenerate images must be in ``target``
    unless ``allow_missing`` (a point mask) contains them entirely.
    """
    img = np.asarray(f)[verts] if len(verts) else verts
    keep = ~degenerate_mask(img, n) if n > 0 else np.ones(len(img), dtype=bool)
    pos = np.full(len(img), -1, dtype=np.int64)
    pos[keep] = target.lookup(img[keep])
    missing = keep & (pos < 0)
    if missing.any():
        if allow_missing is not None:
            ok = np.all(allow_missing[img[missing]], axis=1)
            if ok.all():
                keep &= ~missing
                return pos, keep
        bad = img[np.flatnonzero(missing)[0]]
        raise ComplexError(f"image cube {tuple(int(v) for v in bad)} not in target basis")
    return pos, keep


def brute_force_cubes(X: FiniteMetricSpace, r, n: int) -> list[tuple]:
    """Reference enumeration over all |X|**(2**n) assignments (tests only)."""
    import itertools

    out = []
    k = 1 << n
    ham = [[bin(a ^ b).count("1") for b in range(k)] for a in range(k)]
    r = as_scale(r)
    for verts in itertools.product(range(len(X)), repeat=k):
        if not all(X.d(verts[a], verts[b]) <= r * ham[a][b] for a in range(k) for b in range(a + 1, k)):
            continue
        if n and CubeMap(n, verts).is_degenerate():
            continue
        out.append(verts)
    return out


def iter_chain_cubes(chain: Chain, basis: ChainBasis) -> Iterable[tuple[CubeMap, int]]:
    for j, c in sorted(chain.coeffs.items()):
        yield basis[j], c
