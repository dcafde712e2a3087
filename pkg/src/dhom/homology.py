"""Homology groups of cubical chain complexes, with coordinates and induced maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cubes import Chain, CubeComplex, map_cubes
from .linalg import EchelonLattice, image_lattice, kernel_basis, smith_reduce
from .metric import INF, FiniteMetricSpace, as_scale


class LipschitzError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class AbelianGroup:
    """Canonical form Z^free_rank + Z/t_1 + ... with t_1 | t_2 | ... and t_i > 1."""

    free_rank: int
    torsion: tuple = ()

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank == 1:
            parts.insert(0, "Z")
        elif self.free_rank > 1:
            parts.insert(0, f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    @property
    def trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def annihilators(self) -> tuple:
        """Per-coordinate orders: torsion coordinates first, then 0 for free ones."""
        return tuple(self.torsion) + (0,) * self.free_rank

    def reduce(self, coords: Sequence[int]) -> tuple:
        return tuple(c % a if a else c for c, a in zip(coords, self.annihilators))

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}


def groups_isomorphic(a: AbelianGroup, b: AbelianGroup) -> bool:
    return a.free_rank == b.free_rank and tuple(a.torsion) == tuple(b.torsion)


class ChainView:
    """Chains of a cube complex relative to a subset, optionally augmented.

    Basis of degree n = absolute n-cubes of the complex not lying in ``rel``.
    With ``reduced=True`` degree -1 is Z and d_0 is the augmentation.
    """

    def __init__(self, cx: CubeComplex, rel=None, reduced: bool = False):
        if rel is not None and reduced:
            raise ValueError("reduced relative homology is not provided")
        self.cx = cx
        self.rel = None
        if rel is not None:
            from .cubes import _as_mask
            self.rel = _as_mask(cx.X, rel) & cx.support
            if not self.rel.any():
                self.rel = None
        self.reduced = reduced
        self._keep: dict[int, np.ndarray] = {}

    def keep(self, n: int) -> np.ndarray:
        """Absolute basis positions of the degree-n generators."""
        if n not in self._keep:
            if n < 0:
                self._keep[n] = np.arange(1 if (self.reduced and n == -1) else 0)
            else:
                b = self.cx.basis(n)
                if self.rel is None:
                    self._keep[n] = np.arange(len(b))
                else:
                    self._keep[n] = np.flatnonzero(~b.inside(self.rel))
        return self._keep[n]

    def dim(self, n: int) -> int:
        return len(self.keep(n))

    def _csc(self, n: int):
        """d_n restricted to the view: (indptr, rows, data) over the kept columns."""
        m = self.cx.boundary(n).matrix
        prev = self.cx.basis(n - 1)
        rowmap = np.full(len(prev), -1, dtype=np.int64)
        rowmap[self.keep(n - 1)] = np.arange(self.dim(n - 1))
        if self.rel is not None:
            m = m[:, self.keep(n)]
        rows = rowmap[m.indices]
        return m.indptr, rows, m.data

    def columns(self, n: int, order=None):
        """Boundary columns d_n restricted to the view, as sparse dicts."""
        if n == 0:
            col = {0: 1} if self.reduced else {}
            for _ in range(self.dim(0) if order is None else len(order)):
                yield dict(col)
            return
        if n < 0:
            return
        indptr, rows, data = self._csc(n)
        ip, rl, dl = indptr.tolist(), rows.tolist(), data.tolist()
        for j in (range(self.dim(n)) if order is None else order):
            lo, hi = ip[j], ip[j + 1]
            yield {i: int(v) for i, v in zip(rl[lo:hi], dl[lo:hi]) if i >= 0}

    def triangular_order(self, n: int) -> list:
        """Order of the nonzero columns putting one column per leading row first.

        Columns with distinct leading (largest) row are independent and enter
        an echelon basis without any reduction; among columns sharing a leading
        row we prefer a unit leading entry and few nonzeros. The remaining
        columns follow sparsest first.
        """
        if n <= 0:
            return list(range(self.dim(n)))
        indptr, rows, data = self._csc(n)
        ncol = len(indptr) - 1
        if ncol == 0:
            return []
        valid = rows >= 0
        colid = np.repeat(np.arange(ncol), np.diff(indptr))
        nnz = np.bincount(colid[valid], minlength=ncol)
        lead = np.full(ncol, -1, dtype=np.int64)
        np.maximum.at(lead, colid[valid], rows[valid])
        at_lead = valid & (rows == lead[colid])
        unit = np.zeros(ncol, dtype=bool)
        unit[colid[at_lead]] = np.abs(data[at_lead]) == 1
        live = np.flatnonzero(lead >= 0)
        key = np.lexsort((nnz[live], ~unit[live], lead[live]))
        ordered = live[key]
        first = np.ones(len(ordered), dtype=bool)
        first[1:] = lead[ordered[1:]] != lead[ordered[:-1]]
        head = ordered[first]
        rest = np.setdiff1d(live, head, assume_unique=True)
        rest = rest[np.argsort(nnz[rest], kind="stable")]
        return head.tolist() + rest.tolist()

    def chain_from_absolute(self, n: int, coeffs: dict) -> dict:
        """Project an absolute chain (positions in cx.basis(n)) onto the view."""
        pos = np.full(len(self.cx.basis(n)), -1, dtype=np.int64)
        pos[self.keep(n)] = np.arange(self.dim(n))
        out = {}
        for j, c in coeffs.items():
            k = int(pos[j])
            if k >= 0 and c:
                out[k] = out.get(k, 0) + c
        return {k: v for k, v in out.items() if v}

    def chain_to_absolute(self, n: int, coeffs: dict) -> dict:
        keep = self.keep(n)
        return {int(keep[k]): c for k, c in coeffs.items()}


class HomologyGroup:
    """H_n of a chain view with cycle representatives and canonical coordinates.

    ``cycle_reps[k]`` generates coordinate k; coordinates list torsion
    generators first (reduced mod their order), then free ones.
    """

    def __init__(self, view: ChainView, n: int):
        self.view = view
        self.n = n
        dim = view.dim(n)
        rank_bd = image_lattice(view.columns(n)).rank if n >= 0 else 0
        rank_z = dim - rank_bd
        self.cycle_rank = rank_z
        B = image_lattice(view.columns(n + 1, view.triangular_order(n + 1)), stop_rank=rank_z)
        self.boundary_rank = B.rank
        self._trivial = B.rank == rank_z and B.unit_pivots()
        if self._trivial:
            self.group = AbelianGroup(0, ())
            self.cycle_reps: list[dict] = []
            self._B = B
            return
        ker, _ = kernel_basis(view.columns(n))
        Z = EchelonLattice()
        for v in ker:
            Z.insert(v)
        assert Z.rank == rank_z
        self._Z = Z
        zb = Z.basis()
        rows: dict[int, dict] = {}
        for col, b in enumerate(B.basis()):
            c = Z.solve(b)
            if c is None:
                raise ArithmeticError("boundary is not a cycle: d o d != 0")
            for i, x in c.items():
                rows.setdefault(i, {})[col] = x
        red = smith_reduce(rows, rank_z, B.rank)
        div = red.divisors
        self._red = red
        tor_k = [k for k, d in enumerate(div) if d > 1]
        free_k = list(range(len(div), rank_z))
        self._kept = tor_k + free_k
        self.group = AbelianGroup(len(free_k), tuple(div[k] for k in tor_k))
        self.cycle_reps = []
        for k in self._kept:
            col = red.Uinv[red.row_order[k]]
            g: dict = {}
            for i, x in col.items():
                for pos, y in zb[i].items():
                    g[pos] = g.get(pos, 0) + x * y
            self.cycle_reps.append({p: v for p, v in g.items() if v})

    @property
    def X(self) -> FiniteMetricSpace:
        return self.view.cx.X

    def coordinates(self, chain: dict) -> tuple:
        """Canonical coordinates of the class of a cycle (view positions)."""
        if self._trivial:
            return ()
        c = self._Z.solve(chain)
        if c is None:
            raise ValueError("chain is not a cycle")
        out = []
        for k in self._kept:
            u = self._red.U[self._red.row_order[k]]
            out.append(sum(x * c.get(i, 0) for i, x in u.items()))
        return self.group.reduce(out)

    def is_boundary(self, chain: dict) -> bool:
        return not any(self.coordinates(chain))

    def chains(self) -> list[Chain]:
        return [Chain(self.n, self.view.chain_to_absolute(self.n, g)) for g in self.cycle_reps]


def homology(X_or_cx, r=None, n: int = 0, variant: str = "absolute", A=None, **cx_kwargs) -> HomologyGroup:
    """H_{n,r}: ``variant`` is ``absolute``, ``reduced`` or ``relative`` (with subset ``A``)."""
    cx = X_or_cx if isinstance(X_or_cx, CubeComplex) else CubeComplex(X_or_cx, r, **cx_kwargs)
    if variant == "absolute":
        view = ChainView(cx)
    elif variant == "reduced":
        if not cx.support.any():
            raise ValueError("reduced homology of the empty space")
        view = ChainView(cx, reduced=True)
    elif variant == "relative":
        if A is None:
            raise ValueError("relative homology needs a subset A")
        view = ChainView(cx, rel=A)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return HomologyGroup(view, n)


# -- induced maps ------------------------------------------------------------------

@dataclass
class InducedMapMatrix:
    source: HomologyGroup
    target: HomologyGroup
    matrix: list = field(default_factory=list)  # rows: target coords, cols: source gens

    @property
    def shape(self):
        return (len(self.target.group.annihilators), len(self.source.group.annihilators))

    def to_json(self) -> dict:
        return {"shape": list(self.shape),
                "entries": [[i, j, x] for i, row in enumerate(self.matrix) for j, x in enumerate(row) if x]}


def check_lipschitz(f: Sequence[int], X: FiniteMetricSpace, Y: FiniteMetricSpace, k) -> None:
    """Raise LipschitzError with a witness pair unless d_Y(f x, f y) <= k d_X(x, y)."""
    k = Fraction(k) if not isinstance(k, Fraction) else k
    for x in range(len(X)):
        for y in range(x + 1, len(X)):
            dx = X.d(x, y)
            bound = INF if dx == INF else k * dx
            if Y.d(f[x], f[y]) > bound:
                raise LipschitzError(
                    f"map is not {k}-Lipschitz at ({X.labels[x]}, {X.labels[y]})",
                    witness=(X.labels[x], X.labels[y]))


def push_chain(src: HomologyGroup, tgt: HomologyGroup, f, chain: dict) -> dict:
    """Image of a source-view chain under the point map f, as a target-view chain."""
    n = src.n
    sview, tview = src.view, tgt.view
    if not chain:
        return {}
    pos = np.array(sorted(chain), dtype=np.int64)
    coef = np.array([chain[int(p)] for p in pos], dtype=object)
    verts = sview.cx.basis(n).verts[sview.keep(n)[pos]]
    allow = tview.rel if tview.rel is not None else None
    tpos, keep = map_cubes(verts, np.asarray(f), n, tview.cx.basis(n), allow_missing=allow)
    absolute: dict = {}
    for p, c in zip(tpos[keep].tolist(), coef[keep].tolist()):
        absolute[p] = absolute.get(p, 0) + c
    return tview.chain_from_absolute(n, absolute)


def map_homology(src: HomologyGroup, tgt: HomologyGroup, f=None) -> InducedMapMatrix:
    """Matrix of f_*: src -> tgt in canonical coordinates (f defaults to identity)."""
    if f is None:
        f = np.arange(len(src.X))
    cols = [tgt.coordinates(push_chain(src, tgt, f, g)) for g in src.cycle_reps]
    nrows = len(tgt.group.annihilators)
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]
    return InducedMapMatrix(src, tgt, matrix)


def induced_map(f, X: FiniteMetricSpace, Y: FiniteMetricSpace, n: int, r, k=1, *,
                source: HomologyGroup | None = None, target: HomologyGroup | None = None,
                **cx_kwargs) -> InducedMapMatrix:
    """Matrix of the map H_{n,r}(X) -> H_{n,kr}(Y) induced by a k-Lipschitz point map.

    ``f`` is a sequence of target indices or a dict of labels.
    """
    if isinstance(f, dict):
        f = [Y.index(f[x]) for x in X.labels]
    f = list(f)
    r = as_scale(r)
    k = as_scale(k)
    check_lipschitz(f, X, Y, k)
    if source is None:
        source = homology(X, r, n, **cx_kwargs)
    if target is None:
        target = homology(Y, k * r, n, **cx_kwargs)
    return map_homology(source, target, f)


def compose(g: InducedMapMatrix, f: InducedMapMatrix) -> list:
    """Matrix of g o f reduced in the target of g."""
    rows = len(g.matrix)
    inner = len(f.matrix)
    cols = len(f.matrix[0]) if inner else len(f.source.cycle_reps)
    out = [[sum(g.matrix[i][t] * f.matrix[t][j] for t in range(inner)) for j in range(cols)]
           for i in range(rows)]
    ann = g.target.group.annihilators
    return [[x % ann[i] if ann[i] else x for x in row] for i, row in enumerate(out)]
