"""Executable checks: discrete covers, exactness, Mayer-Vietoris, LES, excision, homotopy."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cubes import CubeComplex, _as_mask
from .homology import ChainView, HomologyGroup, map_homology
from .linalg import EchelonLattice, kernel_basis
from .metric import FiniteMetricSpace, as_scale


class CoverError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# -- covers ------------------------------------------------------------------------

@dataclass
class CoverReport:
    r: object
    n_max: int
    labels: tuple
    uncovered: dict = field(default_factory=dict)   # n -> array of cube vertex rows
    counts: dict = field(default_factory=dict)      # n -> number of cubes checked

    @property
    def ok(self) -> bool:
        return all(len(v) == 0 for v in self.uncovered.values())

    def covers_dimension(self, n: int) -> bool:
        if n > self.n_max:
            raise ValueError(f"cover only checked up to n = {self.n_max}")
        return len(self.uncovered[n]) == 0

    @property
    def status(self) -> str:
        if self.ok:
            return f"discrete cover verified up to n = {self.n_max}"
        n = self.first_failure
        return f"not a {n}-dimensional discrete cover"

    @property
    def first_failure(self) -> int | None:
        for n in sorted(self.uncovered):
            if len(self.uncovered[n]):
                return n
        return None

    def witness(self) -> dict | None:
        n = self.first_failure
        if n is None:
            return None
        return {"n": n, "cube": [self.labels[v] for v in self.uncovered[n][0]]}

    def to_json(self, limit: int = 20) -> dict:
        return {
            "scale": str(self.r), "n_max": self.n_max, "ok": self.ok, "status": self.status,
            "uncovered": {str(n): {"count": int(len(v)),
                                   "cubes": [[self.labels[x] for x in row] for row in v[:limit]]}
                          for n, v in sorted(self.uncovered.items())},
            "witness": self.witness(),
        }


def is_discrete_cover(X: FiniteMetricSpace, cover, r, n_max: int, *,
                      complex_: CubeComplex | None = None, **cx_kwargs) -> CoverReport:
    """Per dimension n <= n_max, the non-degenerate cubes lying in no member of the cover."""
    masks = [_as_mask(X, U) for U in cover]
    if not masks:
        raise CoverError("empty cover")
    union = np.logical_or.reduce(masks)
    if not union.all():
        missing = [X.labels[i] for i in np.flatnonzero(~union)]
        raise CoverError(f"cover does not exhaust the space: missing {missing}", witness=missing)
    cx = complex_ if complex_ is not None else CubeComplex(X, r, **cx_kwargs)
    rep = CoverReport(cx.r, n_max, X.labels)
    for n in range(n_max + 1):
        b = cx.basis(n)
        inside = np.zeros(len(b), dtype=bool)
        for m in masks:
            inside |= b.inside(m)
        rep.uncovered[n] = b.verts[~inside]
        rep.counts[n] = len(b)
    return rep


# -- maps between presented groups ------------------------------------------------------

@dataclass
class GroupMap:
    """Integer matrix between groups given by per-coordinate annihilators (0 = free)."""

    matrix: list
    src: tuple
    tgt: tuple

    def __post_init__(self):
        self.matrix = [list(map(int, row)) for row in self.matrix]
        if len(self.matrix) != len(self.tgt):
            raise ValueError("matrix rows do not match the target")
        if any(len(row) != len(self.src) for row in self.matrix):
            raise ValueError("matrix columns do not match the source")

    @classmethod
    def of(cls, m) -> "GroupMap":
        return cls(m.matrix, m.source.group.annihilators, m.target.group.annihilators)

    @classmethod
    def zero(cls, src, tgt) -> "GroupMap":
        return cls([[0] * len(src) for _ in tgt], tuple(src), tuple(tgt))

    def column(self, j: int) -> dict:
        return {i: row[j] for i, row in enumerate(self.matrix) if row[j]}

    def apply(self, v: dict) -> list:
        out = [sum(row[j] * x for j, x in v.items()) for row in self.matrix]
        return [x % a if a else x for x, a in zip(out, self.tgt)]

    def to_json(self) -> dict:
        return {"shape": [len(self.tgt), len(self.src)],
                "entries": [[i, j, x] for i, row in enumerate(self.matrix) for j, x in enumerate(row) if x]}


def stack(*maps: GroupMap) -> GroupMap:
    """(f_1, f_2, ...): G -> H_1 + H_2 + ..."""
    rows, tgt = [], ()
    for m in maps:
        rows += m.matrix
        tgt += m.tgt
    return GroupMap(rows, maps[0].src, tgt)


def juxtapose(*maps: GroupMap) -> GroupMap:
    """[f_1 f_2 ...]: G_1 + G_2 + ... -> H."""
    tgt = maps[0].tgt
    rows = [sum((m.matrix[i] for m in maps), []) for i in range(len(tgt))]
    src = sum((m.src for m in maps), ())
    return GroupMap(rows, src, tgt)


def negate(m: GroupMap) -> GroupMap:
    return GroupMap([[-x for x in row] for row in m.matrix], m.src, m.tgt)


def _relations(ann) -> list[dict]:
    return [{i: a} for i, a in enumerate(ann) if a]


def image_subgroup(f: GroupMap) -> EchelonLattice:
    """Lattice in Z^k (k = coordinates of the target) of im f plus the target relations."""
    lat = EchelonLattice()
    for j in range(len(f.src)):
        lat.insert(f.column(j))
    for v in _relations(f.tgt):
        lat.insert(v)
    return lat


def kernel_subgroup(g: GroupMap) -> list[dict]:
    """Generators in Z^k (k = source coordinates) of the preimage of the relations."""
    k = len(g.src)
    cols = [g.column(j) for j in range(k)] + _relations(g.tgt)
    ker, _ = kernel_basis(cols)
    gens = [{j: c for j, c in t.items() if j < k} for t in ker]
    return [v for v in gens if v] + _relations(g.src)


def _rank(vectors) -> int:
    lat = EchelonLattice()
    for v in vectors:
        lat.insert(v)
    return lat.rank


@dataclass
class ExactnessNode:
    name: str
    group: str
    rank_im: int
    rank_ker: int
    exact: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"node": self.name, "group": self.group, "rank_im": self.rank_im,
               "rank_ker": self.rank_ker, "exact": self.exact}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def check_exact(f: GroupMap, g: GroupMap, name: str = "", group: str = "") -> ExactnessNode:
    """im f = ker g inside the middle group, by double inclusion of lattices.

    Ranks are those of the image and kernel subgroups (lattice rank minus the
    number of torsion coordinates of the middle group).
    """
    if tuple(f.tgt) != tuple(g.src):
        raise ValueError("maps are not composable")
    tor = sum(1 for a in f.tgt if a)
    im = image_subgroup(f)
    ker = kernel_subgroup(g)
    rank_im = im.rank - tor
    rank_ker = _rank(ker) - tor
    for v in im.basis():
        if any(g.apply(v)):
            return ExactnessNode(name, group, rank_im, rank_ker, False,
                                 {"reason": "image not in kernel", "element": _dense(v, len(f.tgt))})
    for v in ker:
        if not im.contains(v):
            return ExactnessNode(name, group, rank_im, rank_ker, False,
                                 {"reason": "kernel not in image", "element": _dense(v, len(f.tgt))})
    return ExactnessNode(name, group, rank_im, rank_ker, True)


def _dense(v: dict, k: int) -> list:
    return [v.get(i, 0) for i in range(k)]


def is_isomorphism(f: GroupMap) -> bool:
    zero_in = GroupMap.zero((), f.src)
    zero_out = GroupMap.zero(f.tgt, ())
    return check_exact(zero_in, f).exact and check_exact(f, zero_out).exact


# -- chain-level helpers -----------------------------------------------------------------

def _boundary_abs(cx: CubeComplex, n: int, chain: dict) -> dict:
    m = cx.boundary(n).matrix
    out: dict = {}
    for j, c in chain.items():
        lo, hi = m.indptr[j], m.indptr[j + 1]
        for i, v in zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()):
            out[i] = out.get(i, 0) + c * v
    return {k: v for k, v in out.items() if v}


def _transfer(chain: dict, src: CubeComplex, tgt: CubeComplex, n: int) -> dict:
    """Re-index an absolute chain of ``src`` in the basis of ``tgt`` (same X)."""
    if not chain:
        return {}
    pos = np.array(sorted(chain), dtype=np.int64)
    verts = src.basis(n).verts[pos]
    tpos = tgt.basis(n).lookup(verts)
    if (tpos < 0).any():
        bad = verts[np.flatnonzero(tpos < 0)[0]]
        raise CoverError("chain leaves the target subspace",
                         witness=[src.X.labels[v] for v in bad])
    return {int(t): chain[int(p)] for p, t in zip(pos, tpos)}


def _coords(H: HomologyGroup, absolute: dict) -> tuple:
    return H.coordinates(H.view.chain_from_absolute(H.n, absolute))


def _group_str(*groups: HomologyGroup) -> str:
    return " + ".join(f"({g.group})" if len(groups) > 1 else str(g.group) for g in groups)


def connecting_mv(HX: HomologyGroup, cxA: CubeComplex, HAB: HomologyGroup) -> GroupMap:
    """Mayer-Vietoris connecting map H_n(X) -> H_{n-1}(A cap B).

    A cycle z splits as a + (z - a) with a the part carried by A; then
    d_*[z] = [d a], which lies in A cap B.
    """
    n = HX.n
    cxX = HX.view.cx
    inA = cxX.basis(n).inside(cxA.support)
    cols = []
    for rep in HX.cycle_reps:
        a = {j: c for j, c in HX.view.chain_to_absolute(n, rep).items() if inA[j]}
        bd = _boundary_abs(cxX, n, a)
        cols.append(_coords(HAB, _transfer(bd, cxX, HAB.view.cx, n - 1)) if n >= 1 else ())
    ann = HAB.group.annihilators
    matrix = [[col[i] for col in cols] for i in range(len(ann))]
    return GroupMap(matrix, HX.group.annihilators, ann)


def connecting_pair(HXA: HomologyGroup, HA: HomologyGroup) -> GroupMap:
    """Pair connecting map H_n(X, A) -> H_{n-1}(A), [s] -> [d s]."""
    n = HXA.n
    cxX = HXA.view.cx
    cols = []
    for rep in HXA.cycle_reps:
        bd = _boundary_abs(cxX, n, HXA.view.chain_to_absolute(n, rep))
        cols.append(_coords(HA, _transfer(bd, cxX, HA.view.cx, n - 1)))
    ann = HA.group.annihilators
    return GroupMap([[col[i] for col in cols] for i in range(len(ann))], HXA.group.annihilators, ann)


# -- Mayer-Vietoris ---------------------------------------------------------------

@dataclass
class SequenceReport:
    kind: str
    r: object
    n_max: int
    nodes: list = field(default_factory=list)
    maps: dict = field(default_factory=dict)
    cover: CoverReport | None = None
    refused: bool = False
    reason: str = ""

    @property
    def ok(self) -> bool:
        return not self.refused and all(node.exact for node in self.nodes)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "scale": str(self.r), "n_max": self.n_max, "ok": self.ok,
               "refused": self.refused, "exactness": [node.to_json() for node in self.nodes],
               "maps": {k: v.to_json() for k, v in self.maps.items()}}
        if self.reason:
            out["reason"] = self.reason
        if self.cover is not None:
            out["cover"] = self.cover.to_json()
        return out


def mayer_vietoris_check(X: FiniteMetricSpace, A, B, r, n_max: int, *, cover_dim: int | None = None,
                         **cx_kwargs) -> SequenceReport:
    """Exactness of the Mayer-Vietoris sequence at every node of degree <= n_max.

    The cover is first checked up to ``cover_dim`` (default n_max + 1); if that
    fails the check is refused and the report carries the uncovered cube.
    """
    r = as_scale(r)
    cover_dim = n_max + 1 if cover_dim is None else cover_dim
    cxX = CubeComplex(X, r, **cx_kwargs)
    rep = SequenceReport("mayer-vietoris", r, n_max)
    rep.cover = is_discrete_cover(X, [A, B], r, cover_dim, complex_=cxX)
    if not rep.cover.ok:
        rep.refused = True
        rep.reason = rep.cover.status
        return rep
    mA, mB = _as_mask(X, A), _as_mask(X, B)
    cxA, cxB, cxAB = cxX.sub(mA), cxX.sub(mB), cxX.sub(mA & mB)
    H = {}
    for n in range(n_max + 1):
        H[n] = {k: HomologyGroup(ChainView(c), n) for k, c in
                (("AB", cxAB), ("A", cxA), ("B", cxB), ("X", cxX))}
    H[n_max + 1] = {"X": HomologyGroup(ChainView(cxX), n_max + 1)}
    diag, diff, conn = {}, {}, {}
    for n in range(n_max + 2):
        h = H[n]
        if n <= n_max:
            i1 = GroupMap.of(map_homology(h["AB"], h["A"]))
            i2 = GroupMap.of(map_homology(h["AB"], h["B"]))
            j1 = GroupMap.of(map_homology(h["A"], h["X"]))
            j2 = GroupMap.of(map_homology(h["B"], h["X"]))
            rep.maps[f"diag_{n}"] = diag[n] = stack(i1, i2)
            rep.maps[f"diff_{n}"] = diff[n] = juxtapose(j1, negate(j2))
        if n >= 1:
            conn[n] = connecting_mv(h["X"], cxA, H[n - 1]["AB"])
        else:
            conn[n] = GroupMap.zero(h["X"].group.annihilators, ())
        rep.maps[f"conn_{n}"] = conn[n]
    for n in range(n_max + 1):
        h = H[n]
        rep.nodes.append(check_exact(conn[n + 1], diag[n], f"H{n}(A∩B)", str(h["AB"].group)))
        rep.nodes.append(check_exact(diag[n], diff[n], f"H{n}(A)+H{n}(B)", _group_str(h["A"], h["B"])))
        rep.nodes.append(check_exact(diff[n], conn[n], f"H{n}(X)", str(h["X"].group)))
    return rep


# -- pair sequence and excision --------------------------------------------------------

def pair_les_check(X: FiniteMetricSpace, A, r, n_max: int, **cx_kwargs) -> SequenceReport:
    """Exactness of ... H_n(A) -> H_n(X) -> H_n(X, A) -> H_{n-1}(A) ... for n <= n_max."""
    r = as_scale(r)
    cxX = CubeComplex(X, r, **cx_kwargs)
    mA = _as_mask(X, A)
    cxA = cxX.sub(mA)
    rep = SequenceReport("pair", r, n_max)
    H = {}
    for n in range(n_max + 1):
        H[n] = {"A": HomologyGroup(ChainView(cxA), n), "X": HomologyGroup(ChainView(cxX), n),
                "XA": HomologyGroup(ChainView(cxX, rel=mA), n)}
    H[n_max + 1] = {"XA": HomologyGroup(ChainView(cxX, rel=mA), n_max + 1)}
    inc, proj, conn = {}, {}, {}
    for n in range(n_max + 2):
        h = H[n]
        if n <= n_max:
            rep.maps[f"i_{n}"] = inc[n] = GroupMap.of(map_homology(h["A"], h["X"]))
            rep.maps[f"j_{n}"] = proj[n] = GroupMap.of(map_homology(h["X"], h["XA"]))
        conn[n] = (connecting_pair(h["XA"], H[n - 1]["A"]) if n >= 1
                   else GroupMap.zero(h["XA"].group.annihilators, ()))
        rep.maps[f"d_{n}"] = conn[n]
    for n in range(n_max + 1):
        h = H[n]
        rep.nodes.append(check_exact(conn[n + 1], inc[n], f"H{n}(A)", str(h["A"].group)))
        rep.nodes.append(check_exact(inc[n], proj[n], f"H{n}(X)", str(h["X"].group)))
        rep.nodes.append(check_exact(proj[n], conn[n], f"H{n}(X,A)", str(h["XA"].group)))
    return rep


@dataclass
class ExcisionReport:
    r: object
    n_max: int
    degrees: list = field(default_factory=list)   # per n: {source, target, iso}
    cover: CoverReport | None = None
    refused: bool = False

    @property
    def ok(self) -> bool:
        return not self.refused and all(d["iso"] for d in self.degrees)

    def to_json(self) -> dict:
        out = {"scale": str(self.r), "n_max": self.n_max, "ok": self.ok, "refused": self.refused,
               "degrees": self.degrees}
        if self.cover is not None:
            out["cover"] = self.cover.to_json()
        return out


def excision_check(X: FiniteMetricSpace, A, B, r, n_max: int, *, cover_dim: int | None = None,
                   **cx_kwargs) -> ExcisionReport:
    """Whether the inclusion (B, A cap B) -> (X, A) induces isomorphisms for n <= n_max."""
    r = as_scale(r)
    cxX = CubeComplex(X, r, **cx_kwargs)
    rep = ExcisionReport(r, n_max)
    rep.cover = is_discrete_cover(X, [A, B], r, n_max if cover_dim is None else cover_dim,
                                  complex_=cxX)
    if not rep.cover.ok:
        rep.refused = True
        return rep
    mA, mB = _as_mask(X, A), _as_mask(X, B)
    cxB = cxX.sub(mB)
    for n in range(n_max + 1):
        src = HomologyGroup(ChainView(cxB, rel=mA & mB), n)
        tgt = HomologyGroup(ChainView(cxX, rel=mA), n)
        m = GroupMap.of(map_homology(src, tgt))
        rep.degrees.append({"n": n, "source": str(src.group), "target": str(tgt.group),
                            "iso": is_isomorphism(m), "map": m.to_json()})
    return rep


# -- homotopy axiom -----------------------------------------------------------------

@dataclass
class HomotopyAxiomReport:
    certificate_ok: bool
    witness: dict | None
    absolute: list = field(default_factory=list)   # per n: equal?
    relative: list | None = None                     # None when not a map of pairs

    @property
    def ok(self) -> bool:
        return self.certificate_ok and all(self.absolute) and all(self.relative or [])

    def to_json(self) -> dict:
        return {"ok": self.ok, "certificate": self.certificate_ok, "witness": self.witness,
                "absolute": self.absolute, "relative": self.relative}


def homotopy_axiom_check(X: FiniteMetricSpace, Y: FiniteMetricSpace, cert, r, n_max: int, *,
                         k=1, A=None, B=None, **cx_kwargs) -> HomotopyAxiomReport:
    """f = F(-, 0) and g = F(-, m) induce equal matrices, absolutely and (when
    F maps A into B at every level) on the pair (X, A) -> (Y, B)."""
    from .homology import check_lipschitz

    r, k = as_scale(r), as_scale(k)
    v = cert.verify(X, Y)
    f, g = cert.F[0], cert.F[-1]
    rep = HomotopyAxiomReport(v.ok, v.witness)
    if not v.ok:
        return rep
    check_lipschitz(f, X, Y, k)
    check_lipschitz(g, X, Y, k)
    cxX, cxY = CubeComplex(X, r, **cx_kwargs), CubeComplex(Y, k * r, **cx_kwargs)
    for n in range(n_max + 1):
        src, tgt = HomologyGroup(ChainView(cxX), n), HomologyGroup(ChainView(cxY), n)
        rep.absolute.append(map_homology(src, tgt, f).matrix == map_homology(src, tgt, g).matrix)
    if A is not None:
        mA = _as_mask(X, A)
        mB = _as_mask(Y, B if B is not None else A)
        if all(mB[level[x]] for level in cert.F for x in np.flatnonzero(mA)):
            rep.relative = []
            for n in range(n_max + 1):
                src = HomologyGroup(ChainView(cxX, rel=mA), n)
                tgt = HomologyGroup(ChainView(cxY, rel=mB), n)
                rep.relative.append(map_homology(src, tgt, f).matrix == map_homology(src, tgt, g).matrix)
    return rep


def boundary_law_check(X: FiniteMetricSpace, r, n_max: int, **cx_kwargs) -> list[dict]:
    """d_{n} o d_{n+1} = 0 as exact sparse products, for 1 <= n < n_max."""
    cx = CubeComplex(X, r, **cx_kwargs)
    out = []
    for n in range(1, n_max):
        prod = cx.boundary(n).matrix @ cx.boundary(n + 1).matrix
        out.append({"n": n, "zero": prod.count_nonzero() == 0, "shape": list(prod.shape)})
    return out


@dataclass
class AxiomSuiteReport:
    les: SequenceReport
    excision: ExcisionReport | None = None
    homotopy: list = field(default_factory=list)
    dimension: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.les.ok and (self.excision is None or self.excision.ok)
                and all(h.ok for h in self.homotopy) and all(self.dimension))

    def to_json(self) -> dict:
        return {"ok": self.ok, "les": self.les.to_json(),
                "excision": None if self.excision is None else self.excision.to_json(),
                "homotopy": [h.to_json() for h in self.homotopy], "dimension": self.dimension}


def axiom_suite(X: FiniteMetricSpace, A, r, n_max: int, *, B=None, certificates=(),
                **cx_kwargs) -> AxiomSuiteReport:
    """LES of (X, A); excision for the cover {A, B} if B is given; the homotopy
    axiom for each (Y, certificate) pair; the dimension axiom on a point."""
    from .constructions import point

    rep = AxiomSuiteReport(pair_les_check(X, A, r, n_max, **cx_kwargs))
    if B is not None:
        rep.excision = excision_check(X, A, B, r, n_max, **cx_kwargs)
    for Y, cert in certificates:
        rep.homotopy.append(homotopy_axiom_check(X, Y, cert, r, n_max, A=A, **cx_kwargs))
    P = point()
    cxP = CubeComplex(P, r)
    rep.dimension = [HomologyGroup(ChainView(cxP), n).group.trivial for n in range(1, n_max + 1)]
    return rep
