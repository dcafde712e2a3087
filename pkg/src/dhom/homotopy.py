"""Discrete homotopy: r-paths and loops, homotopy certificates, the Hurewicz map.

The abelianization oracle here is deliberately independent of the homology
engine: it works on the proximity graph's cycle space and canonicalizes with
sympy, never touching cube enumeration or boundary matrices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .cubes import Chain, CubeComplex
from .homology import AbelianGroup, HomologyGroup
from .metric import INF, FiniteMetricSpace, as_scale


@dataclass
class Verdict:
    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": self.witness}


# -- paths and loops ---------------------------------------------------------------

@dataclass(frozen=True)
class RPath:
    points: tuple
    scale: Fraction

    def __post_init__(self):
        if not self.points:
            raise ValueError("an r-path needs at least one point")
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))
        object.__setattr__(self, "scale", as_scale(self.scale))

    def __len__(self) -> int:
        return len(self.points)

    def check(self, X: FiniteMetricSpace) -> Verdict:
        for i in range(len(self.points) - 1):
            a, b = self.points[i], self.points[i + 1]
            if X.d(a, b) > self.scale:
                return Verdict(False, {"step": i, "pair": [X.labels[a], X.labels[b]],
                                       "distance": str(X.d(a, b))})
        return Verdict(True)

    def reversed(self):
        return type(self)(self.points[::-1], self.scale)

    def labels(self, X: FiniteMetricSpace) -> list:
        return [X.labels[p] for p in self.points]


class RLoop(RPath):
    @property
    def basepoint(self) -> int:
        return self.points[0]

    def check(self, X: FiniteMetricSpace) -> Verdict:
        if self.points[0] != self.points[-1]:
            return Verdict(False, {"reason": "loop does not return to its basepoint"})
        return super().check(X)

    def __mul__(self, other: "RLoop") -> "RLoop":
        if other.basepoint != self.basepoint:
            raise ValueError("loops have different basepoints")
        return RLoop(self.points + other.points, self.scale)

    def padded(self, length: int) -> "RLoop":
        """Append basepoint copies until the loop has ``length`` points."""
        if length < len(self.points):
            raise ValueError("cannot pad to a shorter length")
        return RLoop(self.points + (self.basepoint,) * (length - len(self.points)), self.scale)


def loop_to_json(loop: RPath, X: FiniteMetricSpace) -> dict:
    return {"scale": str(loop.scale), "points": loop.labels(X)}


def loop_from_json(data: dict, X: FiniteMetricSpace, cls=RLoop) -> RPath:
    return cls(tuple(X.index(p) for p in data["points"]), as_scale(data["scale"]))


# -- certificates ------------------------------------------------------------------

@dataclass
class HomotopyMatrixCertificate:
    """Rows are loops of one length; consecutive rows are pointwise within r."""

    rows: list
    scale: Fraction

    def __post_init__(self):
        self.rows = [tuple(int(p) for p in row) for row in self.rows]
        self.scale = as_scale(self.scale)

    @classmethod
    def from_loops(cls, loops: Sequence[RLoop], scale=None):
        width = max(len(l) for l in loops)
        scale = scale if scale is not None else loops[0].scale
        return cls([l.padded(width).points for l in loops], scale)

    def verify(self, X: FiniteMetricSpace, source: RLoop | None = None,
               target: RLoop | None = None) -> Verdict:
        if not self.rows:
            return Verdict(False, {"reason": "empty matrix"})
        width = len(self.rows[0])
        p = self.rows[0][0]
        r = self.scale
        for k, row in enumerate(self.rows):
            if len(row) != width:
                return Verdict(False, {"row": k, "reason": "rows of different lengths"})
            if row[0] != p or row[-1] != p:
                return Verdict(False, {"row": k, "reason": "row is not based at the basepoint"})
            for i in range(width - 1):
                if X.d(row[i], row[i + 1]) > r:
                    return Verdict(False, {"row": k, "step": i,
                                           "pair": [X.labels[row[i]], X.labels[row[i + 1]]]})
        for k in range(len(self.rows) - 1):
            for i in range(width):
                a, b = self.rows[k][i], self.rows[k + 1][i]
                if X.d(a, b) > r:
                    return Verdict(False, {"column": i, "step": k, "pair": [X.labels[a], X.labels[b]]})
        for name, loop, row in (("source", source, self.rows[0]), ("target", target, self.rows[-1])):
            if loop is not None:
                if len(loop) > width or loop.padded(width).points != row:
                    return Verdict(False, {"reason": f"{name} loop does not match the matrix"})
        return Verdict(True)

    def to_json(self, X: FiniteMetricSpace) -> dict:
        return {"kind": "loop-homotopy", "scale": str(self.scale),
                "rows": [[X.labels[p] for p in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict, X: FiniteMetricSpace):
        return cls([[X.index(p) for p in row] for row in data["rows"]], as_scale(data["scale"]))


@dataclass
class MapHomotopyCertificate:
    """A homotopy F: X x {0..m} -> Y given level by level: ``F[i][x]`` is a point of Y."""

    F: list
    lipschitz: Fraction = Fraction(1)

    def __post_init__(self):
        self.F = [tuple(int(v) for v in level) for level in self.F]
        self.lipschitz = as_scale(self.lipschitz)

    @property
    def m(self) -> int:
        return len(self.F) - 1

    def verify(self, X: FiniteMetricSpace, Y: FiniteMetricSpace, f=None, g=None) -> Verdict:
        if not self.F:
            return Verdict(False, {"reason": "empty homotopy"})
        for i, level in enumerate(self.F):
            if len(level) != len(X):
                return Verdict(False, {"level": i, "reason": "level is not a map on X"})
        if f is not None and tuple(f) != self.F[0]:
            return Verdict(False, {"reason": "F(-, 0) differs from f"})
        if g is not None and tuple(g) != self.F[-1]:
            return Verdict(False, {"reason": "F(-, m) differs from g"})
        c = self.lipschitz
        n = len(X)
        for i in range(len(self.F)):
            for j in range(i, len(self.F)):
                Fi, Fj = self.F[i], self.F[j]
                for x in range(n):
                    for y in range(n):
                        dx = X.d(x, y)
                        if dx == INF:
                            continue
                        if Y.d(Fi[x], Fj[y]) > c * (dx + (j - i)):
                            return Verdict(False, {"pair": [[X.labels[x], i], [X.labels[y], j]],
                                                   "distance": str(Y.d(Fi[x], Fj[y]))})
        return Verdict(True)

    def to_json(self, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> dict:
        return {"kind": "map-homotopy", "lipschitz": str(self.lipschitz),
                "levels": [{X.labels[x]: Y.labels[v] for x, v in enumerate(level)} for level in self.F]}

    @classmethod
    def from_json(cls, data: dict, X: FiniteMetricSpace, Y: FiniteMetricSpace):
        levels = [[Y.index(level[x]) for x in X.labels] for level in data["levels"]]
        return cls(levels, as_scale(data["lipschitz"]))


def verify_certificate(cert, X: FiniteMetricSpace, r=None, **kwargs) -> Verdict:
    """Check a loop or map homotopy certificate; failures carry a witness."""
    if isinstance(cert, HomotopyMatrixCertificate):
        if r is not None and as_scale(r) != cert.scale:
            cert = HomotopyMatrixCertificate(cert.rows, r)
        return cert.verify(X, kwargs.get("source"), kwargs.get("target"))
    if isinstance(cert, MapHomotopyCertificate):
        return cert.verify(X, kwargs.get("Y", X), kwargs.get("f"), kwargs.get("g"))
    raise TypeError(f"not a certificate: {cert!r}")


# -- retractions -------------------------------------------------------------------

def dominated_vertices(X: FiniteMetricSpace, r=1) -> list[tuple[int, int]]:
    """Pairs (v, w), v != w, with closed r-neighbourhood of v inside that of w."""
    adj = X.adjacency(r)
    out = []
    for v in range(len(X)):
        for w in range(len(X)):
            if v != w and adj[v, w] and not (adj[v] & ~adj[w]).any():
                out.append((v, w))
    return out


def retraction_certificate(X: FiniteMetricSpace, v: int, w: int, r=1):
    """Fold v onto w: the retraction and a one-step homotopy from the identity."""
    rho = list(range(len(X)))
    rho[v] = w
    return rho, MapHomotopyCertificate([tuple(range(len(X))), tuple(rho)], as_scale(r))


# -- Hurewicz map ------------------------------------------------------------------

def hurewicz_phi(loop: RLoop, cx: CubeComplex) -> Chain:
    """Sum of the loop's non-repeating steps as 1-cubes of the complex."""
    basis = cx.basis(1)
    out: dict = {}
    pts = loop.points
    for a, b in zip(pts, pts[1:]):
        if a == b:
            continue
        j = basis.index((a, b))
        out[j] = out.get(j, 0) + 1
    return Chain(1, {k: v for k, v in out.items() if v})


def phi_class(loop: RLoop, H: HomologyGroup) -> tuple:
    """Coordinates of phi(loop) in H_1."""
    chain = hurewicz_phi(loop, H.view.cx)
    return H.coordinates(H.view.chain_from_absolute(1, chain.coeffs))


def connecting_paths(X: FiniteMetricSpace, r, p: int) -> dict[int, tuple]:
    """BFS r-paths from p to every reachable point."""
    adj = X.adjacency(r)
    prev = {p: None}
    queue = deque([p])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]).tolist():
            if v not in prev:
                prev[v] = u
                queue.append(v)
    paths = {}
    for q in prev:
        seq = []
        x = q
        while x is not None:
            seq.append(x)
            x = prev[x]
        paths[q] = tuple(reversed(seq))
    return paths


def loop_realizing(chain: dict, basis, X: FiniteMetricSpace, r, p: int) -> RLoop:
    """A loop gamma with phi(gamma) homologous to the 1-cycle ``chain``.

    Each cube sigma with coefficient n contributes (beta_{sigma(0)} sigma beta_{sigma(1)}^-1)^n.
    """
    beta = connecting_paths(X, r, p)
    pts: list = [p]
    for j, n in sorted(chain.items()):
        a, b = (int(v) for v in basis.verts[j])
        if a not in beta or b not in beta:
            raise ValueError("space is not connected at this scale")
        eta = beta[a] + beta[b][::-1]
        if n < 0:
            eta = eta[::-1]
        for _ in range(abs(n)):
            pts.extend(eta[1:])
    return RLoop(tuple(pts), as_scale(r))


def surjectivity_witness(H: HomologyGroup, p: int = 0) -> list[tuple[RLoop, bool]]:
    """For each H_1 generator, a realizing loop and whether phi maps it back correctly."""
    if H.n != 1:
        raise ValueError("surjectivity witnesses live in degree 1")
    cx = H.view.cx
    out = []
    for k, rep in enumerate(H.cycle_reps):
        absolute = H.view.chain_to_absolute(1, rep)
        loop = loop_realizing(absolute, cx.basis(1), cx.X, cx.r, p)
        want = tuple(1 if i == k else 0 for i in range(len(H.cycle_reps)))
        out.append((loop, phi_class(loop, H) == H.group.reduce(want)))
    return out


# -- abelianized A_1 oracle --------------------------------------------------------

def proximity_graph(X: FiniteMetricSpace, r) -> nx.Graph:
    adj = X.adjacency(r)
    G = nx.Graph()
    G.add_nodes_from(range(len(X)))
    iu = np.argwhere(np.triu(adj, 1))
    G.add_edges_from((int(a), int(b)) for a, b in iu)
    return G


def _square_cycles(G: nx.Graph) -> list[tuple]:
    """Closed walks a-b-c(-d)-a along triangles and 4-cycles of G."""
    out = []
    nbr = {v: set(G[v]) for v in G}
    for a in sorted(G):
        for b in sorted(nbr[a]):
            if b <= a:
                continue
            for c in sorted(nbr[a] & nbr[b]):
                if c > b:
                    out.append((a, b, c))
    for a in sorted(G):
        for c in sorted(G):
            if c <= a:
                continue
            common = sorted(nbr[a] & nbr[c])
            for i, b in enumerate(common):
                for d in common[i + 1:]:
                    out.append((a, b, c, d))
    return out


def _edge_vector(walk: Sequence[int], edge_index: dict) -> dict:
    vec: dict = {}
    for u, v in zip(walk, list(walk[1:]) + [walk[0]]):
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        s = 1 if u < v else -1
        e = edge_index[key]
        vec[e] = vec.get(e, 0) + s
    return {k: x for k, x in vec.items() if x}


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


class _RowHNF:
    """Row-echelon lattice basis with positive pivots; canonical coset reduction."""

    def __init__(self, width: int, rows):
        self.width = width
        basis: dict[int, list] = {}
        for r in rows:
            v = [0] * width
            for k, x in r.items():
                v[k] += x
            self._add(basis, v)
        self.rows = basis

    def _add(self, basis, v):
        while True:
            c = next((i for i, x in enumerate(v) if x), None)
            if c is None:
                return
            if c not in basis:
                if v[c] < 0:
                    v = [-x for x in v]
                basis[c] = v
                return
            b = basis[c]
            if v[c] % b[c] == 0:
                q = v[c] // b[c]
                v = [x - q * y for x, y in zip(v, b)]
                continue
            g, s, t = _ext_gcd(b[c], v[c])
            new_b = [s * x + t * y for x, y in zip(b, v)]
            rest = [(v[c] // g) * x - (b[c] // g) * y for x, y in zip(b, v)]
            if new_b[c] < 0:
                new_b = [-x for x in new_b]
            basis[c] = new_b
            v = rest

    def reduce(self, v) -> tuple:
        v = list(v)
        for c in sorted(self.rows):
            b = self.rows[c]
            q = v[c] // b[c]
            if q:
                v = [x - q * y for x, y in zip(v, b)]
        return tuple(v)


@dataclass
class OracleGroup:
    """Z^{non-tree edges} modulo triangle and 4-cycle relations of the proximity graph."""

    group: AbelianGroup
    edges: list
    tree_edges: list
    generators: list
    relations: list = field(repr=False, default_factory=list)
    walks: list = field(repr=False, default_factory=list)


def abelianized_A1_oracle(X: FiniteMetricSpace, r, basepoint=None) -> OracleGroup:
    """Abelianized discrete fundamental group, presented on the proximity graph."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form

    r = as_scale(r)
    G = proximity_graph(X, r)
    if len(X) and not nx.is_connected(G):
        raise ValueError(f"space is not connected at scale {r}")
    p = 0 if basepoint is None else (basepoint if isinstance(basepoint, int) else X.index(basepoint))
    edges = sorted((min(u, v), max(u, v)) for u, v in G.edges)
    edge_index = {e: i for i, e in enumerate(edges)}
    tree = sorted((min(u, v), max(u, v)) for u, v in nx.bfs_tree(G, p).edges) if len(X) else []
    tree_set = set(tree)
    gens = [e for e in edges if e not in tree_set]
    gen_col = {edge_index[e]: k for k, e in enumerate(gens)}
    walks = _square_cycles(G)
    rel_rows = set()
    for w in walks:
        vec = _edge_vector(w, edge_index)
        row = [0] * len(gens)
        for e, x in vec.items():
            if e in gen_col:
                row[gen_col[e]] += x
        if any(row):
            rel_rows.add(tuple(row))
    rels = sorted(rel_rows)
    g = len(gens)
    if not rels or g == 0:
        group = AbelianGroup(g, ())
    else:
        S = smith_normal_form(Matrix(rels), domain=ZZ)
        diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
        nonzero = [d for d in diag if d]
        group = AbelianGroup(g - len(nonzero), tuple(d for d in nonzero if d > 1))
    return OracleGroup(group, edges, tree, gens, rels, walks)


# -- bounded loop-homotopy search --------------------------------------------------

def _row_neighbours(X: FiniteMetricSpace, r, row: tuple) -> list[tuple]:
    """All loops of the same length pointwise within r of ``row``."""
    adj = X.adjacency(r)
    p = row[0]
    cand = [np.flatnonzero(adj[x]).tolist() for x in row]
    cand[0] = [p]
    cand[-1] = [p]
    out = []

    def rec(i, acc):
        if i == len(row):
            out.append(tuple(acc))
            return
        for y in cand[i]:
            if i == 0 or adj[acc[-1], y]:
                acc.append(y)
                rec(i + 1, acc)
                acc.pop()

    rec(0, [])
    return out


def loop_homotopy_search(X: FiniteMetricSpace, r, a: RLoop, b: RLoop, *, max_len: int = 8,
                         max_height: int = 8) -> HomotopyMatrixCertificate | None:
    """Breadth-first search for a homotopy matrix between two loops.

    Both loops are padded to ``max_len`` points; rows of the matrix are loops
    of that length and at most ``max_height`` moves are made.
    """
    if a.basepoint != b.basepoint:
        raise ValueError("loops have different basepoints")
    if len(a) > max_len or len(b) > max_len:
        return None
    start, goal = a.padded(max_len).points, b.padded(max_len).points
    prev = {start: None}
    frontier = [start]
    for _ in range(max_height):
        if goal in prev:
            break
        nxt = []
        for row in frontier:
            for nb in _row_neighbours(X, r, row):
                if nb not in prev:
                    prev[nb] = row
                    nxt.append(nb)
        frontier = nxt
    if goal not in prev:
        return None
    rows = []
    x = goal
    while x is not None:
        rows.append(x)
        x = prev[x]
    return HomotopyMatrixCertificate(rows[::-1], as_scale(r))


@dataclass
class OracleCheck:
    ok: bool
    states: int
    counterexample: dict | None = None


def oracle_move_check(X: FiniteMetricSpace, r, p: int = 0, max_len: int = 8) -> OracleCheck:
    """Check that every single homotopy-matrix move between loops with at most
    ``max_len`` steps preserves the phi-image in the oracle group.

    Padding never changes phi and a matrix of any height is a sequence of
    two-row moves, so this covers every bounded search at once. A dynamic
    program walks two loops in lockstep, keeping the current pair of points and
    the canonical class of the difference of their partial edge vectors modulo
    the oracle relations.
    """
    r = as_scale(r)
    G = proximity_graph(X, r)
    edges = sorted((min(u, v), max(u, v)) for u, v in G.edges)
    eidx = {e: i for i, e in enumerate(edges)}
    rels = [_edge_vector(w, eidx) for w in _square_cycles(G)]
    hnf = _RowHNF(len(edges), rels)
    adj = X.adjacency(r)
    nbrs = [np.flatnonzero(adj[x]).tolist() for x in range(len(X))]

    def step(c, u, v, sign):
        if u == v:
            return c
        e = eidx[(min(u, v), max(u, v))]
        c = list(c)
        c[e] += sign if u < v else -sign
        return c

    zero = tuple([0] * len(edges))
    layers = [{(p, p, zero): None}]
    seen = 1
    for length in range(1, max_len + 1):
        nxt = {}
        for (x, y, c) in layers[-1]:
            for x2 in nbrs[x]:
                cx = step(c, x, x2, 1)
                for y2 in nbrs[y]:
                    if not adj[x2, y2]:
                        continue
                    key = (x2, y2, hnf.reduce(step(cx, y, y2, -1)))
                    if key not in nxt:
                        nxt[key] = (x, y, c)
        layers.append(nxt)
        seen += len(nxt)
        for key in nxt:
            x, y, c = key
            if x == p and y == p and any(c):
                rows = [key]
                for layer in reversed(layers[1:]):
                    rows.append(layer[rows[-1]])
                rows = rows[::-1]
                return OracleCheck(False, seen, {
                    "top": [X.labels[s[0]] for s in rows],
                    "bottom": [X.labels[s[1]] for s in rows]})
    return OracleCheck(True, seen)
