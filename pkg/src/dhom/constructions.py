"""Example spaces: suspensions, discrete spheres, cycles, torus grids, wedges, earrings."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .metric import (FiniteMetricSpace, MetricError, disjoint_union, from_edges, from_matrix,
                     from_points, product_with_interval, quotient)


@dataclass(frozen=True)
class SuspensionSpace:
    base: FiniteMetricSpace
    space: FiniteMetricSpace

    @property
    def bottom(self) -> int:
        return self.space.index("0")

    @property
    def top(self) -> int:
        return self.space.index("t")

    def halves(self) -> tuple[list[int], list[int]]:
        """The cover {X_s minus t, X_s minus 0} used for the suspension shift."""
        n = len(self.space)
        return ([i for i in range(n) if i != self.top], [i for i in range(n) if i != self.bottom])


def suspension(X: FiniteMetricSpace) -> SuspensionSpace:
    """X x {0,1,2,3} with the l1 metric, level 0 collapsed to "0" and level 3 to "t"."""
    if len(X) == 0:
        raise MetricError("cannot suspend the empty space")
    n = len(X)
    Y = product_with_interval(X, 3)
    Xs = quotient(Y, [list(range(n)), list(range(3 * n, 4 * n))], names=["0", "t"])
    return SuspensionSpace(X, Xs)


def point() -> FiniteMetricSpace:
    return from_matrix(["p"], [[0]])


def two_point_extended() -> FiniteMetricSpace:
    return disjoint_union(from_matrix(["a"], [[0]]), from_matrix(["b"], [[0]]))


def sphere_space(n: int) -> FiniteMetricSpace:
    """n-fold suspension of two points at infinite distance."""
    if n < 0:
        raise ValueError("sphere dimension must be >= 0")
    X = two_point_extended()
    for _ in range(n):
        X = suspension(X).space
    return X


def cycle(k: int) -> FiniteMetricSpace:
    if k < 3:
        raise ValueError("cycle length must be >= 3")
    return from_edges([(i, (i + 1) % k) for i in range(k)])


def path(k: int) -> FiniteMetricSpace:
    """Path graph on k vertices 0..k-1."""
    if k < 1:
        raise ValueError("path needs a vertex")
    if k == 1:
        return from_matrix(["0"], [[0]])
    return from_edges([(i, i + 1) for i in range(k - 1)])


def torus_grid(p: int, q: int) -> FiniteMetricSpace:
    """Cartesian product of a p-cycle and a q-cycle with the graph metric."""
    if p < 3 or q < 3:
        raise ValueError("torus grid sides must be >= 3")
    name = lambda i, j: f"{i}_{j}"
    edges = []
    for i in range(p):
        for j in range(q):
            edges.append((name(i, j), name((i + 1) % p, j)))
            edges.append((name(i, j), name(i, (j + 1) % q)))
    labels = [name(i, j) for i in range(p) for j in range(q)]
    return from_edges(edges, labels=labels)


def wedge(spaces, basepoints=None) -> FiniteMetricSpace:
    """Disjoint union with one basepoint of each summand identified to "*"."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("wedge of nothing")
    U = disjoint_union(*spaces)
    offsets, total = [], 0
    for S in spaces:
        offsets.append(total)
        total += len(S)
    bps = basepoints or [0] * len(spaces)
    cls = [off + (b if isinstance(b, int) else S.index(b)) for off, b, S in zip(offsets, bps, spaces)]
    return quotient(U, [cls], names=["*"])


def coarse_hawaiian(k_max: int, precision: str = "1e-6") -> FiniteMetricSpace:
    """Circles of radius k^2 (k = 1..k_max) through a common origin, sampled at
    arc spacing at most 1, with the Euclidean metric on rounded coordinates."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    labels, coords = ["o"], [("0", "0")]
    for k in range(1, k_max + 1):
        rad = k * k
        count = math.ceil(2 * math.pi * rad)
        for j in range(1, count):
            th = 2 * math.pi * j / count
            x, y = rad * math.sin(th), rad - rad * math.cos(th)
            labels.append(f"c{k}.{j}")
            coords.append((f"{x:.6f}", f"{y:.6f}"))
    return from_points(labels, coords, p="2", precision=precision)


FIXTURE_HELP = ("point | two-points | cycle:K | path:K | torus:PxQ | sphere:N | hawaiian:K | "
                "wedge:SPEC+SPEC[+...] | suspend:SPEC")


def fixture(spec: str) -> FiniteMetricSpace:
    """Build a named example space, e.g. ``cycle:5``, ``torus:5x5``, ``wedge:cycle:5+cycle:6``."""
    spec = spec.strip()
    kind, _, arg = spec.partition(":")
    try:
        if kind == "point":
            return point()
        if kind in ("two-points", "s0"):
            return two_point_extended()
        if kind == "cycle":
            return cycle(int(arg))
        if kind == "path":
            return path(int(arg))
        if kind == "torus":
            p, q = arg.lower().split("x")
            return torus_grid(int(p), int(q))
        if kind == "sphere":
            return sphere_space(int(arg))
        if kind == "hawaiian":
            return coarse_hawaiian(int(arg))
        if kind == "wedge":
            return wedge([fixture(s) for s in arg.split("+")])
        if kind == "suspend":
            return suspension(fixture(arg)).space
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad fixture {spec!r}: {exc}") from None
    raise ValueError(f"unknown fixture {spec!r}; expected {FIXTURE_HELP}")
