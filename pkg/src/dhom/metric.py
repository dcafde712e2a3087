"""Finite extended metric spaces with exact rational distances."""
from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

INF = math.inf

Distance = Union[Fraction, float]  # a Fraction, or INF


class MetricError(ValueError):
    """Raised when input data does not describe a valid (extended) metric."""


def as_distance(value) -> Distance:
    """Convert ints, Fractions, decimal strings and the token ``inf`` exactly."""
    if isinstance(value, Fraction):
        d = value
    elif isinstance(value, bool):
        raise MetricError(f"not a distance: {value!r}")
    elif isinstance(value, int):
        d = Fraction(value)
    elif isinstance(value, float):
        if math.isinf(value) and value > 0:
            return INF
        # floats are only accepted when they are exact binary values the user typed
        d = Fraction(value)
    elif isinstance(value, (str, Decimal)):
        text = str(value).strip()
        if text.lower() in ("inf", "infinity", "+inf"):
            return INF
        try:
            d = Fraction(Decimal(text))
        except Exception as exc:  # decimal.InvalidOperation and friends
            try:
                d = Fraction(text)  # "3/2"
            except ValueError:
                raise MetricError(f"not a distance: {value!r}") from exc
    else:
        raise MetricError(f"not a distance: {value!r}")
    if d < 0:
        raise MetricError(f"negative distance {value!r}")
    return d


def as_scale(value) -> Fraction:
    r = as_distance(value)
    if r == INF or r <= 0:
        raise MetricError(f"scale must be a positive finite rational, got {value!r}")
    return r


def _fmt(d: Distance) -> str:
    return "inf" if d == INF else str(d)


class FiniteMetricSpace:
    """Immutable finite extended metric space.

    ``dist[i][j]`` holds exact ``Fraction`` values or ``INF``. The metric axioms
    (including every triangle inequality) are checked on construction.
    """

    __slots__ = ("labels", "dist", "merged", "_index", "_cache")

    def __init__(self, labels: Sequence, dist: Sequence[Sequence], *, merged=(), check: bool = True):
        labels = tuple(str(x) for x in labels)
        n = len(labels)
        if len(set(labels)) != n:
            seen = set()
            dup = next(x for x in labels if x in seen or seen.add(x))
            raise MetricError(f"duplicate label {dup!r}")
        if len(dist) != n or any(len(row) != n for row in dist):
            raise MetricError("distance matrix must be square with one row per label")
        rows = tuple(tuple(as_distance(v) for v in row) for row in dist)
        self.labels = labels
        self.dist = rows
        self.merged = tuple(merged)
        self._index = {x: i for i, x in enumerate(labels)}
        self._cache = {}
        if check:
            self._validate()

    # -- validation -------------------------------------------------------
    def _validate(self) -> None:
        n, d, lab = len(self.labels), self.dist, self.labels
        for i in range(n):
            if d[i][i] != 0:
                raise MetricError(f"nonzero diagonal at {lab[i]!r}")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise MetricError(f"asymmetric matrix at ({lab[i]!r}, {lab[j]!r})")
                if d[i][j] == 0:
                    raise MetricError(f"distinct points {lab[i]!r}, {lab[j]!r} at distance 0")
        bad = _triangle_violation(d)
        if bad is not None:
            i, j, k = bad
            raise MetricError(f"triangle inequality violated at ({lab[i]}, {lab[j]}, {lab[k]})")

    # -- basic accessors --------------------------------------------------
    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({len(self)} points)"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteMetricSpace) and self.labels == other.labels
                and self.dist == other.dist)

    def __hash__(self) -> int:
        return hash((self.labels, self.dist))

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown point {label!r}") from None

    def indices(self, labels: Iterable) -> list[int]:
        return [self.index(x) for x in labels]

    def d(self, i: int, j: int) -> Distance:
        return self.dist[i][j]

    @property
    def diameter(self) -> Distance:
        best: Distance = Fraction(0)
        for row in self.dist:
            for v in row:
                if v > best:
                    best = v
        return best

    def adjacency(self, r) -> np.ndarray:
        """Boolean matrix of the relation ``d(x, y) <= r`` (diagonal included)."""
        r = as_scale(r)
        key = ("adj", r)
        if key not in self._cache:
            a = np.array([[v <= r for v in row] for row in self.dist], dtype=bool).reshape(len(self), len(self))
            a.setflags(write=False)
            self._cache[key] = a
        return self._cache[key]

    def subspace(self, points: Iterable) -> "FiniteMetricSpace":
        idx = sorted({p if isinstance(p, (int, np.integer)) else self.index(p) for p in points})
        return FiniteMetricSpace([self.labels[i] for i in idx],
                                 [[self.dist[i][j] for j in idx] for i in idx], check=False)

    def to_rows(self) -> list[list[str]]:
        """Distance-matrix CSV rows (header of labels, then the matrix)."""
        return [list(self.labels)] + [[_fmt(v) for v in row] for row in self.dist]


def _triangle_violation(d) -> tuple[int, int, int] | None:
    """Return the first (x, y, z) with d(x,z) > d(x,y) + d(y,z), or None."""
    n = len(d)
    if n < 3:
        return None
    finite = [v for row in d for v in row if v != INF]
    denom = 1
    for v in finite:
        denom = math.lcm(denom, v.denominator)
    top = max(finite) * denom if finite else 0
    if top * 4 + 1 < 2 ** 60:
        big = int(top) * 4 + 1  # stands in for INF: exceeds any finite two-term sum
        m = np.array([[big if v == INF else int(v * denom) for v in row] for row in d], dtype=np.int64)
        for y in range(n):
            viol = m > (m[:, y, None] + m[None, y, :])
            if viol.any():
                x, z = map(int, np.argwhere(viol)[0])
                return x, y, z
        return None
    for y in range(n):
        for x in range(n):
            dxy = d[x][y]
            if dxy == INF:
                continue
            for z in range(n):
                if d[x][z] > dxy + d[y][z]:
                    return x, y, z
    return None


# -- construction ------------------------------------------------------------

def from_matrix(labels: Sequence, matrix: Sequence[Sequence]) -> FiniteMetricSpace:
    return FiniteMetricSpace(labels, matrix)


def _all_pairs_shortest(n: int, weights: dict) -> list[list[Distance]]:
    """Exact Floyd-Warshall; ``weights`` maps (i, j) to a non-negative distance."""
    dist: list[list[Distance]] = [[INF] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    for (i, j), w in weights.items():
        if w < dist[i][j]:
            dist[i][j] = dist[j][i] = w
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return dist


def from_edges(edges: Iterable, labels: Sequence | None = None) -> FiniteMetricSpace:
    """Graph (shortest-path) metric from ``(u, v)`` or ``(u, v, weight)`` triples.

    Vertices in different components end up at distance INF.
    """
    edges = [tuple(e) for e in edges]
    order = [str(x) for x in labels] if labels is not None else []
    seen = set(order)
    for e in edges:
        for x in e[:2]:
            if str(x) not in seen:
                seen.add(str(x))
                order.append(str(x))
    pos = {x: i for i, x in enumerate(order)}
    weights = {}
    for e in edges:
        if len(e) not in (2, 3):
            raise MetricError(f"bad edge {e!r}")
        u, v = pos[str(e[0])], pos[str(e[1])]
        w = as_distance(e[2]) if len(e) == 3 else Fraction(1)
        if u == v:
            continue
        if w == 0 or w == INF:
            raise MetricError(f"edge weight must be positive and finite: {e!r}")
        key = (min(u, v), max(u, v))
        weights[key] = min(w, weights.get(key, INF))
    return FiniteMetricSpace(order, _all_pairs_shortest(len(order), weights))


def ceil_to_grid(x: Fraction, precision: Fraction) -> Fraction:
    return math.ceil(x / precision) * precision


def _sqrt_ceil(x: Fraction, precision: Fraction) -> Fraction:
    """Smallest grid multiple of ``precision`` that is >= sqrt(x), exactly."""
    q = precision
    k = math.isqrt(math.floor(x / (q * q)))
    while (k * q) ** 2 < x:
        k += 1
    while k > 0 and ((k - 1) * q) ** 2 >= x:
        k -= 1
    return k * q


def from_points(labels: Sequence, coords: Sequence[Sequence], p="2", precision="1e-6") -> FiniteMetricSpace:
    """Metric of a decimal point cloud under the l1, l2 or l-infinity norm.

    Coordinates are rounded to ``precision`` first. l1 and l-infinity distances
    are then exact; l2 distances are rounded *up* to the precision grid, which
    keeps every triangle inequality valid.
    """
    q = as_scale(precision)
    pts = [[Fraction(round(as_distance_signed(c) / q)) * q for c in row] for row in coords]
    if len({len(row) for row in pts}) > 1:
        raise MetricError("points have different dimensions")
    norm = str(p).lower()
    n = len(pts)
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            diff = [abs(a - b) for a, b in zip(pts[i], pts[j])]
            if norm == "1":
                v = sum(diff, Fraction(0))
            elif norm in ("inf", "max"):
                v = max(diff, default=Fraction(0))
            elif norm == "2":
                v = _sqrt_ceil(sum((t * t for t in diff), Fraction(0)), q)
            else:
                raise MetricError(f"unsupported norm {p!r}")
            dist[i][j] = dist[j][i] = v
    return FiniteMetricSpace(labels, dist)


def as_distance_signed(value) -> Fraction:
    text = str(value).strip()
    if text.startswith("-"):
        return -as_distance(text[1:])
    return as_distance(text) if not isinstance(value, Fraction) else value


def build_space(*, matrix=None, labels=None, edges=None, points=None, p="2", precision="1e-6") -> FiniteMetricSpace:
    """Build a validated space from exactly one of ``matrix``, ``edges`` or ``points``."""
    given = [x is not None for x in (matrix, edges, points)]
    if sum(given) != 1:
        raise ValueError("give exactly one of matrix=, edges=, points=")
    if matrix is not None:
        if labels is None:
            labels = [str(i) for i in range(len(matrix))]
        return from_matrix(labels, matrix)
    if edges is not None:
        return from_edges(edges, labels)
    if labels is None:
        labels = [str(i) for i in range(len(points))]
    return from_points(labels, points, p=p, precision=precision)


# -- scale queries -------------------------------------------------------------

def is_connected_at_scale(X: FiniteMetricSpace, r) -> bool:
    """True iff every pair of points is joined by an r-path."""
    n = len(X)
    if n <= 1:
        return True
    adj = X.adjacency(r)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i] & ~seen):
            seen[j] = True
            stack.append(int(j))
    return bool(seen.all())


def connectivity_threshold(X: FiniteMetricSpace) -> Distance:
    """Smallest scale at which X is connected (INF if never, 0 for one point)."""
    for r in critical_scales(X):
        if is_connected_at_scale(X, r):
            return r
    return Fraction(0) if len(X) <= 1 else INF


def critical_scales(X: FiniteMetricSpace) -> list[Fraction]:
    """Sorted distinct finite nonzero pairwise distances."""
    vals = {v for i, row in enumerate(X.dist) for v in row[i + 1:] if v != INF}
    return sorted(vals)


# -- combinations ------------------------------------------------------------

def product_with_interval(X: FiniteMetricSpace, m: int) -> FiniteMetricSpace:
    """X x {0..m} with the l1 metric; point (x, i) is labelled ``"x.i"``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    labels = [f"{x}.{i}" for i in range(m + 1) for x in X.labels]
    n = len(X)
    dist = [[X.dist[a % n][b % n] + abs(a // n - b // n) for b in range(len(labels))]
            for a in range(len(labels))]
    return FiniteMetricSpace(labels, dist, check=False)


def disjoint_union(*spaces: FiniteMetricSpace) -> FiniteMetricSpace:
    """Extended-metric disjoint union; labels are prefixed ``"k:"`` only on clashes."""
    all_labels = [x for S in spaces for x in S.labels]
    if len(set(all_labels)) != len(all_labels):
        all_labels = [f"{k}:{x}" for k, S in enumerate(spaces) for x in S.labels]
    n = len(all_labels)
    dist: list[list[Distance]] = [[INF] * n for _ in range(n)]
    off = 0
    for S in spaces:
        for i in range(len(S)):
            for j in range(len(S)):
                dist[off + i][off + j] = S.dist[i][j]
        off += len(S)
    return FiniteMetricSpace(all_labels, dist, check=False)


def quotient(X: FiniteMetricSpace, classes: Sequence[Iterable], names: Sequence | None = None) -> FiniteMetricSpace:
    """Identify each class of points to a single point (chain-infimum quotient metric).

    The quotient distance is the shortest path in the graph whose nodes are the
    points of X plus one node per class, joined to its members at length 0.
    Surviving points at quotient distance 0 are merged; ``result.merged`` lists
    the merged label groups.
    """
    classes = [[p if isinstance(p, (int, np.integer)) else X.index(p) for p in c] for c in classes]
    if any(len(c) == 0 for c in classes):
        raise MetricError("empty identification class")
    owner = {}
    for k, c in enumerate(classes):
        for p in c:
            if p in owner:
                raise MetricError(f"point {X.labels[p]!r} appears in two classes")
            owner[p] = k
    n = len(X)
    weights = {(i, j): X.dist[i][j] for i in range(n) for j in range(i + 1, n) if X.dist[i][j] != INF}
    for p, k in owner.items():
        weights[(p, n + k)] = Fraction(0)
    full = _all_pairs_shortest(n + len(classes), weights)

    if names is None:
        names = ["{" + ",".join(X.labels[p] for p in c) + "}" for c in classes]
    # surviving nodes, ordered by the smallest original point they stand for
    nodes = [(X.labels[i], i) for i in range(n) if i not in owner]
    nodes += [(str(names[k]), n + k) for k in range(len(classes))]
    nodes.sort(key=lambda node: node[1] if node[1] < n else min(classes[node[1] - n]))

    # merge survivors at distance zero
    groups: list[list[int]] = []
    for t in range(len(nodes)):
        for g in groups:
            if full[nodes[g[0]][1]][nodes[t][1]] == 0:
                g.append(t)
                break
        else:
            groups.append([t])
    merged = tuple(tuple(nodes[t][0] for t in g) for g in groups if len(g) > 1)
    keep = [nodes[g[0]] for g in groups]
    labels = [name for name, _ in keep]
    dist = [[full[a][b] for _, b in keep] for _, a in keep]
    return FiniteMetricSpace(labels, dist, merged=merged)


def combine(kind: str, *args, **kwargs) -> FiniteMetricSpace:
    """Dispatch to ``product_with_interval``, ``quotient`` or ``disjoint_union``."""
    ops = {"product-with-interval": product_with_interval, "quotient-identify": quotient,
           "disjoint-union": disjoint_union}
    if kind not in ops:
        raise ValueError(f"unknown combination {kind!r}; expected one of {sorted(ops)}")
    return ops[kind](*args, **kwargs)
