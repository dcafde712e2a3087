"""Direct systems of homology groups over a ladder of scales."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cubes import CubeComplex
from .homology import AbelianGroup, ChainView, HomologyGroup, map_homology
from .metric import FiniteMetricSpace, as_scale, connectivity_threshold, critical_scales
from .verify import GroupMap, image_subgroup, is_isomorphism


@dataclass(frozen=True)
class ScaleLadder:
    scales: tuple

    def __post_init__(self):
        s = tuple(as_scale(x) for x in self.scales)
        if not s:
            raise ValueError("ladder is empty")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("ladder scales must be strictly increasing")
        object.__setattr__(self, "scales", s)

    def __len__(self) -> int:
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)

    @classmethod
    def parse(cls, text: str) -> "ScaleLadder":
        return cls(tuple(t for t in text.replace(";", ",").split(",") if t.strip()))


def fold_dominated(X: FiniteMetricSpace, r) -> tuple[np.ndarray, list[int]]:
    """Repeatedly fold a vertex v onto w when the closed r-neighbourhood of v lies in that of w.

    Returns the surviving (core) mask and the composite retraction onto it.
    Each fold is a proximity-preserving retraction joined to the identity by a
    one-step homotopy, so the core has the same homology at scale r.
    """
    adj = X.adjacency(r).copy()
    alive = np.ones(len(X), dtype=bool)
    rho = list(range(len(X)))
    changed = True
    while changed:
        changed = False
        for v in np.flatnonzero(alive).tolist():
            nv = adj[v] & alive
            cand = np.flatnonzero(nv & alive)
            for w in cand.tolist():
                if w != v and not (nv & ~adj[w]).any():
                    alive[v] = False
                    rho[v] = w
                    changed = True
                    break
    for v in range(len(X)):
        w = v
        while rho[w] != w:
            w = rho[w]
        rho[v] = w
    return alive, rho


@dataclass
class Rung:
    scale: Fraction
    groups: dict                 # n -> HomologyGroup
    retraction: list | None = None
    core_size: int | None = None


@dataclass
class DirectSystemReport:
    scales: tuple
    n_max: int
    groups: dict = field(default_factory=dict)        # n -> [AbelianGroup per rung]
    maps: dict = field(default_factory=dict)          # n -> [GroupMap rung i -> i + 1]
    ranks: dict = field(default_factory=dict)         # n -> [image rank per consecutive map]
    eventual_rank: dict = field(default_factory=dict)
    stabilization: dict = field(default_factory=dict)  # n -> first rung of the iso suffix
    coherence: dict | None = None
    core_sizes: list | None = None
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def stable_suffix(self, n: int) -> tuple:
        return self.scales[self.stabilization[n]:]

    def free_ranks(self, n: int) -> list[int]:
        return [g.free_rank for g in self.groups[n]]

    def to_json(self) -> dict:
        out = {
            "scales": [str(s) for s in self.scales],
            "n_max": self.n_max,
            "groups": {str(n): [g.to_json() for g in gs] for n, gs in self.groups.items()},
            "maps": {str(n): [m.to_json() for m in ms] for n, ms in self.maps.items()},
            "image_ranks": {str(n): v for n, v in self.ranks.items()},
            "eventual_image_rank": {str(n): v for n, v in self.eventual_rank.items()},
            "stabilization": {str(n): [str(s) for s in self.stable_suffix(n)]
                              for n in self.stabilization},
            "warnings": self.warnings,
            "notes": self.notes,
        }
        if self.coherence is not None:
            out["coherence"] = self.coherence
        if self.core_sizes is not None:
            out["core_sizes"] = self.core_sizes
        return out

    def barcode_csv(self) -> str:
        """Rank-versus-scale rows: n, scale, free rank, torsion, rank of map to next rung."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "scale", "free_rank", "torsion", "image_rank_to_next"])
        for n in sorted(self.groups):
            for i, g in enumerate(self.groups[n]):
                nxt = self.ranks[n][i] if i < len(self.ranks[n]) else ""
                w.writerow([n, str(self.scales[i]), g.free_rank,
                            " ".join(map(str, g.torsion)), nxt])
        return buf.getvalue()


def subgroup_rank(m: GroupMap) -> int:
    """Rank of the image subgroup of a map."""
    return image_subgroup(m).rank - sum(1 for a in m.tgt if a)


def compose_maps(g: GroupMap, f: GroupMap) -> GroupMap:
    rows = [[sum(g.matrix[i][t] * f.matrix[t][j] for t in range(len(f.tgt)))
             for j in range(len(f.src))] for i in range(len(g.tgt))]
    rows = [[x % a if a else x for x in row] for row, a in zip(rows, g.tgt)]
    return GroupMap(rows, f.src, g.tgt)


def _rung(X: FiniteMetricSpace, s, n_max: int, core: bool, cx_kwargs) -> Rung:
    if core:
        mask, rho = fold_dominated(X, s)
        cx = CubeComplex(X, s, support=mask, **cx_kwargs)
        return Rung(s, {n: HomologyGroup(ChainView(cx), n) for n in range(n_max + 1)},
                    rho, int(mask.sum()))
    cx = CubeComplex(X, s, **cx_kwargs)
    return Rung(s, {n: HomologyGroup(ChainView(cx), n) for n in range(n_max + 1)})


def _map(a: Rung, b: Rung, n: int) -> GroupMap:
    f = b.retraction  # identity on points, then retract onto the target core
    return GroupMap.of(map_homology(a.groups[n], b.groups[n], f))


def scale_scan(X: FiniteMetricSpace, n_max: int, ladder=None, *, core: bool = False,
               coherence: bool = False, **cx_kwargs) -> DirectSystemReport:
    """Groups H_{n,s} at every rung and the inclusion-induced maps between consecutive rungs.

    ``core=True`` computes each rung on the dominated-vertex core of its
    proximity graph. ``coherence=True`` also checks i_{r,t} = i_{s,t} i_{r,s}
    for every triple of rungs.
    """
    if ladder is None:
        ladder = critical_scales(X)
        if not ladder:
            ladder = [1]
    lad = ladder if isinstance(ladder, ScaleLadder) else ScaleLadder(tuple(ladder))
    rep = DirectSystemReport(lad.scales, n_max)
    thr = connectivity_threshold(X)
    for s in lad.scales:
        if s < thr:
            rep.warnings.append(f"scale {s} is below the connectivity threshold {thr}")
    rungs = [_rung(X, s, n_max, core, cx_kwargs) for s in lad.scales]
    if core:
        rep.core_sizes = [r.core_size for r in rungs]
    for n in range(n_max + 1):
        rep.groups[n] = [r.groups[n].group for r in rungs]
        maps = [_map(a, b, n) for a, b in zip(rungs, rungs[1:])]
        rep.maps[n] = maps
        rep.ranks[n] = [subgroup_rank(m) for m in maps]
        total = None
        for m in maps:
            total = m if total is None else compose_maps(m, total)
        rep.eventual_rank[n] = (subgroup_rank(total) if total is not None
                                else rungs[0].groups[n].group.free_rank)
        start = len(rungs) - 1
        while start > 0 and is_isomorphism(maps[start - 1]):
            start -= 1
        rep.stabilization[n] = start
    if coherence:
        rep.coherence = coherence_check(rungs, n_max)
    diam = X.diameter
    if diam != float("inf") and lad.scales[-1] >= diam:
        rep.notes.append(f"last rung {lad.scales[-1]} >= diameter {diam}: groups in degree >= 1 "
                         "vanish there, so the finite system has trivial limit")
    return rep


def coherence_check(rungs: list, n_max: int) -> dict:
    """Compare the direct map r -> t with the composite through s for all r < s < t."""
    checked, failures = 0, []
    for n in range(n_max + 1):
        direct = {}
        for i in range(len(rungs)):
            for k in range(i + 1, len(rungs)):
                direct[i, k] = _map(rungs[i], rungs[k], n)
        for i in range(len(rungs)):
            for j in range(i + 1, len(rungs)):
                for k in range(j + 1, len(rungs)):
                    checked += 1
                    if compose_maps(direct[j, k], direct[i, j]).matrix != direct[i, k].matrix:
                        failures.append({"n": n, "scales": [str(rungs[x].scale) for x in (i, j, k)]})
    return {"triples": checked, "ok": not failures, "failures": failures}
