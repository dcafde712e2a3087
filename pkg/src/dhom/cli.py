"""Command line interface: ``dhom {homology,scan,verify,suspend,hurewicz,info}``.

Exit status: 0 success, 1 verification failure, 2 input error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .cubes import DEFAULT_BASIS_CAP, DEFAULT_MAX_DIM, CapExceeded, CubeComplex
from .metric import MetricError, as_scale, connectivity_threshold, critical_scales, is_connected_at_scale


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    fmt: str | None = None
    norm: str = "2"
    precision: str = "1e-6"
    scale: str | None = None
    ladder: str | None = None
    n_max: int = 2
    cap_basis: int = DEFAULT_BASIS_CAP
    max_dim: int = DEFAULT_MAX_DIM + 2
    workers: int = 1
    out: str | None = None
    report: str = "text"
    cover: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def cx_kwargs(self) -> dict:
        return {"cap": self.cap_basis, "max_dim": self.max_dim, "workers": self.workers}


class InputError(Exception):
    pass


def load(cfg: RunConfig):
    from .constructions import fixture
    from .io import read_space

    if not cfg.space:
        raise InputError("no input: pass --space FILE or a fixture name")
    if os.path.exists(cfg.space):
        return read_space(cfg.space, cfg.fmt, cfg.norm, cfg.precision)
    if cfg.fmt:
        raise InputError(f"file not found: {cfg.space}")
    return fixture(cfg.space)


def _scale(cfg: RunConfig, default="1"):
    return as_scale(cfg.scale if cfg.scale is not None else default)


# -- commands ------------------------------------------------------------------------


def cmd_info(cfg: RunConfig, X) -> tuple[int, dict, str]:
    cs = critical_scales(X)
    thr = connectivity_threshold(X)
    rep = {"points": len(X), "diameter": str(X.diameter),
           "critical_scales": [str(s) for s in cs],
           "connectivity_threshold": str(thr),
           "merged": [list(m) for m in getattr(X, "merged", ())]}
    text = "\n".join([
        f"points: {len(X)}",
        f"diameter: {X.diameter}",
        f"critical scales: [{', '.join(map(str, cs))}]",
        f"connected from scale: {thr}",
    ])
    return 0, rep, text


def cmd_homology(cfg: RunConfig, X) -> tuple[int, dict, str]:
    from .homology import homology
    from .io import read_subset

    r = _scale(cfg)
    cx = CubeComplex(X, r, **cfg.cx_kwargs())
    variant, A = "absolute", None
    if cfg.extra.get("reduced"):
        variant = "reduced"
    if cfg.extra.get("relative"):
        variant, A = "relative", read_subset(cfg.extra["relative"])
    groups = {}
    lines = []
    for n in range(cfg.n_max + 1):
        H = homology(cx, None, n, variant=variant, A=A)
        groups[str(n)] = H.group.to_json()
        if cfg.extra.get("cycles"):
            groups[str(n)]["cycle_reps"] = [
                [[X.labels[v] for v in cx.basis(n).verts[j]] + [c] for j, c in sorted(ch.coeffs.items())]
                for ch in H.chains()]
        tag = {"absolute": "H", "reduced": "~H", "relative": "H"}[variant]
        rel = "" if A is None else ", A"
        lines.append(f"{tag}_{n}(X{rel}) = {H.group}")
    rep = {"scale": str(r), "variant": variant, "n_max": cfg.n_max, "groups": groups}
    if cfg.extra.get("dump_complex"):
        dump = {"scale": str(r), "bases": {}, "boundaries": {}}
        for n in range(cfg.n_max + 2):
            dump["bases"][str(n)] = cx.basis(n).to_json(X.labels)
            if n >= 1:
                dump["boundaries"][str(n)] = cx.boundary(n).to_json()
        with open(cfg.extra["dump_complex"], "w") as fh:
            json.dump(dump, fh)
    return 0, rep, "\n".join(lines)


def cmd_scan(cfg: RunConfig, X) -> tuple[int, dict, str]:
    from .scan import ScaleLadder, scale_scan

    ladder = ScaleLadder.parse(cfg.ladder) if cfg.ladder else None
    rep = scale_scan(X, cfg.n_max, ladder, core=cfg.extra.get("core", False),
                     coherence=cfg.extra.get("coherence", False), **cfg.cx_kwargs())
    lines = []
    for n in range(cfg.n_max + 1):
        lines.append(f"n={n}: " + ", ".join(f"{s}:{g}" for s, g in zip(rep.scales, rep.groups[n])))
        lines.append(f"  image ranks {rep.ranks[n]}, eventual image rank {rep.eventual_rank[n]}, "
                     f"stable from {rep.scales[rep.stabilization[n]]}")
    lines += [f"warning: {w}" for w in rep.warnings] + [f"note: {t}" for t in rep.notes]
    status = 0 if rep.coherence is None or rep.coherence["ok"] else 1
    data = rep.to_json()
    if cfg.report == "csv":
        return status, data, rep.barcode_csv().rstrip("\n")
    return status, data, "\n".join(lines)


def cmd_verify(cfg: RunConfig, X) -> tuple[int, dict, str]:
    from .homotopy import dominated_vertices, retraction_certificate
    from .io import read_subset
    from .verify import (axiom_suite, boundary_law_check, homotopy_axiom_check,
                         mayer_vietoris_check)

    r = _scale(cfg)
    kw = cfg.cx_kwargs()
    checks = []
    bd = boundary_law_check(X, r, cfg.n_max + 1, **kw)
    checks.append({"check": "boundary-law", "ok": all(b["zero"] for b in bd), "detail": bd})
    covers = [read_subset(c) for c in cfg.cover]
    A = covers[0] if covers else []
    B = covers[1] if len(covers) > 1 else None
    suite = axiom_suite(X, A, r, cfg.n_max, B=B, **kw)
    checks.append({"check": "long-exact-sequence", "ok": suite.les.ok, "detail": suite.les.to_json()})
    checks.append({"check": "dimension", "ok": all(suite.dimension), "detail": suite.dimension})
    if B is not None:
        checks.append({"check": "excision", "ok": suite.excision.ok, "detail": suite.excision.to_json()})
        mv = mayer_vietoris_check(X, A, B, r, cfg.n_max, cover_dim=cfg.extra.get("cover_dim"), **kw)
        checks.append({"check": "mayer-vietoris", "ok": mv.ok, "detail": mv.to_json()})
    dom = dominated_vertices(X, r)
    if dom:
        v, w = dom[0]
        rho, cert = retraction_certificate(X, v, w, r)
        h = homotopy_axiom_check(X, X, cert, r, cfg.n_max, **kw)
        checks.append({"check": "homotopy", "ok": h.ok, "fold": [X.labels[v], X.labels[w]],
                       "detail": h.to_json()})
    ok = all(c["ok"] for c in checks)
    lines = [f"{'ok  ' if c['ok'] else 'FAIL'} {c['check']}" for c in checks]
    for c in checks:
        if c["check"] == "mayer-vietoris":
            d = c["detail"]
            if d["refused"]:
                lines.append(f"  refused: {d.get('reason')}; witness {d['cover']['witness']}")
            for node in d["exactness"]:
                lines.append(f"  {node['node']}: {node['group']} im={node['rank_im']} "
                             f"ker={node['rank_ker']} {'exact' if node['exact'] else 'NOT exact'}")
    return (0 if ok else 1), {"scale": str(r), "n_max": cfg.n_max, "ok": ok, "checks": checks}, "\n".join(lines)


def cmd_suspend(cfg: RunConfig, X) -> tuple[int, dict, str]:
    import io as _io

    from .constructions import suspension
    from .io import write_matrix_csv

    S = suspension(X).space
    buf = _io.StringIO()
    write_matrix_csv(S, buf)
    return 0, {"points": len(S), "labels": list(S.labels)}, buf.getvalue().rstrip("\n")


def cmd_hurewicz(cfg: RunConfig, X) -> tuple[int, dict, str]:
    from .homology import groups_isomorphic, homology
    from .homotopy import abelianized_A1_oracle

    r = _scale(cfg)
    if not is_connected_at_scale(X, r):
        raise InputError(f"space is not connected at scale {r}")
    bp = cfg.extra.get("basepoint")
    H = homology(X, r, 1, **cfg.cx_kwargs()).group
    O = abelianized_A1_oracle(X, r, bp).group
    same = groups_isomorphic(H, O)
    rep = {"scale": str(r), "homology": H.to_json(), "abelianized_A1": O.to_json(), "isomorphic": same}
    text = f"H_1 = {H}\nab(A_1) = {O}\n{'isomorphic' if same else 'NOT isomorphic'}"
    return (0 if same else 1), rep, text


COMMANDS = {"info": cmd_info, "homology": cmd_homology, "scan": cmd_scan, "verify": cmd_verify,
            "suspend": cmd_suspend, "hurewicz": cmd_hurewicz}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="input file or fixture (cycle:5, torus:5x5, sphere:2, ...)")
    common.add_argument("--format", dest="fmt", choices=["matrix", "edges", "points"])
    common.add_argument("--norm", default="2", choices=["1", "2", "inf"], help="point-cloud norm")
    common.add_argument("--precision", default="1e-6", help="point-cloud rounding precision")
    common.add_argument("--scale", help="scale r (exact decimal or fraction)")
    common.add_argument("--nmax", dest="n_max", type=int, default=2)
    common.add_argument("--cap-basis", type=int, default=DEFAULT_BASIS_CAP)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--report", default="text", choices=["json", "text", "csv"])

    p = argparse.ArgumentParser(prog="dhom", description="Discrete cubical homology of finite metric spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="point count, diameter, critical scales")
    h = sub.add_parser("homology", parents=[common], help="homology groups for n <= nmax")
    h.add_argument("--reduced", action="store_true")
    h.add_argument("--relative", metavar="A.json", help="relative homology modulo a subset")
    h.add_argument("--cycles", action="store_true", help="include cycle representatives")
    h.add_argument("--dump-complex", metavar="PATH", help="write bases and boundary matrices as JSON")
    s = sub.add_parser("scan", parents=[common], help="direct system over a ladder of scales")
    s.add_argument("--ladder", help="comma-separated scales (default: critical scales)")
    s.add_argument("--core", action="store_true", help="fold dominated vertices at each rung")
    s.add_argument("--coherence", action="store_true", help="check every triple of rungs")
    v = sub.add_parser("verify", parents=[common], help="exactness and axiom checks")
    v.add_argument("--cover", help="comma-separated subset files A.json,B.json")
    v.add_argument("--cover-dim", type=int, default=None,
                   help="check the cover up to this dimension (default nmax + 1)")
    sub.add_parser("suspend", parents=[common], help="write the suspension as a distance matrix CSV")
    hz = sub.add_parser("hurewicz", parents=[common], help="H_1 against the abelianized A_1 oracle")
    hz.add_argument("--basepoint")
    return p


def config_from_args(args) -> RunConfig:
    if not 0 <= args.n_max <= DEFAULT_MAX_DIM:
        raise InputError(f"--nmax must be between 0 and {DEFAULT_MAX_DIM} (set DHOM_MAX_DIM to raise)")
    # degree n needs (n + 1)-cubes; verify also needs degree nmax + 1
    cfg = RunConfig(args.command, args.space, args.fmt, args.norm, args.precision, args.scale,
                    getattr(args, "ladder", None), args.n_max, args.cap_basis, args.n_max + 2,
                    args.workers, args.out, args.report)
    if getattr(args, "cover", None):
        cfg.cover = [c for c in args.cover.split(",") if c]
    for key in ("reduced", "relative", "cycles", "dump_complex", "core", "coherence",
                "cover_dim", "basepoint"):
        if getattr(args, key, None) is not None:
            cfg.extra[key] = getattr(args, key)
    return cfg


def _emit(cfg: RunConfig, data: dict, text: str) -> None:
    body = json.dumps(data, indent=2, sort_keys=True) if cfg.report == "json" else text
    if cfg.command == "suspend" and cfg.report != "json":
        body = text
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = config_from_args(args)
        X = load(cfg)
        status, data, text = COMMANDS[cfg.command](cfg, X)
    except CapExceeded as exc:
        print(json.dumps({"error": "cap exceeded", "message": str(exc), "count": exc.count,
                          "cap": exc.cap}), file=sys.stderr)
        return 3
    except (InputError, MetricError, ValueError, FileNotFoundError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(json.dumps({"error": "input", "message": str(msg)}), file=sys.stderr)
        return 2
    _emit(cfg, data, text)
    return status


if __name__ == "__main__":
    sys.exit(main())
