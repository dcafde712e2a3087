"""Readers and writers for distance matrices, edge lists, point clouds and subsets."""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .metric import FiniteMetricSpace, MetricError, from_edges, from_matrix, from_points


def read_matrix_csv(path) -> FiniteMetricSpace:
    """Header row of labels, then one row per point (optionally led by its label)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise MetricError(f"{path}: empty matrix file")
    header = [c.strip() for c in rows[0]]
    body = rows[1:]
    if header and header[0] == "" and all(len(r) == len(header) for r in body):
        header = header[1:]
    n = len(header)
    matrix = []
    for k, row in enumerate(body):
        row = [c.strip() for c in row]
        if len(row) == n + 1:
            if row[0] != header[k]:
                raise MetricError(f"{path}: row {k + 1} is labelled {row[0]!r}, expected {header[k]!r}")
            row = row[1:]
        if len(row) != n:
            raise MetricError(f"{path}: row {k + 1} has {len(row)} entries, expected {n}")
        matrix.append(row)
    return from_matrix(header, matrix)


def write_matrix_csv(X: FiniteMetricSpace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    for row in X.to_rows():
        w.writerow(row)


def read_edge_list(path) -> FiniteMetricSpace:
    """One ``u v [weight]`` per line; ``#`` starts a comment."""
    edges, labels = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) == 1:
                labels.append(parts[0])
            elif len(parts) in (2, 3):
                edges.append(tuple(parts))
            else:
                raise MetricError(f"{path}:{lineno}: expected 'u v [weight]'")
    seen = []
    for e in edges:
        for x in e[:2]:
            if x not in seen:
                seen.append(x)
    for x in labels:
        if x not in seen:
            seen.append(x)
    return from_edges(edges, labels=seen)


def read_point_cloud(path, p="2", precision="1e-6") -> FiniteMetricSpace:
    """Rows ``label,x1,...,xk`` with decimal coordinates."""
    labels, coords = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            row = [c.strip() for c in row]
            if not row or not any(row) or row[0].startswith("#"):
                continue
            labels.append(row[0])
            coords.append(row[1:])
    return from_points(labels, coords, p=p, precision=precision)


FORMATS = ("matrix", "edges", "points")


def guess_format(path) -> str:
    ext = Path(path).suffix.lower()
    if ext in (".edges", ".txt", ".el"):
        return "edges"
    if ext in (".pts", ".xyz"):
        return "points"
    return "matrix"


def read_space(path, fmt: str | None = None, p="2", precision="1e-6") -> FiniteMetricSpace:
    fmt = fmt or guess_format(path)
    if fmt == "matrix":
        return read_matrix_csv(path)
    if fmt == "edges":
        return read_edge_list(path)
    if fmt == "points":
        return read_point_cloud(path, p, precision)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def read_subset(path_or_text) -> list[str]:
    """A JSON subset file: a list of labels or ``{"points": [...]}``; or inline ``a;b;c``."""
    if os.path.exists(path_or_text):
        with open(path_or_text) as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data.get("points", data.get("labels"))
        if not isinstance(data, list):
            raise ValueError(f"{path_or_text}: expected a list of point labels")
        return [str(x) for x in data]
    if path_or_text.endswith(".json"):
        raise FileNotFoundError(path_or_text)
    return [t for t in path_or_text.split(";") if t]


def write_subset(labels, path) -> None:
    with open(path, "w") as fh:
        json.dump({"points": list(labels)}, fh)
