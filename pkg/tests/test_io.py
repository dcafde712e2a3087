import io

import pytest

from dhom.constructions import cycle
from dhom.io import read_space, read_subset, write_matrix_csv, write_subset
from dhom.metric import MetricError


def test_matrix_round_trip(tmp_path):
    X = cycle(5)
    buf = io.StringIO()
    write_matrix_csv(X, buf)
    p = tmp_path / "c5.csv"
    p.write_text(buf.getvalue())
    assert read_space(p) == X


def test_labelled_matrix(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text(",a,b\na,0,inf\nb,inf,0\n")
    X = read_space(p)
    assert X.labels == ("a", "b")
    p.write_text(",a,b\nb,0,1\na,1,0\n")
    with pytest.raises(MetricError):
        read_space(p)


def test_edges_and_points(tmp_path):
    e = tmp_path / "g.edges"
    e.write_text("# square\na b\nb c 2\nd\n")
    X = read_space(e)
    assert X.labels == ("a", "b", "c", "d") and X.d(0, 2) == 3
    q = tmp_path / "p.pts"
    q.write_text("o,0,0\np,3,4\n")
    assert read_space(q).d(0, 1) == 5
    assert read_space(q, p="1").d(0, 1) == 7


def test_subsets(tmp_path):
    f = tmp_path / "A.json"
    write_subset(["0", "1"], f)
    assert read_subset(str(f)) == ["0", "1"]
    assert read_subset("0;2") == ["0", "2"]
    with pytest.raises(FileNotFoundError):
        read_subset(str(tmp_path / "missing.json"))
