import pytest

from dhom.constructions import cycle, path, torus_grid
from dhom.homology import homology
from dhom.scan import ScaleLadder, fold_dominated, scale_scan


def test_ladder():
    assert ScaleLadder.parse("1, 2;3").scales == (1, 2, 3)
    with pytest.raises(ValueError):
        ScaleLadder((2, 1))


def test_cycle_scan():
    rep = scale_scan(cycle(8), 1, coherence=True)
    assert [str(g) for g in rep.groups[1]] == ["Z", "0", "0", "0"]
    assert rep.ranks[1] == [0, 0, 0]
    assert rep.eventual_rank == {0: 1, 1: 0}
    assert rep.coherence["ok"] and rep.coherence["triples"] == 8
    assert rep.stable_suffix(1) == (2, 3, 4)
    assert rep.notes


def test_core_matches_plain():
    X = torus_grid(4, 5)
    a = scale_scan(X, 1, [1, 2])
    b = scale_scan(X, 1, [1, 2], core=True)
    assert a.groups == b.groups and a.ranks == b.ranks


def test_fold_dominated_path():
    mask, rho = fold_dominated(path(5), 1)
    assert mask.sum() == 1
    assert len(set(rho)) == 1
    mask, rho = fold_dominated(cycle(5), 1)
    assert mask.all()


def test_fold_preserves_homology():
    X = cycle(6).subspace(range(6))
    mask, _ = fold_dominated(X, 1)
    for n in (0, 1):
        assert homology(X, 1, n).group == homology(X, 1, n, support=mask).group


def test_barcode_csv():
    rep = scale_scan(cycle(5), 1, [1, 2])
    lines = rep.barcode_csv().splitlines()
    assert lines[0] == "n,scale,free_rank,torsion,image_rank_to_next"
    assert "1,1,1,,0" in lines


def test_disconnected_warning():
    X = cycle(6).subspace([0, 1, 3, 4])
    rep = scale_scan(X, 0, [1, 2])
    assert rep.warnings and rep.groups[0][0].free_rank == 2
