import json

from dhom.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_info(capsys):
    code, out, _ = _run(capsys, "info", "--space", "cycle:6", "--report", "json")
    data = json.loads(out)
    assert code == 0 and data["diameter"] == "3" and data["critical_scales"] == ["1", "2", "3"]


def test_homology_text_and_json(capsys):
    code, out, _ = _run(capsys, "homology", "--space", "cycle:5", "--scale", "1", "--nmax", "1")
    assert code == 0 and out.splitlines() == ["H_0(X) = Z", "H_1(X) = Z"]
    code, out, _ = _run(capsys, "homology", "--space", "two-points", "--reduced", "--nmax", "0",
                        "--report", "json")
    assert json.loads(out)["groups"]["0"] == {"rank": 1, "torsion": []}


def test_homology_dump_and_cycles(capsys, tmp_path):
    dump = tmp_path / "cx.json"
    code, out, _ = _run(capsys, "homology", "--space", "cycle:5", "--nmax", "1", "--cycles",
                        "--dump-complex", str(dump), "--report", "json")
    assert code == 0
    assert json.loads(out)["groups"]["1"]["cycle_reps"]
    assert set(json.loads(dump.read_text())["bases"]) == {"0", "1", "2"}


def test_relative(capsys, tmp_path):
    a = tmp_path / "A.json"
    a.write_text('["0", "3"]')
    code, out, _ = _run(capsys, "homology", "--space", "path:4", "--relative", str(a), "--nmax", "1")
    assert code == 0 and "H_1(X, A) = Z" in out


def test_verify_mv(capsys, tmp_path):
    a, b = tmp_path / "A.json", tmp_path / "B.json"
    a.write_text('["5", "0", "1", "2", "3"]')
    b.write_text('["2", "3", "4", "5", "0"]')
    code, out, _ = _run(capsys, "verify", "--space", "cycle:6", "--cover", f"{a},{b}", "--scale", "1",
                        "--nmax", "2", "--cover-dim", "2")
    assert code == 0 and "ok   mayer-vietoris" in out
    code, out, _ = _run(capsys, "verify", "--space", "cycle:6", "--cover", f"{a},{b}", "--scale", "1",
                        "--nmax", "2")
    assert code == 1 and "refused" in out


def test_scan_csv(capsys):
    code, out, _ = _run(capsys, "scan", "--space", "cycle:6", "--nmax", "1", "--report", "csv",
                        "--coherence")
    assert code == 0 and out.startswith("n,scale,free_rank")


def test_suspend(capsys, tmp_path):
    dest = tmp_path / "s.csv"
    code, _, _ = _run(capsys, "suspend", "--space", "two-points", "--out", str(dest))
    lines = dest.read_text().splitlines()
    assert code == 0 and len(lines) == 7


def test_hurewicz(capsys):
    code, out, _ = _run(capsys, "hurewicz", "--space", "torus:5x5", "--basepoint", "0_0")
    assert code == 0 and out.splitlines()[-1] == "isomorphic"


def test_errors(capsys):
    code, _, err = _run(capsys, "homology", "--space", "blob")
    assert code == 2 and json.loads(err)["error"] == "input"
    code, _, _ = _run(capsys, "homology", "--space", "cycle:5", "--nmax", "9")
    assert code == 2
    code, _, err = _run(capsys, "homology", "--space", "cycle:8", "--scale", "3", "--cap-basis", "50")
    assert code == 3 and json.loads(err)["cap"] == 50
    code, _, _ = _run(capsys, "hurewicz", "--space", "two-points")
    assert code == 2
