import json

import pytest

from snowflake_ot.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return {
        "eq3": write("eq3.json", {"n": 3, "d": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}),
        "c4": write("c4.json", {"n": 4, "d": [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]}),
        "line": write("line.json", {"n": 4, "d": [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]}),
        "a": write("a.json", {"dim": 2, "points": [[0, 0], [1, 1]], "weights": [0.5, 0.5]}),
        "b": write("b.json", {"dim": 2, "points": [[0, 0], [1, 2]], "weights": [0.5, 0.5]}),
        "chain": write("chain.json", {"P": [[0.5, 0.5], [0.5, 0.5]], "pi": [0.5, 0.5]}),
        "dist": write("dist.json", {"d": [[0, 1], [1, 0]]}),
        "psi": write("psi.json", {"psi": [[1, 2], [2, 3]]}),
        "graph": write("g.json", {"n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ctheta(capsys):
    code, out, _ = run(capsys, "ctheta", "--theta", "0.5")
    assert code == 0
    rep = json.loads(out)
    assert rep["residual"] <= 1e-10 and rep["root"] == pytest.approx(2.0800249704)


def test_audit_writes_csv_and_summary(capsys, files):
    csv_path = files["dir"] / "audit.csv"
    code, out, _ = run(capsys, "audit", "--metric", files["eq3"], "--p", "2", "--K", "810", "--eps", "0.5",
                       "--out", str(csv_path))
    assert code == 0
    summary = json.loads(out)
    assert summary["K"] == 810 and summary["passed"]
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "i,j,target_lo,target_hi,measured,ratio" and len(rows) == 4


def test_audit_failure_exit_code(capsys, files):
    code, out, _ = run(capsys, "audit", "--metric", files["eq3"], "--K", "2", "--eps", "0.001")
    assert code == 1
    assert json.loads(out)["failed_check"] == "audit ratio band"


def test_audit_csv_format(capsys, files):
    code, out, _ = run(capsys, "audit", "--metric", files["eq3"], "--K", "5", "--eps", "1", "--format", "csv")
    assert code == 0 and out.startswith("i,j,")


def test_embed(capsys, files):
    code, out, _ = run(capsys, "embed", "--metric", files["eq3"], "--K", "2")
    assert code == 0
    emb = json.loads(out)
    assert emb["N"] == len(emb["cloud"]) + 1 and len(emb["measures"]) == 3


def test_wass(capsys, files):
    code, out, _ = run(capsys, "wass", "--mu", files["a"], "--nu", files["a"], "--p", "2")
    assert code == 0 and json.loads(out) == {"cost": 0.0, "p": 2.0}
    plan = files["dir"] / "plan.csv"
    code, out, _ = run(capsys, "wass", "--mu", files["a"], "--nu", files["b"], "--out", str(plan))
    assert code == 0 and json.loads(out)["cost"] == pytest.approx(0.5**0.5)
    assert plan.read_text().startswith("row,col,mass\n")


def test_markov(capsys, files):
    code, out, _ = run(capsys, "markov", "ratio", "--chain", files["chain"], "--dist", files["dist"], "--m", "2")
    assert code == 0 and json.loads(out)["ratio"] == pytest.approx(0.5)
    code, out, _ = run(capsys, "markov", "identity", "--chain", files["chain"], "--psi", files["psi"], "--t", "2")
    rep = json.loads(out)
    assert code == 0 and rep["lhs"] == pytest.approx(rep["rhs"])
    code, out, _ = run(capsys, "markov", "bound", "--m", "1")
    assert json.loads(out)["bound"] == pytest.approx(1.0)


def test_certify(capsys, files):
    code, out, _ = run(capsys, "certify", "--family", "roundness2", "--metric", files["c4"])
    assert code == 1 and json.loads(out)["min_D"] == pytest.approx(2**0.5)
    code, out, _ = run(capsys, "certify", "--family", "sturm", "--metric", files["line"], "--params", "s=0.3", "t=0.6")
    assert code == 0
    code, out, _ = run(capsys, "certify", "--family", "reshetnyak", "--sweep", "50", "--seed", "3")
    assert code == 0 and json.loads(out)["samples"] == 50
    code, _, err = run(capsys, "certify", "--family", "nope", "--metric", files["c4"])
    assert code == 2


def test_graph(capsys, files):
    code, out, _ = run(capsys, "graph", "lambda2", "--graph", files["graph"])
    assert code == 0 and abs(json.loads(out)["lambda2"]) < 1e-12
    code, out, _ = run(capsys, "graph", "subdivide", "--graph", files["graph"], "--k", "3")
    assert json.loads(out)["n"] == 12
    code, out, _ = run(capsys, "graph", "bound", "--graph", files["graph"], "--k", "1")
    assert json.loads(out)["term_b"] == pytest.approx(2)


def test_input_errors(capsys, files):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "UnknownSubcommand" in err
    bad = files["dir"] / "bad.json"
    bad.write_text('{"n": 2,')
    code, _, err = run(capsys, "embed", "--metric", str(bad), "--K", "1")
    assert code == 2 and "MalformedInput" in err
    code, _, err = run(capsys, "embed", "--metric", files["eq3"], "--K", "1", "--p", "1")
    assert code == 2 and "PEqualsOne" in err
    code, _, _ = run(capsys, "audit", "--metric", files["eq3"])
    assert code == 2
    code, _, _ = run(capsys, "wass", "--mu", str(files["dir"] / "missing.json"), "--nu", files["a"])
    assert code == 2


def test_reports_are_byte_identical(capsys, files):
    a = run(capsys, "certify", "--family", "quadruple", "--sweep", "30", "--seed", "7")[1]
    b = run(capsys, "certify", "--family", "quadruple", "--sweep", "30", "--seed", "7")[1]
    assert a == b
    a = run(capsys, "suite", "--only", "4,6,11,12", "--seed", "5")[1]
    b = run(capsys, "suite", "--only", "4,6,11,12", "--seed", "5")[1]
    assert a == b and json.loads(a)["passed"]
