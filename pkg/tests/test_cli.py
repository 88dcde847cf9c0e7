import json


from convmds.cli import main
from convmds.polymat import load_code


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def report(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out.out)


def test_plan_golden(capsys):
    code, rep = report(capsys, "plan", "11", "2", "6")
    assert code == 0 and rep["schema_version"] == 1
    inter = rep["plan"]["intermediates"]
    assert (inter["W"], inter["E"], inter["F"], inter["R"]) == (5, 2, 1, 4)


def test_plan_audit_failure_exits_1(capsys):
    code, rep = report(capsys, "plan", "3", "2", "1")
    assert code == 1 and not rep["audit"]["pass"]


def test_check_bundled_name(capsys):
    code, out = run(capsys, "check", "examples/ex3_f7.json", "--planned")
    assert code == 0 and "verdict: certified-MDS" in out.out


def test_check_failure_exits_1(capsys):
    code, rep = report(capsys, "check", "ex4_f31.json")
    assert code == 1 and rep["criteria"]["verdict"] == "minors-fail"


def test_distances_free(capsys):
    code, rep = report(capsys, "distances", "ex5_f3.json", "--free")
    assert code == 0
    assert rep["distances"]["free_exact"] == 5 and rep["distances"]["S"] == 6


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("CONVMDS_BUDGET", "1000")
    code, _ = run(capsys, "distances", "ex4_f31.json", "--free")
    assert code == 3


def test_malformed_inputs(capsys, tmp_path, monkeypatch):
    assert run(capsys, "check", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", str(bad))[0] == 2
    assert run(capsys, "plan", "2", "2", "1")[0] == 2
    assert run(capsys, "search", "3", "1", "2", "--q", "6")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "check", "ex5_f3.json", "--theorem", "main")[0] == 2
    monkeypatch.setenv("CONVMDS_BUDGET", "lots")
    assert run(capsys, "search", "3", "1", "2", "--q", "4")[0] == 2


def test_construct(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, rep = report(capsys, "construct", "2", "1", "1", "--code-out", str(path))
    assert code == 0 and rep["construction"]["N"] == 17
    assert load_code(path).field.m == 17
    code, rep = report(capsys, "construct", "3", "1", "2")
    assert code == 0 and not rep["construction"]["built"] and rep["construction"]["N"] == 1025


def test_search_round_trip(capsys, tmp_path):
    path = tmp_path / "hit.json"
    code, rep = report(capsys, "search", "3", "1", "2", "--q", "4", "--code-out", str(path))
    assert code == 0 and rep["search"]["label"] == "hit"
    hit = rep["hits"][0]["code"]
    assert load_code(path).to_dict() == hit


def test_exhaustive_certificate(capsys):
    code, rep = report(capsys, "search", "3", "1", "2", "--q", "3", "--exhaustive")
    assert rep["search"]["label"] == "certificate" and rep["search"]["tried"] == 3**9


def test_reports_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["search", "3", "1", "3", "--q", "7", "--seed", "5", "--budget", "2000", "--out", str(a)])
    main(["search", "3", "1", "3", "--q", "7", "--seed", "5", "--budget", "2000", "--out", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_pretty_rendering(capsys):
    code, out = run(capsys, "check", "ex3_f16.json", "--pretty")
    assert "a^3" in out.out


def test_verify_paper(capsys, tmp_path):
    out = tmp_path / "suite.json"
    code, _ = run(capsys, "verify-paper", "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())["checks"]
    assert all(r["status"] in ("ok", "info", "known-defect") for r in rows)
    defects = {r["id"] for r in rows if r["status"] == "known-defect"}
    assert {"ex4.main", "ex5.free", "ex6.f7.free", "ex6.f7.S"} <= defects
    assert run(capsys, "verify-paper", "--strict")[0] == 1
