from __future__ import annotations

import json

import pytest

from hecke3 import cli


@pytest.fixture(autouse=True)
def private_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("HECKE3_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv) -> tuple[int, str]:
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("level,dim", [(1, 0), (2, 0), (4, 1), (12, 7)])
def test_basis(capsys, level, dim):
    code, out = run(capsys, "basis", "--level", str(level))
    d = json.loads(out)
    assert code == 0 and d["dim"] == dim and d["level"] == level


def test_basis_output_is_deterministic(capsys, tmp_path, private_cache):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "basis", "--level", "16", "--out", str(a))
    for p in private_cache.iterdir():
        p.unlink()
    run(capsys, "basis", "--level", "16", "--out", str(b), "--seed", "5")
    assert a.read_bytes() == b.read_bytes()


def test_cosets(capsys):
    code, out = run(capsys, "cosets", "--alpha", "2,0,0;0,2,0;0,0,1")
    d = json.loads(out)
    assert code == 0 and d["count"] == 6 and d["verified"]
    code, out = run(capsys, "cosets", "--alpha", "3,0,0;0,1,0;0,0,1", "--local")
    assert json.loads(out)["count"] == 1


def test_cache_corruption_is_recomputed(capsys, private_cache):
    run(capsys, "cosets", "--alpha", "2,0,0;0,1,0;0,0,1")
    entry, = private_cache.glob("decomposition-*.json")
    text = entry.read_text()
    entry.write_text(text.replace('"count": 4', '"count": 5'))
    code, out = run(capsys, "cosets", "--alpha", "2,0,0;0,1,0;0,0,1")
    assert code == 0 and json.loads(out)["count"] == 4
    assert entry.read_text() == text


def test_hecke(capsys):
    code, out = run(capsys, "hecke", "--level", "12", "--alpha", "5,0,0;0,1,0;0,0,1")
    d = json.loads(out)
    assert code == 0 and d["dim"] == 7 and d["cosets"] == 31
    assert d["gaussian_integer_roots"] == ["31+0*i"]


def test_hecke_from_basis_file(capsys, tmp_path):
    path = tmp_path / "b16.txt"
    run(capsys, "basis", "--level", "16", "--out", str(path))
    code, out = run(capsys, "hecke", "--level", "16", "--basis", str(path), "--alpha", "3,0,0;0,1,0;0,0,1")
    assert code == 0 and json.loads(out)["dim"] == 6


def test_reduce(capsys):
    code, out = run(capsys, "reduce", "--symbol", "1,0,0;0,2,1;0,0,3", "--level", "8", "--trace-reduction")
    d = json.loads(out)
    assert code == 0 and d["det"] == 6
    assert all(t["coefficient"] for t in d["terms"])
    assert d["trace"][0]["det"] == 6


def test_verify_reduce(capsys):
    code, out = run(capsys, "verify", "--suite", "reduce")
    rec = json.loads(out.splitlines()[0])
    assert code == 0 and rec["passed"] and rec["counts"]["discrepancies"] == 0


def test_verify_rep(capsys):
    code, out = run(capsys, "verify", "--suite", "rep")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and all(r["passed"] for r in recs)
    assert {r["check"] for r in recs} >= {"normal_form", "mod2_exhaustive", "lambda_chain", "upper_identities"}


def test_verify_failure_exits_nonzero(capsys, monkeypatch):
    from hecke3 import repaudit as ra
    monkeypatch.setitem(cli.SUITES, "rep", lambda seed=0: [ra.AuditResult("broken", False)])
    code, out = run(capsys, "verify", "--suite", "rep")
    assert code == 1 and json.loads(out)["passed"] is False


def test_bad_input_exits_nonzero(capsys):
    assert cli.main(["cosets", "--alpha", "1,0;0,1"]) == 2
    assert cli.main(["cosets", "--alpha", "0,0,0;0,1,0;0,0,1"]) == 2


@pytest.mark.slow
def test_eigenreport(capsys, monkeypatch, cache, report128):
    # reuse the session cache, which the report fixture has already filled
    monkeypatch.setenv("HECKE3_CACHE", str(cache.root))
    code, out = run(capsys, "eigenreport")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# psi:") and "psi(1/2) = +i" in lines[0]
    assert "eigenvalue 1+2*i" in lines[2]
    table = {ln.split()[0]: ln.split()[-1] for ln in lines[4:11]}
    assert table == {"diag(2,2,1)": "0+2*i", "diag(2,1,1)": "0+0*i", "lower(64)": "-1+0*i",
                     "(36,1;128,4;;4)": "8+0*i", "(8,1;128,8;;8)": "32+0*i",
                     "(0,1;-128,0;;1)": "8-8*i", "central(2)": "1+0*i"}
    assert "chi(2) = 0-2*i" in lines[-1] and "= 0+1*i" in lines[-1]
    code, out = run(capsys, "eigenreport", "--conjugate-psi")
    assert "psi(1/2) = -i" in out and "= 0-1*i" in out.splitlines()[-1]
