from __future__ import annotations

import json
from pathlib import Path

import pytest

from dp3delta.cli import main

DATA = Path(__file__).resolve().parents[1] / "src" / "dp3delta" / "data" / "builtins"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table_body(text: str) -> list[str]:
    rows = [l for l in text.splitlines() if l.startswith("| ")]
    return rows[1:]


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert len(table_body(out)) == 20
    code, out, _ = run(capsys, "list", "--format", "csv")
    assert out.splitlines()[0] == "name,singularities,lines,delta"
    assert out.splitlines()[-1] == "E6,E6,1,1/3"
    code, out, _ = run(capsys, "list", "--format", "json")
    assert len(json.loads(out)) == 20


def test_usage_errors(capsys):
    assert run(capsys, "list", "--bogus")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "verify", "--grid", "1")[0] == 2


def test_delta_builtin(capsys):
    code, out, _ = run(capsys, "delta", "A3A1")
    assert code == 0
    assert "delta = 9/11 (exact)" in out
    assert "| L13 \\ E1 | 9/8 | 2 | PASS |" in out
    code, out, _ = run(capsys, "delta", "A5A1", "--format", "json")
    d = json.loads(out)
    assert d["lower"] == "3/5" and d["exact"] is True


def test_delta_digits(capsys):
    _, out, _ = run(capsys, "delta", "E6", "--digits", "3")
    assert "delta = 1/3 (0.333) (exact)" in out


def test_delta_exit_codes(capsys, tmp_path):
    smooth = tmp_path / "smooth.json"
    smooth.write_text('{"name": "smooth", "roots": []}')
    code, out, _ = run(capsys, "delta", str(smooth))
    assert code == 3
    assert "delta = [3/2, 9/5] (interval only)" in out

    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "bad", "roots": [[1, 0, 0, 0, 0, 0, 0]]}')
    code, _, err = run(capsys, "delta", str(bad))
    assert code == 4 and "invalid configuration" in err

    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(capsys, "delta", str(broken))[0] == 4
    assert run(capsys, "delta", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "delta", "B7")[0] == 2


def test_delta_on_a_user_file(capsys, tmp_path):
    path = tmp_path / "mine.json"
    path.write_text((DATA / "D4.json").read_text().replace('"name": "D4"', '"name": "mine"'))
    code, out, _ = run(capsys, "delta", str(path))
    assert code == 0 and "delta = 3/5 (exact)" in out


@pytest.mark.parametrize(
    "name,curve,tau,s",
    [("A1", "E", "3/2", "5/6"), ("A4", "E1", "3", "13/9"), ("D4", "E", "3", "5/3")],
)
def test_decompose(capsys, name, curve, tau, s):
    code, out, _ = run(capsys, "decompose", name, curve)
    assert code == 0
    assert f"tau = {tau}" in out and f"S(A) = {s}" in out


def test_decompose_layout(capsys):
    _, out, _ = run(capsys, "decompose", "A1", "E")
    body = table_body(out)
    assert len(body) == 2
    assert body[0].startswith("| [0, 1] | - | 0 | 3 - 2*v^2 | 2*v |")
    _, out, _ = run(capsys, "decompose", "A1", "E", "--format", "json")
    d = json.loads(out)
    assert d["tau"] == "3/2" and d["intervals"][1]["negative"]["L1"] == [-1, 1]


def test_decompose_unknown_curve(capsys):
    code, _, err = run(capsys, "decompose", "A4", "Z")
    assert code == 2 and "no curve" in err


def test_table(capsys):
    code, out, _ = run(capsys, "table")
    assert code == 0
    assert sum(r.endswith("| PASS |") for r in table_body(out)) == 20
    assert out.rstrip().endswith("20/20 PASS")
    code, out, _ = run(capsys, "table", "--format", "json")
    rows = json.loads(out)
    assert len(rows) == 20 and {r["status"] for r in rows} == {"PASS"}


def test_table_with_a_perturbed_builtin(capsys, tmp_path):
    d = json.loads((DATA / "A3.json").read_text())
    d["roots"][0]["class"][1] += 1
    path = tmp_path / "A3.json"
    path.write_text(json.dumps(d))
    code, out, _ = run(capsys, "table", "--override", str(path))
    assert code == 1
    failed = [r for r in table_body(out) if "FAIL" in r]
    assert len(failed) == 1 and failed[0].startswith("| A3 |")


def test_table_override_needs_a_builtin_name(capsys, tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"name": "other", "roots": []}')
    assert run(capsys, "table", "--override", str(path))[0] == 2


def test_verify_subsets(capsys):
    code, out, _ = run(capsys, "verify", "--only", "tables")
    assert code == 0 and out.rstrip().endswith("clean")
    code, out, _ = run(capsys, "verify", "--only", "lemmas", "--format", "csv")
    assert code == 0
    assert out.count("all-match") == 32


def test_verify_quadrature_grid(capsys):
    code, out, _ = run(capsys, "verify", "--only", "quadrature", "--grid", "100000", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 32
    assert all("100000 nodes" in r["detail"] for r in rows)
    # the coarse grid leaves O(h^2) errors above 1e-9
    assert run(capsys, "verify", "--only", "quadrature", "--grid", "10000")[0] == 1


def test_output_is_deterministic(capsys):
    first = run(capsys, "delta", "A2A1", "--format", "csv")
    second = run(capsys, "delta", "A2A1", "--format", "csv")
    assert first == second


def test_delta_checks_expected_values(capsys, tmp_path):
    body = {
        "name": "my-a1",
        "roots": [{"id": "E", "class": [0, 0, 0, 0, 0, 1, -1]}],
        "points": [{"id": "p", "curves": [["E", 1], ["L1", 1]]}],
        "expected": {"lines": 21, "delta": "6/5"},
    }
    path = tmp_path / "a1.json"
    path.write_text(json.dumps(body))
    code, out, _ = run(capsys, "delta", str(path))
    assert code == 0 and "expected delta: 6/5 (consistent)" in out
    body["expected"]["delta"] = "1/2"
    path.write_text(json.dumps(body))
    code, out, _ = run(capsys, "delta", str(path))
    assert code == 1 and "MISMATCH" in out
    body["expected"] = {"lines": 20, "delta": "6/5"}
    path.write_text(json.dumps(body))
    assert run(capsys, "delta", str(path))[0] == 4
    body["lines"] = [{"id": "L1", "class": [0, 0, 0, 0, 0, 0, 1]}]
    del body["expected"]
    path.write_text(json.dumps(body))
    code, _, err = run(capsys, "delta", str(path))
    assert code == 4 and "missing" in err
