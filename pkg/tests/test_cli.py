from __future__ import annotations

import json

import pytest

from rotgraph.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_build_complete4_dot(capsys, tmp_path):
    dot = tmp_path / "k4.dot"
    code, out = run(capsys, "build", "--family", "complete:4", "--dot", str(dot), "--workers", "1")
    body = json.loads(out)
    assert code == EXIT_OK and body["schema"] == 1
    assert body["stats"]["vertices"] == 24
    assert dot.read_text().count(" -- ") == 36


@pytest.mark.parametrize("spec,count", [("spk:2,2", 22), ("path:6", 132)])
def test_build_counts(capsys, spec, count):
    code, out = run(capsys, "build", "--family", spec)
    assert code == EXIT_OK and json.loads(out)["stats"]["vertices"] == count


def test_build_from_graph_file(capsys, tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# n=4\n0 1\n1 2\n2 3\n")
    code, out = run(capsys, "build", "--graph", str(f), "--binary", str(tmp_path / "r.bin"), "--graph-json", str(tmp_path / "r.json"))
    assert code == EXIT_OK and json.loads(out)["stats"]["vertices"] == 14
    assert (tmp_path / "r.bin").exists() and json.loads((tmp_path / "r.json").read_text())["trees"]


def test_cap_exceeded_exits_2(capsys):
    code, out = run(capsys, "build", "--family", "complete:7", "--max-trees", "50")
    assert code == EXIT_USAGE and json.loads(out)["partial"]["cap"] == 50


def test_env_cap_override(capsys, monkeypatch):
    monkeypatch.setenv("ROTGRAPH_MAX_TREES", "10")
    code, _ = run(capsys, "build", "--family", "complete:4")
    assert code == EXIT_USAGE


def test_usage_errors(capsys):
    assert run(capsys, "build", "--family", "bogus:3")[0] == EXIT_USAGE
    assert run(capsys, "build")[0] == EXIT_USAGE
    assert run(capsys, "build", "--family", "complete:3", "--max-trees", "-5")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "nonsense"])
    assert err.value.code == 2


@pytest.mark.parametrize("spec,value", [("spk:3,3", 3), ("complete:5", 2)])
def test_chromatic_exact(capsys, spec, value):
    code, out = run(capsys, "chromatic", "--family", spec, "--exact")
    assert code == EXIT_OK and json.loads(out)["value"] == value


def test_chromatic_lifted(capsys):
    code, out = run(capsys, "chromatic", "--family", "kpq:2,3", "--lifted")
    body = json.loads(out)
    assert code == EXIT_OK and body["lifted"]["colors"] == 3 and body["lifted"]["report"]["passed"]


def test_chromatic_budget_exhausted(capsys):
    code, _ = run(capsys, "chromatic", "--family", "kpq:3,3", "--budget", "1")
    assert code == EXIT_USAGE


def test_diameter_kpq24(capsys):
    code, out = run(capsys, "diameter", "--family", "kpq:2,4")
    body = json.loads(out)
    assert code == EXIT_OK and body["value"] == 11
    assert {"value", "witness_pair", "sources_run", "runtime"} <= set(body)


def test_diameter_without_orbits(capsys):
    code, out = run(capsys, "diameter", "--family", "spk:2,3", "--orbits", "none")
    body = json.loads(out)
    assert body["value"] == 8 and body["sources_run"] == 98


def test_distance_from_files(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps({"order": [0, 1, 2, 3]}))
    b.write_text(json.dumps({"order": [3, 2, 1, 0]}))
    code, out = run(capsys, "distance", "--family", "complete:4", "--from", str(a), "--to", str(b), "--path")
    body = json.loads(out)
    assert code == EXIT_OK and body["value"] == 6 and len(body["path"]) == 7


def test_distance_invalid_tree(capsys):
    code, _ = run(capsys, "distance", "--family", "path:3", "--from", '{"parent": [null, 0, 0]}', "--to", '{"order": [0, 1, 2]}')
    assert code == EXIT_USAGE


def test_distance_witness(capsys):
    code, out = run(capsys, "distance", "--witness", "spk23_far")
    assert code == EXIT_OK and json.loads(out)["value"] == 8


def test_verify_quotients(capsys, tmp_path):
    report = tmp_path / "rep.json"
    code, out = run(capsys, "verify", "--suite", "quotients", "--json", str(report))
    body = json.loads(out)
    assert code == EXIT_OK and body["schema"] == 1 and body["passed"]
    assert json.loads(report.read_text()) == body


def test_verify_is_deterministic(capsys):
    a = run(capsys, "verify", "--suite", "counts")[1]
    b = run(capsys, "verify", "--suite", "counts")[1]
    assert a == b


def test_verify_failure_exit_code(capsys, monkeypatch):
    from rotgraph import suites
    from rotgraph.reports import Report

    monkeypatch.setitem(suites.RUNNERS, "counts", lambda **_: [Report("x", "y", passed=False)])
    assert run(capsys, "verify", "--suite", "counts")[0] == EXIT_FAIL
