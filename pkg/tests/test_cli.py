import json

import pytest

from geoad import named_fixture, save_instance
from geoad.cli import EXIT_INPUT, EXIT_OK, EXIT_PROPERTY, EXIT_TIMEOUT, main
from geoad.instances import fixture_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_example(capsys):
    code, out, _ = run(capsys, "solve", "--instance", fixture_path("example2"), "--algorithm", "fe")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["plan"] == {"2": 0} and doc["sw"] == pytest.approx(100)
    assert doc["suboptimal"] is False


def test_mechanism(capsys, tmp_path):
    inst = tmp_path / "t.json"
    save_instance(named_fixture("table1a", lam=1.0), inst)
    code, out, _ = run(capsys, "mechanism", "--instance", inst, "--algorithm", "fe")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["transfers"]["0"] == pytest.approx(0) and doc["transfers"]["1"] == pytest.approx(1)
    reports = tmp_path / "r.json"
    reports.write_text("[0, 4]")
    code, out, _ = run(capsys, "mechanism", "--instance", inst, "--algorithm", "fe",
                       "--reports", reports, "--fast")
    assert code == EXIT_OK and json.loads(out)["plan"] == {"1": 1}


def test_gen_dump_and_out(capsys, tmp_path):
    out_file = tmp_path / "g.json"
    assert run(capsys, "gen", "--seed", 4, "--nodes", 6, "--ads", 5, "--out", out_file)[0] == EXIT_OK
    code, out, _ = run(capsys, "dump-tree", "--instance", out_file)
    assert code == EXIT_OK and "# 6 nodes, 1 paths" in out
    run(capsys, "gen", "--seed", 4, "--paths", 3, "--ads", 5, "--out", tmp_path / "m.json")
    code, out, _ = run(capsys, "solve", "--instance", tmp_path / "m.json", "--algorithm", "fem")
    assert code == EXIT_OK


def test_budget_timeout_and_guard_exit_codes(capsys, tmp_path):
    inst = tmp_path / "m.json"
    run(capsys, "gen", "--seed", 1, "--paths", 8, "--out", inst)
    code, out, _ = run(capsys, "solve", "--instance", inst, "--algorithm", "fem", "--budget", 1)
    assert code == EXIT_OK and json.loads(out)["suboptimal"] is True
    code, _, err = run(capsys, "solve", "--instance", inst, "--algorithm", "fem", "--timeout-s", 0)
    assert code == EXIT_TIMEOUT and "deadline" in err
    code, out, _ = run(capsys, "solve", "--instance", inst, "--algorithm", "fem",
                       "--timeout-s", 0, "--force")
    assert code == EXIT_OK and json.loads(out)["suboptimal"] is True
    code, _, _ = run(capsys, "solve", "--instance", inst, "--algorithm", "fem",
                     "--max-space-log10", 3)
    assert code == EXIT_TIMEOUT


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "solve", "--algorithm", "fe")[0] == EXIT_INPUT
    assert run(capsys, "solve", "--instance", tmp_path / "missing.json", "--algorithm", "fe")[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text('{"lambdas": []}')
    assert run(capsys, "solve", "--instance", bad, "--algorithm", "fe")[0] == EXIT_INPUT
    tree = tmp_path / "tree.json"
    run(capsys, "gen", "--paths", 3, "--ads", 4, "--out", tree)
    assert run(capsys, "solve", "--instance", tree, "--algorithm", "fa2")[0] == EXIT_INPUT
    assert run(capsys, "solve", "--instance", fixture_path("table1a"), "--algorithm", "fa")[0] == EXIT_INPUT
    assert run(capsys, "mechanism", "--instance", fixture_path("table1a"), "--algorithm", "fa2")[0] == EXIT_INPUT


def test_verify(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--property", "all", "--seeds", 3)
    assert code == EXIT_OK and out.count("PASS") == 4
    code, out, _ = run(capsys, "verify", "--property", "ae", "--seeds", 10,
                       "--algorithms", "fa", "--mbar", 1)
    assert code == EXIT_PROPERTY and "FAIL" in out


def test_bench_commands(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, err = run(capsys, "bench-single", "--cell", "0.5:5", "--seeds", 2, "--ads", 5,
                       "--out", out, "--gnuplot")
    assert code == EXIT_OK and out.exists() and (tmp_path / "s_agg.gp").exists()
    out = tmp_path / "m.csv"
    code, _, _ = run(capsys, "bench-multi", "--paths", 1, 2, "--seeds", 1, "--ads", 5, "--out", out)
    assert code == EXIT_OK and (tmp_path / "m_agg.csv").exists()
