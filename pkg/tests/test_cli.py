import json
import subprocess
import sys

import pytest

from mssc.cli import main
from mssc.io import parse_assignment, read_instance, read_kv


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.txt"
    assert main(["generate", "--set", "m=25", "--set", "n=40", "--seed", "3", "-o", str(path)]) == 0
    return path


def test_generate_uses_config_file(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("m = 7\nn = 9\nbudget_range = 1:2\n")
    out = tmp_path / "i.txt"
    assert main(["generate", "--config", str(cfg), "-o", str(out)]) == 0
    inst = read_instance(out)
    assert (inst.m, inst.n) == (7, 9)
    assert all(1 <= t.budget <= 2 for t in inst.tasks)


@pytest.mark.parametrize("solver", ["greedy", "gdc", "adaptive", "random"])
def test_solve_plain_output(instance_file, solver, capsys):
    assert main(["solve", str(instance_file), "--solver", solver, "--seed", "1"]) == 0
    pairs, score, done = parse_assignment(capsys.readouterr().out.splitlines())
    assert score is not None and score >= 0 and done is not None
    assert len({w for w, _, _ in pairs}) == len(pairs)


def test_solve_json_matches_plain(instance_file, capsys):
    main(["solve", str(instance_file), "--tau", "0.1"])
    plain = capsys.readouterr().out
    main(["solve", str(instance_file), "--no-grid", "--json"])
    rows = [json.loads(r) for r in capsys.readouterr().out.splitlines()]
    pairs, score, _ = parse_assignment(plain.splitlines())
    assert rows[-1]["score"] == score
    assert [(r["worker"], r["task"], r["cost"]) for r in rows[:-1]] == pairs


def test_exact_on_tiny_instance(tmp_path, capsys):
    path = tmp_path / "tiny.txt"
    path.write_text("W 0 0.1 0 1 1 10 a\nW 1 0.1 0 1 1 10 b\nT 0 0 0 1 10 a,b\n")
    assert main(["solve", str(path), "--solver", "exact"]) == 0
    _, score, done = parse_assignment(capsys.readouterr().out.splitlines())
    assert score == pytest.approx(8.0) and done == 1


def test_simulate_reports_every_round(capsys):
    assert main(["simulate", "--set", "m=20", "--set", "n=20", "--rounds", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("round,score")
    assert len(lines) == 1 + 3 + 1 and lines[-1].startswith("# total score")


def test_sweep_writes_csv(tmp_path, capsys):
    spec = tmp_path / "sweep.cfg"
    spec.write_text("param = budget_range\nvalues = 1:5; 20:25\nsolvers = greedy,random\ntrials = 1\nm = 20\nn = 30\n")
    assert main(["sweep", str(spec), "--no-means"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "param,value,trial,solver,score,time_ms,pairs_evaluated"
    assert len(lines) == 1 + 4


def test_calibrate_writes_kv(tmp_path):
    out = tmp_path / "cal.cfg"
    assert main(["calibrate", "--sizes", "30", "60", "--repeats", "1", "-o", str(out)]) == 0
    kv = read_kv(out)
    assert float(kv["c_greedy"]) > 0 and float(kv["c_gdc"]) > 0


def test_calibration_file_feeds_solve(instance_file, tmp_path, capsys):
    cal = tmp_path / "cal.cfg"
    cal.write_text("c_greedy = 1e-9\nc_gdc = 1e-7\n")
    assert main(["solve", str(instance_file), "--solver", "adaptive", "--calibration", str(cal)]) == 0
    assert "SCORE" in capsys.readouterr().out


def test_errors_exit_with_code_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("W 1 0 0\n")
    assert main(["solve", str(bad)]) == 2
    assert "bad.txt:1" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.txt")]) == 2
    assert main(["generate", "--set", "colour=red"]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "mssc", "defaults"], capture_output=True, text=True, check=True)
    assert "budget_range = 5.0:10.0" in out.stdout
