import io
import json

import pytest

from mssc.generate import GeneratorConfig, generate
from mssc.greedy import solve_greedy
from mssc.grid import valid_pairs
from mssc.io import (ParseError, config_from_mapping, config_to_kv, format_assignment, format_instance,
                     parse_assignment, parse_instance, parse_kv, parse_range, read_instance, write_instance)


def test_instance_round_trip(tmp_path):
    inst = generate(GeneratorConfig(m=30, n=40, seed=5))
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    back = read_instance(path)
    assert back.workers == inst.workers and back.tasks == inst.tasks


def test_symbolic_skills_map_in_order_of_appearance():
    text = """# two workers
W 1 0.1 0.1 1 1 5 cook,drive
W 2 0.2 0.1 1 1 5 paint
T 7 0.1 0.2 1 10 drive,paint   # trailing comment
"""
    inst = parse_instance(io.StringIO(text))
    assert inst.skill_names[:3] == ["cook", "drive", "paint"]
    assert list(inst.tasks[0].required) == [1, 2]
    assert inst.worker_by_id[2].skills.bits == 0b100


def test_skill_line_fixes_order():
    inst = parse_instance(["S b,a", "W 0 0 0 1 1 1 a", "T 0 0 0 1 1 b"])
    assert list(inst.workers[0].skills) == [1] and list(inst.tasks[0].required) == [0]


@pytest.mark.parametrize("line", ["W 1 0 0 1 1", "X 1 2", "W a 0 0 1 1 1 s", "T 1 0 0 1 nan? s"])
def test_bad_lines_report_position(line):
    with pytest.raises(ParseError) as err:
        parse_instance(["# ok", line], source="f.txt")
    assert "f.txt:2" in str(err.value)


def test_assignment_formats():
    g = valid_pairs(generate(GeneratorConfig(m=30, n=60, seed=1)))
    res = solve_greedy(g)
    pairs, score, done = parse_assignment(format_assignment(res).splitlines())
    assert pairs == res.sorted_pairs()
    assert score == res.score() and done == len(res.completed)
    rows = [json.loads(r) for r in format_assignment(res, as_json=True).splitlines()]
    assert rows[-1] == {"score": res.score(), "completed": len(res.completed)}
    assert [(r["worker"], r["task"], r["cost"]) for r in rows[:-1]] == pairs


def test_kv_parsing():
    kv = parse_kv(["# settings", "m = 10", "budget_range = 1:5  # comment", ""])
    assert kv == {"m": "10", "budget_range": "1:5"}
    with pytest.raises(ParseError):
        parse_kv(["m=1", "m=2"])
    with pytest.raises(ParseError):
        parse_kv(["just text"])


def test_ranges():
    assert parse_range("5:10") == (5.0, 10.0)
    assert parse_range("5,10") == (5.0, 10.0)
    assert parse_range("3") == (3.0, 3.0)
    with pytest.raises(ParseError):
        parse_range("1:2:3")


def test_config_round_trip():
    cfg = config_from_mapping({"m": "12", "unit_cost_range": "10:20", "skill_universe": "30",
                               "skill_task_sizes": "2:4", "spatial_dist": "skewed"})
    assert cfg.m == 12 and cfg.unit_cost_range == (10.0, 20.0)
    assert cfg.skill_profile.universe == 30 and cfg.skill_profile.task_sizes == (2, 4)
    assert config_from_mapping(parse_kv(config_to_kv(cfg).splitlines())) == cfg
    with pytest.raises(ParseError):
        config_from_mapping({"colour": "red"})
