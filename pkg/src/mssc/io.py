"""Text formats: instance files, assignment output and key=value configs.

Instance files hold one entity per line::

    # comment
    S cook,drive,lift          (optional: fixes the skill index order)
    W <id> <x> <y> <velocity> <max_dist> <unit_cost> <skill,skill,...>
    T <id> <x> <y> <deadline> <budget> <skill,skill,...>

Skills are symbolic names.  Names get indices in the order of the ``S``
line, then in order of first appearance.
"""

from __future__ import annotations

import json
import math
from dataclasses import fields
from pathlib import Path
from typing import Iterable, Mapping, TextIO

from .generate import GeneratorConfig, SkillProfile
from .model import AssignmentInstance, Instance, MSSCError, Task, Worker
from .skills import SkillSet


class ParseError(MSSCError, ValueError):
    def __init__(self, msg: str, line: int | None = None, source: str = "<input>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + msg)
        self.line = line


def _num(tok: str, what: str, line: int, source: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"{what}: not a number: {tok!r}", line, source) from None
    if not math.isfinite(v):
        raise ParseError(f"{what}: must be finite", line, source)
    return v


def _int(tok: str, what: str, line: int, source: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what}: not an integer: {tok!r}", line, source) from None


def parse_instance(lines: Iterable[str], source: str = "<input>") -> Instance:
    index: dict[str, int] = {}

    def skills(tok: str, line: int) -> SkillSet:
        names = [s.strip() for s in tok.split(",") if s.strip()]
        if not names:
            raise ParseError("empty skill list", line, source)
        return SkillSet.of(index.setdefault(s, len(index)) for s in names)

    workers, tasks = [], []
    for no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        kind = parts[0]
        try:
            if kind == "S":
                if workers or tasks:
                    raise ParseError("S line must precede workers and tasks", no, source)
                for name in " ".join(parts[1:]).split(","):
                    if name.strip():
                        index.setdefault(name.strip(), len(index))
            elif kind == "W":
                if len(parts) != 8:
                    raise ParseError(f"worker line needs 7 fields, got {len(parts) - 1}", no, source)
                wid = _int(parts[1], "worker id", no, source)
                x, y, v, d, c = (_num(p, f, no, source) for p, f in
                                 zip(parts[2:7], ("x", "y", "velocity", "max_dist", "unit_cost")))
                workers.append(Worker(wid, (x, y), v, d, c, skills(parts[7], no)))
            elif kind == "T":
                if len(parts) != 7:
                    raise ParseError(f"task line needs 6 fields, got {len(parts) - 1}", no, source)
                tid = _int(parts[1], "task id", no, source)
                x, y, e, b = (_num(p, f, no, source) for p, f in
                              zip(parts[2:6], ("x", "y", "deadline", "budget")))
                tasks.append(Task(tid, (x, y), e, b, skills(parts[6], no)))
            else:
                raise ParseError(f"unknown record type {kind!r}", no, source)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), no, source) from None
    names = sorted(index, key=index.get)
    try:
        return Instance(workers, tasks, skill_names=names)
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None


def read_instance(path: str | Path) -> Instance:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_instance(fh, str(path))


def _skill_names(inst: Instance) -> list[str]:
    names = list(inst.skill_names or [])
    for k in range(len(names), inst.universe):
        names.append(f"s{k}")
    return names


def format_instance(inst: Instance) -> str:
    names = _skill_names(inst)
    sk = lambda s: ",".join(names[k] for k in s)
    out = [f"# {inst.n} workers, {inst.m} tasks"]
    if names:
        out.append("S " + ",".join(names))
    for w in inst.workers:
        out.append(f"W {w.id} {w.loc[0]!r} {w.loc[1]!r} {w.velocity!r} {w.max_dist!r} {w.unit_cost!r} {sk(w.skills)}")
    for t in inst.tasks:
        out.append(f"T {t.id} {t.loc[0]!r} {t.loc[1]!r} {t.deadline!r} {t.budget!r} {sk(t.required)}")
    return "\n".join(out) + "\n"


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8")


def format_assignment(a: AssignmentInstance, as_json: bool = False) -> str:
    """``wid tid cost`` per pair (by worker id) and SCORE / COMPLETED footers."""
    pairs = a.sorted_pairs()
    score, done = a.score(), len(a.completed)
    if as_json:
        rows = [json.dumps({"worker": w, "task": t, "cost": c}) for w, t, c in pairs]
        rows.append(json.dumps({"score": score, "completed": done}))
    else:
        rows = [f"{w} {t} {c!r}" for w, t, c in pairs]
        rows += [f"SCORE {score!r}", f"COMPLETED {done}"]
    return "\n".join(rows) + "\n"


def write_assignment(a: AssignmentInstance, out: TextIO, as_json: bool = False) -> None:
    out.write(format_assignment(a, as_json))


def parse_assignment(lines: Iterable[str], source: str = "<input>") -> tuple[list[tuple[int, int, float]], float | None, int | None]:
    """Pairs plus the SCORE and COMPLETED footers (None when absent)."""
    pairs, score, done = [], None, None
    for no, raw in enumerate(lines, 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "SCORE" and len(parts) == 2:
            score = _num(parts[1], "score", no, source)
        elif parts[0] == "COMPLETED" and len(parts) == 2:
            done = _int(parts[1], "completed", no, source)
        elif len(parts) == 3:
            pairs.append((_int(parts[0], "worker id", no, source), _int(parts[1], "task id", no, source),
                          _num(parts[2], "cost", no, source)))
        else:
            raise ParseError(f"unrecognised line {raw.strip()!r}", no, source)
    return pairs, score, done


# ---- key=value configs ----

def parse_kv(lines: Iterable[str], source: str = "<input>") -> dict[str, str]:
    out: dict[str, str] = {}
    for no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(f"expected key=value, got {text!r}", no, source)
        key, value = (s.strip() for s in text.split("=", 1))
        if not key:
            raise ParseError("empty key", no, source)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", no, source)
        out[key] = value
    return out


def read_kv(path: str | Path) -> dict[str, str]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_kv(fh, str(path))


def parse_range(text: str) -> tuple[float, float]:
    """``"5:10"`` or ``"5,10"`` -> (5.0, 10.0); a single number gives a point range."""
    parts = text.replace(",", ":").split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, v
        if len(parts) == 2:
            return float(parts[0]), float(parts[1])
    except ValueError:
        pass
    raise ParseError(f"bad range {text!r}")


def _int_pair(text: str) -> tuple[int, int]:
    lo, hi = parse_range(text)
    if lo != int(lo) or hi != int(hi):
        raise ParseError(f"expected integer range, got {text!r}")
    return int(lo), int(hi)


_PROFILE_KEYS = {
    "skill_universe": ("universe", int),
    "skill_worker_sizes": ("worker_sizes", _int_pair),
    "skill_worker_size_exponent": ("worker_size_exponent", float),
    "skill_task_sizes": ("task_sizes", _int_pair),
    "skill_popularity_exponent": ("popularity_exponent", float),
}


def config_value(key: str, text: str):
    """Parse one generator setting given as text."""
    if key in ("m", "n", "seed"):
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"{key}: expected an integer, got {text!r}") from None
    if key == "spatial_dist":
        return text
    if key.endswith("_range"):
        return parse_range(text)
    if key in _PROFILE_KEYS:
        return _PROFILE_KEYS[key][1](text)
    raise ParseError(f"unknown setting {key!r}")


def config_from_mapping(values: Mapping[str, str], base: GeneratorConfig | None = None) -> GeneratorConfig:
    """Build a :class:`GeneratorConfig` from text settings; unknown keys are errors."""
    base = base or GeneratorConfig()
    top = {f.name for f in fields(GeneratorConfig)} - {"skill_profile"}
    changes, profile = {}, {}
    for key, text in values.items():
        if key in top:
            changes[key] = config_value(key, text)
        elif key in _PROFILE_KEYS:
            profile[_PROFILE_KEYS[key][0]] = config_value(key, text)
        else:
            raise ParseError(f"unknown setting {key!r}")
    if profile:
        changes["skill_profile"] = SkillProfile(**{**_profile_dict(base.skill_profile), **profile})
    cfg = base.with_(**changes)
    cfg.validate()
    return cfg


def _profile_dict(p: SkillProfile) -> dict:
    return {f.name: getattr(p, f.name) for f in fields(SkillProfile)}


def config_to_kv(cfg: GeneratorConfig) -> str:
    rows = []
    for f in fields(GeneratorConfig):
        v = getattr(cfg, f.name)
        if f.name == "skill_profile":
            continue
        rows.append(f"{f.name} = {v[0]!r}:{v[1]!r}" if isinstance(v, tuple) else f"{f.name} = {v}")
    for key, (attr, _) in _PROFILE_KEYS.items():
        v = getattr(cfg.skill_profile, attr)
        rows.append(f"{key} = {v[0]}:{v[1]}" if isinstance(v, tuple) else f"{key} = {v}")
    return "\n".join(rows) + "\n"
