"""JSON files for instances and schedules.

Every number is written as an exact rational string (``"1/3"``). On input,
JSON numbers are accepted too and parsed exactly from their decimal text.
Job numbers and speed levels are 1-based in files and 0-based in memory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

from .core import Instance, Job, Ordering, SpeedProfile
from .errors import ParseError
from .metrics import Schedule, ScheduleMetrics, Segment

__all__ = [
    "LoadedInstance", "LoadedSchedule", "read_instance", "write_instance", "load_instance",
    "instance_to_dict", "instance_from_dict", "schedule_to_dict", "schedule_from_dict",
    "read_schedule", "write_schedule", "dumps", "loads", "rat",
]


def rat(q) -> str:
    return str(Fraction(q))


def _num(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{where}: cannot parse {value!r} as a rational") from None
    raise ParseError(f"{where}: expected a rational, got {value!r}")


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _plain(value):
    if isinstance(value, Fraction):
        return rat(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def loads(text: str, source: str = "<input>") -> Dict[str, Any]:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be a JSON object")
    return doc


@dataclass
class LoadedInstance:
    instance: Instance
    ordering: Optional[Ordering] = None
    provenance: Dict[str, Any] = field(default_factory=dict)


def instance_to_dict(instance: Instance, ordering: Optional[Ordering] = None,
                     provenance: Optional[dict] = None) -> Dict[str, Any]:
    jobs = []
    for t, c in zip(instance.templates, instance.counts):
        entry = {"r": rat(t.release), "v": rat(t.volume), "w": rat(t.weight)}
        if c != 1:
            entry["count"] = c
        jobs.append(entry)
    doc: Dict[str, Any] = {
        "jobs": jobs,
        "speeds": [rat(s) for s in instance.profile.speeds],
        "powers": [rat(p) for p in instance.profile.powers],
        "variant": "fe" if instance.is_fe else {"budget": rat(instance.budget)},
    }
    if ordering is not None:
        doc["ordering"] = [j + 1 for j in ordering.perm]
        doc["ordering_kind"] = ordering.kind
    if provenance:
        doc["provenance"] = _plain(provenance)
    return doc


def instance_from_dict(doc: Dict[str, Any], source: str = "<input>") -> LoadedInstance:
    for key in ("jobs", "speeds", "powers"):
        if key not in doc:
            raise ParseError(f"{source}: missing field {key!r}")
    if not isinstance(doc["jobs"], list):
        raise ParseError(f"{source}: jobs must be a list")
    templates, counts = [], []
    for i, entry in enumerate(doc["jobs"]):
        where = f"{source}: jobs[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        unknown = set(entry) - {"r", "v", "w", "count"}
        if unknown:
            raise ParseError(f"{where}: unknown field(s) {sorted(unknown)}")
        r = _num(entry.get("r", "0"), f"{where}.r")
        v = _num(entry.get("v"), f"{where}.v")
        w = _num(entry.get("w", "1"), f"{where}.w")
        templates.append(Job(r, v, w))
        c = _int(entry.get("count", 1), f"{where}.count")
        if c < 1:
            raise ParseError(f"{where}.count: must be positive")
        counts.append(c)
    speeds = [_num(s, f"{source}: speeds[{i}]") for i, s in enumerate(doc["speeds"])]
    powers = [_num(p, f"{source}: powers[{i}]") for i, p in enumerate(doc["powers"])]
    profile = SpeedProfile(tuple(speeds), tuple(powers))
    variant = doc.get("variant", "fe")
    budget = None
    if isinstance(variant, dict) and "budget" in variant:
        budget = _num(variant["budget"], f"{source}: variant.budget")
    elif variant != "fe" and variant != {"fe": True}:
        raise ParseError(f"{source}: variant must be \"fe\" or {{\"budget\": ...}}")
    instance = Instance(templates, profile, budget, counts=counts)
    ordering = None
    if "ordering" in doc:
        perm = doc["ordering"]
        if not isinstance(perm, list):
            raise ParseError(f"{source}: ordering must be a list of job numbers")
        ordering = Ordering(tuple(_int(j, f"{source}: ordering") - 1 for j in perm),
                            doc.get("ordering_kind", "completion"))
    return LoadedInstance(instance, ordering, dict(doc.get("provenance", {})))


def load_instance(path) -> LoadedInstance:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return instance_from_dict(loads(text, str(path)), str(path))


def read_instance(path) -> Instance:
    return load_instance(path).instance


def write_instance(instance: Instance, path, ordering: Optional[Ordering] = None,
                   provenance: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(instance_to_dict(instance, ordering, provenance)))


# -- schedules -------------------------------------------------------------------

@dataclass
class LoadedSchedule:
    schedule: Schedule
    instance: Instance
    ordering: Optional[Ordering] = None
    metrics: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)


def metrics_to_dict(m: ScheduleMetrics) -> Dict[str, Any]:
    out = {
        "C": [rat(c) for c in m.completion],
        "x": [rat(x) for x in m.processing],
        "flow": rat(m.flow),
        "energy": rat(m.energy),
        "objective": rat(m.objective),
    }
    if m.extended is not None:
        out["C_hat"] = [rat(c) for c in m.extended]
        out["extended_flow"] = rat(m.extended_flow)
    return out


def schedule_to_dict(schedule: Schedule, instance: Instance, metrics: Optional[ScheduleMetrics] = None,
                     ordering: Optional[Ordering] = None, extra: Optional[dict] = None) -> Dict[str, Any]:
    segs = []
    for s in schedule.segments:
        if s.idle:
            segs.append({"start": rat(s.start), "end": rat(s.end), "idle": True})
        else:
            segs.append({"start": rat(s.start), "end": rat(s.end), "job": s.job + 1, "level": s.level + 1})
    doc: Dict[str, Any] = {"instance": instance_to_dict(instance, ordering)}
    doc["segments"] = segs
    if metrics is not None:
        doc["metrics"] = metrics_to_dict(metrics)
    if extra:
        doc.update(_plain(extra))
    return doc


def schedule_from_dict(doc: Dict[str, Any], source: str = "<input>") -> LoadedSchedule:
    if "instance" not in doc or "segments" not in doc:
        raise ParseError(f"{source}: schedule files need 'instance' and 'segments'")
    loaded = instance_from_dict(doc["instance"], f"{source}: instance")
    segs = []
    for i, entry in enumerate(doc["segments"]):
        where = f"{source}: segments[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        start = _num(entry.get("start"), f"{where}.start")
        end = _num(entry.get("end"), f"{where}.end")
        if entry.get("idle"):
            segs.append(Segment(start, end))
        else:
            job = _int(entry.get("job"), f"{where}.job") - 1
            level = _int(entry.get("level"), f"{where}.level") - 1
            segs.append(Segment(start, end, job, level))
    extra = {k: v for k, v in doc.items() if k not in ("instance", "segments", "metrics")}
    return LoadedSchedule(Schedule(tuple(segs)), loaded.instance, loaded.ordering,
                          dict(doc.get("metrics", {})), extra)


def read_schedule(path) -> LoadedSchedule:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return schedule_from_dict(loads(text, str(path)), str(path))


def write_schedule(schedule: Schedule, instance: Instance, path, metrics: Optional[ScheduleMetrics] = None,
                   ordering: Optional[Ordering] = None, extra: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(schedule_to_dict(schedule, instance, metrics, ordering, extra)))
