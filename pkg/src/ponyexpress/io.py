"""JSON instance and plan files."""
from __future__ import annotations

import json
import math
from typing import Any

from .model import DeliveryPlan, EventKind, Instance, PlanEvent, Point, Robot


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where} must be a number")
    x = float(value)
    if not math.isfinite(x):
        raise InputError(f"{where} must be finite")
    return x


def _pair(value: Any, where: str) -> Point:
    if not isinstance(value, list) or len(value) != 2:
        raise InputError(f"{where} must be an [x, y] pair")
    return Point(_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_instance(text: str) -> Instance:
    data = _load(text)
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    for key in ("source", "destination", "robots"):
        if key not in data:
            raise InputError(f"missing field '{key}'")
    S = _pair(data["source"], "source")
    D = _pair(data["destination"], "destination")
    robots = data["robots"]
    if not isinstance(robots, list):
        raise InputError("robots must be an array")
    if not robots:
        raise InputError("robots must be non-empty")
    out = []
    for i, r in enumerate(robots):
        if not isinstance(r, dict) or not {"x", "y", "speed"} <= r.keys():
            raise InputError(f"robots[{i}] must have x, y and speed")
        speed = _number(r["speed"], f"robots[{i}].speed")
        if speed <= 0:
            raise InputError(f"robots[{i}].speed must be positive")
        out.append(Robot(Point(_number(r["x"], f"robots[{i}].x"), _number(r["y"], f"robots[{i}].y")), speed))
    return Instance(S, D, tuple(out))


def instance_to_dict(instance: Instance) -> dict:
    return {
        "source": [instance.source.x, instance.source.y],
        "destination": [instance.destination.x, instance.destination.y],
        "robots": [{"x": r.start.x, "y": r.start.y, "speed": r.speed} for r in instance.robots],
    }


def plan_to_dict(plan: DeliveryPlan) -> dict:
    return {
        "total_time": plan.total_time,
        "events": [
            {
                "kind": e.kind.value,
                "time": e.time,
                "location": [e.location.x, e.location.y],
                "from": e.from_robot,
                "to": e.to_robot,
            }
            for e in plan.events
        ],
        "trajectories": [[{"t": t, "x": p.x, "y": p.y} for t, p in path] for path in plan.trajectories],
    }


def dumps(obj: Any) -> str:
    # floats use the shortest repr that round-trips, so output is deterministic
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def serialize_plan(plan: DeliveryPlan) -> str:
    return dumps(plan_to_dict(plan))


def serialize_instance(instance: Instance) -> str:
    return dumps(instance_to_dict(instance))


def _robot_index(value: Any, where: str):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where} must be a robot index or null")
    return value


def parse_plan(text: str) -> DeliveryPlan:
    data = _load(text)
    if not isinstance(data, dict) or not {"total_time", "events", "trajectories"} <= data.keys():
        raise InputError("plan must have total_time, events and trajectories")
    events = []
    for i, e in enumerate(data["events"]):
        try:
            kind = EventKind(e["kind"])
        except (KeyError, ValueError, TypeError):
            raise InputError(f"events[{i}].kind invalid") from None
        events.append(
            PlanEvent(
                kind,
                _number(e.get("time"), f"events[{i}].time"),
                _pair(e.get("location"), f"events[{i}].location"),
                _robot_index(e.get("from"), f"events[{i}].from"),
                _robot_index(e.get("to"), f"events[{i}].to"),
            )
        )
    trajectories = []
    for i, path in enumerate(data["trajectories"]):
        if not isinstance(path, list):
            raise InputError(f"trajectories[{i}] must be an array")
        pts = []
        for j, w in enumerate(path):
            if not isinstance(w, dict):
                raise InputError(f"trajectories[{i}][{j}] must be an object")
            pts.append(
                (
                    _number(w.get("t"), f"trajectories[{i}][{j}].t"),
                    Point(_number(w.get("x"), f"trajectories[{i}][{j}].x"), _number(w.get("y"), f"trajectories[{i}][{j}].y")),
                )
            )
        trajectories.append(pts)
    return DeliveryPlan(_number(data["total_time"], "total_time"), events, trajectories)
