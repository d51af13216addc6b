"""Points, robots, instances and timed delivery plans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

from .errors import InfeasiblePlan

SAME_POINT_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Point:
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Point:
        return Point(self.x / k, self.y / k)

    def __neg__(self) -> Point:
        return Point(-self.x, -self.y)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dot(self, other: Point) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point) -> float:
        return self.x * other.y - self.y * other.x

    def close_to(self, other: Point, tol: float = SAME_POINT_TOL) -> bool:
        return abs(self.x - other.x) <= tol and abs(self.y - other.y) <= tol


@dataclass(frozen=True)
class Robot:
    start: Point
    speed: float

    def __post_init__(self):
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise ValueError(f"robot speed must be positive and finite, got {self.speed}")


@dataclass(frozen=True)
class Instance:
    source: Point
    destination: Point
    robots: tuple[Robot, ...]

    def __post_init__(self):
        object.__setattr__(self, "robots", tuple(self.robots))
        if not self.robots:
            raise ValueError("robots must be non-empty")


class EventKind(str, Enum):
    PICKUP = "pickup"
    HANDOVER = "handover"
    DELIVER = "deliver"


@dataclass(frozen=True)
class PlanEvent:
    kind: EventKind
    time: float
    location: Point
    from_robot: Optional[int] = None
    to_robot: Optional[int] = None


Waypoint = tuple[float, Point]


@dataclass
class DeliveryPlan:
    total_time: float
    events: list[PlanEvent]
    trajectories: list[list[Waypoint]] = field(default_factory=list)

    def position(self, robot: int, t: float) -> Point:
        """Interpolated position of ``robot`` at time ``t``."""
        path = self.trajectories[robot]
        if t <= path[0][0]:
            return path[0][1]
        for (t0, p0), (t1, p1) in zip(path, path[1:]):
            if t <= t1:
                if t1 <= t0:
                    return p1
                s = (t - t0) / (t1 - t0)
                return Point(p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y))
        return path[-1][1]

    def scaled_time(self, k: float) -> DeliveryPlan:
        return DeliveryPlan(
            self.total_time * k,
            [PlanEvent(e.kind, e.time * k, e.location, e.from_robot, e.to_robot) for e in self.events],
            [[(t * k, p) for t, p in path] for path in self.trajectories],
        )

    def relabeled(self, mapping: Sequence[int], n_robots: int) -> DeliveryPlan:
        """Renumber robots: internal index ``i`` becomes ``mapping[i]``."""
        trajectories: list[list[Waypoint]] = [[] for _ in range(n_robots)]
        for i, path in enumerate(self.trajectories):
            trajectories[mapping[i]] = path

        def m(i):
            return None if i is None else mapping[i]

        events = [PlanEvent(e.kind, e.time, e.location, m(e.from_robot), m(e.to_robot)) for e in self.events]
        return DeliveryPlan(self.total_time, events, trajectories)


def check_plan(plan: DeliveryPlan, instance: Instance, rtol: float = 1e-9, atol: float = 1e-9) -> None:
    """Raise InfeasiblePlan unless ``plan`` is a valid delivery for ``instance``.

    Checks speed limits, time ordering, pickup at the source, co-location at
    every handover and delivery at the destination by the current holder.
    """
    scale = 1.0 + max(
        abs(c) for p in [instance.source, instance.destination] + [r.start for r in instance.robots] for c in p
    )
    tol = atol * scale
    if len(plan.trajectories) != len(instance.robots):
        raise InfeasiblePlan("one trajectory per robot required")
    for i, (robot, path) in enumerate(zip(instance.robots, plan.trajectories)):
        if not path:
            raise InfeasiblePlan(f"robot {i} has an empty trajectory")
        t0, p0 = path[0]
        if abs(t0) > tol or not p0.close_to(robot.start, tol):
            raise InfeasiblePlan(f"robot {i} does not start at its start point at time 0")
        for (ta, pa), (tb, pb) in zip(path, path[1:]):
            if tb < ta - tol:
                raise InfeasiblePlan(f"robot {i} waypoints not time-ordered")
            if (pb - pa).norm() > robot.speed * (tb - ta) * (1 + rtol) + tol:
                raise InfeasiblePlan(f"robot {i} exceeds its speed between t={ta} and t={tb}")

    events = plan.events
    if not events:
        raise InfeasiblePlan("plan has no events")
    for a, b in zip(events, events[1:]):
        if b.time < a.time - tol:
            raise InfeasiblePlan("events not sorted by time")

    def at(robot: int, t: float, p: Point, what: str):
        if (plan.position(robot, t) - p).norm() > tol:
            raise InfeasiblePlan(f"robot {robot} not at the {what} location at t={t}")

    first, last = events[0], events[-1]
    if first.kind != EventKind.PICKUP or not first.location.close_to(instance.source, tol):
        raise InfeasiblePlan("first event must be a pickup at the source")
    if last.kind != EventKind.DELIVER or not last.location.close_to(instance.destination, tol):
        raise InfeasiblePlan("last event must be a delivery at the destination")
    if abs(last.time - plan.total_time) > tol + rtol * abs(plan.total_time):
        raise InfeasiblePlan("delivery time differs from total_time")
    holder = first.to_robot
    at(holder, first.time, first.location, "pickup")
    for e in events[1:]:
        if e.kind == EventKind.HANDOVER:
            if e.from_robot != holder:
                raise InfeasiblePlan("handover from a robot that does not hold the message")
            at(e.from_robot, e.time, e.location, "handover")
            at(e.to_robot, e.time, e.location, "handover")
            holder = e.to_robot
        elif e.kind == EventKind.DELIVER:
            if e.from_robot != holder:
                raise InfeasiblePlan("delivery by a robot that does not hold the message")
            at(holder, e.time, e.location, "delivery")
        else:
            raise InfeasiblePlan("pickup may only happen once")
    if events[-1] is not last or sum(e.kind == EventKind.DELIVER for e in events) != 1:
        raise InfeasiblePlan("exactly one delivery required")
