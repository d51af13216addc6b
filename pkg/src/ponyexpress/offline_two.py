"""Exact offline delivery with two robots of different speeds.

Internally the slow robot (index 0, start L) has speed 1 and the fast robot
(index 1, start K) has speed v > 1.  :func:`solve_two` accepts an
:class:`Instance` with arbitrary speeds and rescales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DegenerateSpeed
from .geometry import TOL_SPEED, apollonius_circle, bisector_meeting_point, distance, unsigned_angle
from .model import DeliveryPlan, EventKind, Instance, PlanEvent, Point

TIE_TOL = 1e-9
BETA_SCAN = 720
BETA_WIDTH = 1e-12
_GOLDEN = (math.sqrt(5) - 1) / 2


class Case(str, Enum):
    FAST_SOLO = "fast_solo"
    SLOW_SOLO = "slow_solo"
    HANDOVER = "handover"


@dataclass
class TwoRobotSolution:
    plan: DeliveryPlan
    case: Case
    meeting_point: Optional[Point] = None
    detour_point: Optional[Point] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def total_time(self) -> float:
        return self.plan.total_time


def _solo_plan(carrier: int, starts: list[Point], speed: float, S: Point, D: Point) -> DeliveryPlan:
    p = starts[carrier]
    t_pick = distance(p, S) / speed
    t_end = t_pick + distance(S, D) / speed
    trajectories = [[(0.0, q)] for q in starts]
    path = trajectories[carrier]
    if t_pick > 0:
        path.append((t_pick, S))
    if t_end > t_pick:
        path.append((t_end, D))
    events = [
        PlanEvent(EventKind.PICKUP, t_pick, S, None, carrier),
        PlanEvent(EventKind.DELIVER, t_end, D, carrier, None),
    ]
    return DeliveryPlan(t_end, events, trajectories)


def _slow_solo(L: Point, K: Point, S: Point, D: Point) -> TwoRobotSolution:
    return TwoRobotSolution(_solo_plan(0, [L, K], 1.0, S, D), Case.SLOW_SOLO)


def _fast_solo(L: Point, K: Point, S: Point, D: Point, v: float) -> TwoRobotSolution:
    return TwoRobotSolution(_solo_plan(1, [L, K], v, S, D), Case.FAST_SOLO)


def _handover_plan(L: Point, K: Point, Q: Point, S: Point, M: Point, D: Point, v: float) -> DeliveryPlan:
    a = distance(L, S)
    t_meet = max(a + distance(S, M), (distance(K, Q) + distance(Q, M)) / v)
    t_end = t_meet + distance(M, D) / v
    slow = [(0.0, L)]
    if a > 0:
        slow.append((a, S))
    slow.append((a + distance(S, M), M))
    fast = [(0.0, K)]
    if not Q.close_to(K):
        fast.append((distance(K, Q) / v, Q))
    fast.append((t_meet, M))
    fast.append((t_end, D))
    events = [
        PlanEvent(EventKind.PICKUP, a, S, None, 0),
        PlanEvent(EventKind.HANDOVER, t_meet, M, 0, 1),
        PlanEvent(EventKind.DELIVER, t_end, D, 1, None),
    ]
    return DeliveryPlan(t_end, events, [slow, fast])


def _check_speed(v: float):
    if not v > 1 + TOL_SPEED:
        raise DegenerateSpeed(f"speed ratio {v} must exceed 1")


def _at_source_meeting(K: Point, S: Point, D: Point, v: float):
    """Meeting point and angle for the slow robot waiting at S, or None when
    the slow robot should carry the message alone."""
    if distance(K, D) / v >= distance(S, D):
        return None
    circle = apollonius_circle(K, S, v)
    beta = unsigned_angle(S - K, D - K)
    if math.sin(beta) <= 1 / v + 1e-12 and math.cos(beta) > 0:
        alpha = math.asin(min(1.0, v * math.sin(beta))) - beta
        k = distance(S, K)
        scale = k / (v * v - 1)
        lx, ly = scale * (v * math.cos(alpha) - 1), scale * v * math.sin(alpha)
        # local frame: S at origin, K on +x, D on the upper side
        ex, ey = (K.x - S.x) / k, (K.y - S.y) / k
        side = 1.0 if ex * (D.y - S.y) - ey * (D.x - S.x) >= 0 else -1.0
        ly *= side
        M = Point(S.x + ex * lx - ey * ly, S.y + ey * lx + ex * ly)
        if distance(K, D) >= distance(K, M):
            return M, alpha
    M = bisector_meeting_point(circle, K, D, v)
    alpha = unsigned_angle(K - circle.center, M - circle.center)
    return M, alpha


def solve_two_at_source(K: Point, S: Point, D: Point, v: float) -> TwoRobotSolution:
    """Optimal plan when the slow robot (speed 1) starts on the source."""
    _check_speed(v)
    if S.close_to(D):
        return _slow_solo(S, K, S, D)
    found = _at_source_meeting(K, S, D, v)
    if found is None:
        return _slow_solo(S, K, S, D)
    M, alpha = found
    plan = _handover_plan(S, K, K, S, M, D, v)
    if plan.total_time >= distance(S, D) - TIE_TOL * max(1.0, distance(S, D)):
        return _slow_solo(S, K, S, D)
    return TwoRobotSolution(plan, Case.HANDOVER, meeting_point=M, detour_point=K, alpha=alpha)


def _at_source_time(K: Point, S: Point, D: Point, v: float) -> float:
    found = _at_source_meeting(K, S, D, v)
    if found is None:
        return distance(S, D)
    M = found[0]
    return min(distance(S, D), max(distance(S, M), distance(K, M) / v) + distance(M, D) / v)


def _scan_values(L: Point, K: Point, S: Point, D: Point, v: float, betas: np.ndarray) -> np.ndarray:
    """Handover time for every detour direction, vectorised."""
    from .geometry import min_path_on_circles

    a = distance(L, S)
    sd = distance(S, D)
    k2 = v * v - 1
    qx = K.x + v * a * np.cos(betas)
    qy = K.y + v * a * np.sin(betas)
    sq = np.hypot(S.x - qx, S.y - qy)
    cx = S.x + (S.x - qx) / k2
    cy = S.y + (S.y - qy) / k2
    r = v * sq / k2
    ck = sq * v * v / k2
    ex, ey = (qx - cx) / ck, (qy - cy) / ck
    wx, wy = D.x - cx, D.y - cy
    dx = ex * wx + ey * wy
    dy = -ey * wx + ex * wy
    _, g = min_path_on_circles(ck, r, dx, dy)
    return a + np.minimum(sd, g / v)


def _golden_min(f, lo: float, hi: float, width: float):
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > width:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _detour(K: Point, radius: float, beta: float) -> Point:
    return Point(K.x + radius * math.cos(beta), K.y + radius * math.sin(beta))


def solve_two_general(L: Point, K: Point, S: Point, D: Point, v: float) -> TwoRobotSolution:
    """Optimal plan for a slow robot (speed 1) at L and a fast one (speed v) at K."""
    _check_speed(v)
    a = distance(L, S)
    ks = distance(K, S)
    kd = distance(K, D)
    sd = distance(S, D)
    if S.close_to(D):
        return _fast_solo(L, K, S, D, v) if ks / v < a else _slow_solo(L, K, S, D)
    if ks / v <= a:
        return _fast_solo(L, K, S, D, v)
    if kd / v >= a + sd:
        return _slow_solo(L, K, S, D)
    if a <= 1e-15 * max(1.0, sd):
        sol = solve_two_at_source(K, S, D, v)
        if sol.case == Case.HANDOVER:
            sol.beta = 0.0
        return sol

    radius = v * a
    step = 2 * math.pi / BETA_SCAN
    betas = np.arange(BETA_SCAN) * step
    vals = _scan_values(L, K, S, D, v, betas)
    # local minima of the cyclic scan, best first
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    minima = np.flatnonzero((vals <= left) & (vals <= right))
    minima = minima[np.argsort(vals[minima], kind="stable")]
    best_val = float(vals[minima[0]])
    candidates = [i for i in minima[:3] if vals[i] <= best_val + 1e-3 * max(1.0, best_val)]

    def objective(beta: float) -> float:
        return a + _at_source_time(_detour(K, radius, beta), S, D, v)

    beta_best, t_best = None, math.inf
    for i in candidates:
        b, t = _golden_min(objective, (i - 1) * step, (i + 1) * step, BETA_WIDTH)
        if t < t_best:
            beta_best, t_best = b, t

    slow_time = a + sd
    fast_time = (ks + sd) / v
    solo_best = min(slow_time, fast_time)
    if t_best >= solo_best - TIE_TOL * max(1.0, solo_best):
        return _slow_solo(L, K, S, D) if slow_time <= fast_time else _fast_solo(L, K, S, D, v)
    beta_best = beta_best % (2 * math.pi)
    Q = _detour(K, radius, beta_best)
    found = _at_source_meeting(Q, S, D, v)
    M, alpha = found
    plan = _handover_plan(L, K, Q, S, M, D, v)
    return TwoRobotSolution(plan, Case.HANDOVER, meeting_point=M, detour_point=Q, alpha=alpha, beta=beta_best)


def optimal_time_constraint_residual(M: Point, L: Point, K: Point, S: Point, v: float) -> float:
    """Residual of the meeting-point constraint.

    Zero exactly when a fast robot from K, after a straight detour of
    length v|LS|, can reach M at the same moment as the slow robot that went
    L -> S -> M.
    """
    a = distance(L, S)
    if not a > 0:
        raise ValueError("residual needs |LS| > 0")
    km2 = (M.x - K.x) ** 2 + (M.y - K.y) ** 2
    sm2 = (M.x - S.x) ** 2 + (M.y - S.y) ** 2
    return (km2 / (2 * a * v * v) - sm2 / (2 * a) - a / 2) ** 2 - sm2


def solve_two(instance: Instance) -> TwoRobotSolution:
    """Optimal two-robot plan for arbitrary positive speeds."""
    if len(instance.robots) != 2:
        raise ValueError("exactly two robots required")
    r0, r1 = instance.robots
    S, D = instance.source, instance.destination
    lo, hi = sorted([r0.speed, r1.speed])
    if hi / lo <= 1 + TOL_SPEED:
        times = [(distance(r.start, S) + distance(S, D)) / r.speed for r in (r0, r1)]
        carrier = 0 if times[0] <= times[1] else 1
        plan = _solo_plan(carrier, [r0.start, r1.start], r0.speed if carrier == 0 else r1.speed, S, D)
        return TwoRobotSolution(plan, Case.SLOW_SOLO if carrier == 0 else Case.FAST_SOLO)
    slow_idx = 0 if r0.speed < r1.speed else 1
    slow, fast = instance.robots[slow_idx], instance.robots[1 - slow_idx]
    u = slow.speed
    sol = solve_two_general(slow.start, fast.start, S, D, fast.speed / u)
    plan = sol.plan.scaled_time(1 / u).relabeled([slow_idx, 1 - slow_idx], 2)
    return TwoRobotSolution(plan, sol.case, sol.meeting_point, sol.detour_point, sol.alpha, sol.beta)
