"""Online strategy, adversarial instances and lower-bound searches."""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import GeometryInfeasible, InvalidN
from .geometry import distance
from .model import DeliveryPlan, EventKind, Instance, PlanEvent, Point, Robot
from .offline_two import solve_two

SQRT_BAND = 1e-12


@dataclass
class OnlineOutcome:
    delivery_time: float
    winning_robot: int
    per_robot_solo_time: list[float]


def run_online(instance: Instance) -> OnlineOutcome:
    """Every robot heads to S and then to D; the first to arrive delivers."""
    S, D = instance.source, instance.destination
    sd = distance(S, D)
    times = [(distance(r.start, S) + sd) / r.speed for r in instance.robots]
    best = min(range(len(times)), key=lambda i: (times[i], i))
    return OnlineOutcome(times[best], best, times)


def competitive_ratio_two(instance: Instance) -> float:
    if len(instance.robots) != 2:
        raise ValueError("exactly two robots required")
    online = run_online(instance).delivery_time
    offline = solve_two(instance).total_time
    if offline == 0:
        return 1.0
    return online / offline


# -- collinear relays -----------------------------------------------------


@dataclass
class LineRelay:
    time: float
    chain: list[int]
    meetings: list[tuple[float, float]]  # (position, time) of pickup and each handover


def best_line_relay(xs, speeds, s: float, d: float) -> LineRelay:
    """Fastest relay for robots on a line with source s < destination d.

    Each relay member is strictly faster than the previous one and
    intercepts the carrier, which always heads towards d, as early as
    possible.  Enumerates every speed-ordered subset.
    """
    n = len(xs)
    order = sorted(range(n), key=lambda i: (speeds[i], i))
    best = LineRelay(math.inf, [], [])
    for size in range(1, n + 1):
        for chain in itertools.combinations(order, size):
            if any(speeds[a] >= speeds[b] for a, b in zip(chain, chain[1:])):
                continue
            first = chain[0]
            t = abs(xs[first] - s) / speeds[first]
            x, vc = s, speeds[first]
            meetings = [(x, t)]
            ok = True
            for b in chain[1:]:
                pb, vb = xs[b], speeds[b]
                if abs(pb - x) <= vb * t:
                    tau = t
                elif pb > x:
                    tau = (pb - x + vc * t) / (vb + vc)
                else:
                    tau = (x - vc * t - pb) / (vb - vc)
                m = x + vc * (tau - t)
                if m >= d:
                    ok = False
                    break
                x, t, vc = m, tau, vb
                meetings.append((x, t))
            if not ok:
                continue
            total = t + (d - x) / vc
            if total < best.time:
                best = LineRelay(total, list(chain), meetings)
    return best


def line_relay_plan(instance: Instance, relay: LineRelay) -> DeliveryPlan:
    """Timed plan for a relay found by :func:`best_line_relay` on an
    instance whose robots lie on the source-destination line."""
    S, D = instance.source, instance.destination
    sd = distance(S, D)
    ux, uy = (D.x - S.x) / sd, (D.y - S.y) / sd

    def at(x: float) -> Point:
        return Point(S.x + ux * x, S.y + uy * x)

    trajectories = [[(0.0, r.start)] for r in instance.robots]
    events = []
    chain = relay.chain
    for k, agent in enumerate(chain):
        path = trajectories[agent]
        speed = instance.robots[agent].speed
        x, t = relay.meetings[k]
        reach = distance(instance.robots[agent].start, at(x)) / speed
        if reach > 0:
            path.append((reach, at(x)))
        if t > path[-1][0]:
            path.append((t, at(x)))
        if k == 0:
            events.append(PlanEvent(EventKind.PICKUP, t, S, None, agent))
        else:
            events.append(PlanEvent(EventKind.HANDOVER, t, at(x), chain[k - 1], agent))
        if k + 1 < len(chain):
            nx, nt = relay.meetings[k + 1]
            if nt > t:
                path.append((nt, at(nx)))
        else:
            path.append((relay.time, D))
    events.append(PlanEvent(EventKind.DELIVER, relay.time, D, chain[-1], None))
    return DeliveryPlan(relay.time, events, trajectories)


# -- relay construction ---------------------------------------------------


@dataclass
class RelayConstruction:
    n: int
    meeting_points: list[Fraction]
    speeds: list[Fraction]
    positions: list[Fraction]
    online_time: float
    relay_time: float
    instance: Instance
    plan: DeliveryPlan

    @property
    def ratio(self) -> float:
        return self.online_time / self.relay_time

    @property
    def closed_form_ratio(self) -> Fraction:
        """The ratio 2 - 2/(2^n - 1) the deployment is designed to force."""
        return 2 - Fraction(2, 2**self.n - 1)


def build_relay_construction(n: int) -> RelayConstruction:
    """Robots on the unit segment with geometrically shrinking speeds.

    Meeting points, speeds and positions follow the construction formulas
    exactly (rational arithmetic).  ``relay_time`` is the best collinear
    relay the deployment actually admits, and the emitted plan realises it.
    """
    if n < 3:
        raise InvalidN("n must be at least 3")
    N = 2**n - 1
    meeting = [1 - Fraction(2 ** (i + 1) - 1, N) for i in range(n - 1)]
    speeds = [Fraction(1)]
    for i in range(n - 1):
        speeds.append(speeds[-1] * (1 - Fraction(2 ** (i + 2), 2 ** (n + 1) - 2 ** (i + 1) - 3)))
    positions = [4 * v - 1 for v in speeds]
    instance = Instance(
        Point(0.0, 0.0),
        Point(1.0, 0.0),
        tuple(Robot(Point(float(p), 0.0), float(v)) for p, v in zip(positions, speeds)),
    )
    # every robot's solo time is a rational; keep the race exact
    online = float(min((abs(p) + 1) / v for p, v in zip(positions, speeds)))
    relay = best_line_relay([float(p) for p in positions], [float(v) for v in speeds], 0.0, 1.0)
    plan = line_relay_plan(instance, relay)
    return RelayConstruction(n, meeting, speeds, positions, online, relay.time, instance, plan)


# -- lower bound: unknown slow speed --------------------------------------


@dataclass(frozen=True)
class AdversaryConfig:
    v: float
    alpha: float
    beta: float


def _workers() -> Optional[int]:
    raw = os.environ.get("PONY_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return None if n <= 0 else n


def _speed_ratios(v, alpha, beta):
    v, alpha, beta = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (v, alpha, beta)))
    k = v * v - 1
    R = v / k
    kx, sx = v * v / k, 1 / k
    mx, my = R * np.cos(alpha), R * np.sin(alpha)
    dxp, dyp = kx * np.cos(2 * alpha), kx * np.sin(2 * alpha)
    xx, xy = R * np.cos(beta), R * np.sin(beta)
    kX = np.hypot(kx - xx, xy)
    XD = np.hypot(dxp - xx, dyp - xy)
    SD = np.hypot(dxp - sx, dyp)
    KM = np.hypot(kx - mx, my)
    r1 = (kX + XD) / v / np.minimum(SD, 2 * KM / v)
    r0 = (kX * (1 + 1 / v) + SD) / (1 + SD)
    return r1, r0, SD, KM


def lb_speed_ratio(config: AdversaryConfig) -> tuple[float, float]:
    """Ratios of the online meeting at X against the offline optimum when
    the slow robot has speed 1 (first) or 0 (second)."""
    r1, r0, _, _ = _speed_ratios(config.v, config.alpha, config.beta)
    return float(r1), float(r0)


def speed_config_admissible(v, alpha):
    """True where the slow robot does not simply win by carrying alone."""
    _, _, SD, KM = _speed_ratios(v, alpha, 0.0)
    return (v * SD > 1 + SD) & (v * SD >= 2 * KM)


_GOLD = (math.sqrt(5) - 1) / 2


def _inner_min(v: float, alphas: np.ndarray, grid_beta: int, iters: int = 60):
    """Online player's best beta for each alpha: scan then golden section."""
    h = (math.pi / 2) / grid_beta
    betas = (np.arange(grid_beta) + 0.5) * h
    r1, r0, _, _ = _speed_ratios(v, alphas[:, None], betas[None, :])
    vals = np.maximum(r1, r0)
    i = np.argmin(vals, axis=1)
    lo = np.clip(betas[i] - h, 1e-12, math.pi / 2)
    hi = np.clip(betas[i] + h, 1e-12, math.pi / 2)

    def f(b):
        a1, a0, _, _ = _speed_ratios(v, alphas, b)
        return np.maximum(a1, a0)

    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - _GOLD * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + _GOLD * (hi - lo))
        nf1 = np.where(left, np.nan, f2)
        nf2 = np.where(left, f1, np.nan)
        fresh = f(np.where(left, nx1, nx2))
        f1 = np.where(left, fresh, nf1)
        f2 = np.where(left, nf2, fresh)
        x1, x2 = nx1, nx2
    best_b = np.where(f1 <= f2, x1, x2)
    best = np.minimum(f1, f2)
    best = np.minimum(best, vals[np.arange(len(alphas)), i])
    best_b = np.where(best == vals[np.arange(len(alphas)), i], betas[i], best_b)
    return best, best_b


def _speed_objective(v: float, alphas: np.ndarray, grid_beta: int):
    vals, betas = _inner_min(v, alphas, grid_beta)
    ok = speed_config_admissible(v, alphas)
    return np.where(ok, vals, -np.inf), betas


def _zoom_max(f, lo: float, hi: float, points: int = 33, rounds: int = 10):
    """Maximise a vectorised 1-D function by repeated grid zoom."""
    best_x, best_v = None, -math.inf
    for _ in range(rounds):
        xs = np.linspace(lo, hi, points)
        vals = f(xs)
        k = int(np.argmax(vals))
        if vals[k] >= best_v:
            best_x, best_v = float(xs[k]), float(vals[k])
        step = (hi - lo) / (points - 1)
        lo, hi = best_x - 2 * step, best_x + 2 * step
    return best_x, best_v


def _golden_max(f, lo: float, hi: float, width: float = 1e-10):
    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > width:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLD * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLD * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _map_rows(fn, items):
    workers = _workers()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def speed_landscape(grid_v: int, grid_alpha: int, grid_beta: int):
    """Coarse table of the adversary's value over (v, alpha); inadmissible
    cells are -inf.  Returns (vs, alphas, values, betas)."""
    vs = 1 + (np.arange(grid_v) + 1) / grid_v
    alphas = (np.arange(grid_alpha) + 0.5) * (math.pi / 2) / grid_alpha
    rows = _map_rows(lambda v: _speed_objective(float(v), alphas, grid_beta), vs)
    values = np.array([r[0] for r in rows])
    betas = np.array([r[1] for r in rows])
    return vs, alphas, values, betas


def lb_speed_search(grid_v: int = 256, grid_alpha: int = 256, grid_beta: int = 256, v_values=None):
    """Largest ratio the adversary can force when the slow speed is unknown.

    The adversary picks (v, alpha), the online player answers with beta,
    and the adversary then picks the slow speed 1 or 0.  Returns
    (bound, AdversaryConfig).
    """
    for g in (grid_v, grid_alpha, grid_beta):
        if g < 64:
            raise ValueError("resolutions must be at least 64")
    if v_values is not None:
        vs = np.asarray(v_values, dtype=float)
        alphas = (np.arange(grid_alpha) + 0.5) * (math.pi / 2) / grid_alpha
        rows = [_speed_objective(float(v), alphas, grid_beta) for v in vs]
        values = np.array([r[0] for r in rows])
    else:
        vs, alphas, values, _ = speed_landscape(grid_v, grid_alpha, grid_beta)
    iv, ia = np.unravel_index(int(np.argmax(values)), values.shape)
    ha = alphas[1] - alphas[0]

    def best_alpha(v: float):
        return _zoom_max(lambda a: _speed_objective(v, a, grid_beta)[0], max(alphas[ia] - 2 * ha, 1e-9), min(alphas[ia] + 2 * ha, math.pi / 2 - 1e-9))

    if v_values is None:
        hv = vs[1] - vs[0]
        v_lo, v_hi = max(vs[iv] - 2 * hv, 1 + 1e-9), min(vs[iv] + 2 * hv, 2.0)
        v_star, bound = _golden_max(lambda v: best_alpha(v)[1], v_lo, v_hi)
        if bound < values[iv, ia]:
            v_star = float(vs[iv])
    else:
        v_star = float(vs[iv])
    a_star, bound = best_alpha(v_star)
    val, b = _inner_min(v_star, np.array([a_star]), grid_beta)
    return float(val[0]), AdversaryConfig(float(v_star), float(a_star), float(b[0]))


# -- lower bound: unknown positions ---------------------------------------


def _sqrt_clamped(x, strict: bool):
    x = np.asarray(x, dtype=float)
    if strict and np.any(x < -SQRT_BAND):
        raise GeometryInfeasible("negative square-root argument")
    return np.sqrt(np.where(x < 0, np.where(x >= -SQRT_BAND, 0.0, np.nan), x))


def _position_ratio(v, alpha, strict: bool = False):
    v, alpha = np.broadcast_arrays(np.asarray(v, dtype=float), np.asarray(alpha, dtype=float))
    k = v * v - 1
    SD = _sqrt_clamped(1 + v**4 - 2 * v * v * np.cos(2 * alpha), strict) / k
    K1M1 = v / k * _sqrt_clamped(1 + v * v - 2 * v * np.cos(alpha), strict)
    C1D, SC1, C1X = v * v / k, 1 / k, v / k
    sin_beta = C1D * np.sin(2 * alpha) / SD
    X1C1 = SC1 * sin_beta
    SX1 = _sqrt_clamped(SC1**2 - X1C1**2, strict)
    X1X = _sqrt_clamped(C1X**2 - X1C1**2, strict)
    obtuse = C1D**2 > SC1**2 + SD**2
    SX = np.where(obtuse, X1X - SX1, SX1 + X1X)
    return (SX * (v - 1) + SD) / (2 * K1M1)


def lb_position_ratio(v: float, alpha: float) -> float:
    """Ratio forced when the adversary hides which of two mirrored fast
    robots exists."""
    if not v > 1:
        raise ValueError("v must exceed 1")
    return float(_position_ratio(v, alpha, strict=True))


def lb_position_search(grid_v: int = 256, grid_alpha: int = 256, v_max: float = 6.0, v_values=None):
    """Returns (bound, (v, alpha)) maximising the position lower bound."""
    for g in (grid_v, grid_alpha):
        if g < 64:
            raise ValueError("resolutions must be at least 64")
    vs = np.asarray(v_values, dtype=float) if v_values is not None else 1 + (np.arange(grid_v) + 1) * (v_max - 1) / grid_v
    alphas = (np.arange(grid_alpha) + 0.5) * (math.pi / 2) / grid_alpha
    table = np.nan_to_num(_position_ratio(vs[:, None], alphas[None, :]), nan=-np.inf)
    iv, ia = np.unravel_index(int(np.argmax(table)), table.shape)
    ha = alphas[1] - alphas[0]

    def best_alpha(v: float):
        return _zoom_max(
            lambda a: np.nan_to_num(_position_ratio(v, a), nan=-np.inf),
            max(alphas[ia] - 2 * ha, 1e-9),
            min(alphas[ia] + 2 * ha, math.pi / 2 - 1e-9),
        )

    if v_values is None:
        hv = vs[1] - vs[0]
        v_star, _ = _golden_max(lambda v: best_alpha(v)[1], max(vs[iv] - 2 * hv, 1 + 1e-9), min(vs[iv] + 2 * hv, v_max))
    else:
        v_star = float(vs[iv])
    a_star, bound = best_alpha(v_star)
    if bound < table[iv, ia]:
        v_star, a_star, bound = float(vs[iv]), float(alphas[ia]), float(table[iv, ia])
    return float(bound), (float(v_star), float(a_star))


def position_landscape(grid_v: int, grid_alpha: int, v_max: float = 6.0):
    vs = 1 + (np.arange(grid_v) + 1) * (v_max - 1) / grid_v
    alphas = (np.arange(grid_alpha) + 0.5) * (math.pi / 2) / grid_alpha
    return vs, alphas, _position_ratio(vs[:, None], alphas[None, :])
