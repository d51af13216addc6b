"""Grid-based approximation for any number of robots.

Robots first snap to the nearest vertex of an epsilon-grid aligned with the
source-destination axis, then an exact relay is computed on the grid graph.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateInstance, GridTooLarge, Unreachable
from .geometry import distance
from .model import DeliveryPlan, EventKind, Instance, PlanEvent, Point

MAX_GRID_RATIO = 4000


def rectilinear_detour_bound(a: Point, p: Point) -> tuple[float, float]:
    """Leg lengths of the axis-aligned L-path from a to p."""
    return abs(p.x - a.x), abs(p.y - a.y)


@dataclass(frozen=True)
class GridModel:
    """Epsilon-grid in the frame where S is the origin and D lies on +x.

    Vertex ``(i, j)`` sits at local coordinates ``(i0 + i, j0 + j) * epsilon``
    and has id ``j * cols + i``.  Times stored here are in units where the
    slowest robot has speed 1.
    """

    epsilon: float
    delta: float
    origin: Point
    angle: float
    cols: int
    rows: int
    i0: int
    j0: int
    source_vertex: int
    dest_vertex: int
    snapped_starts: tuple[int, ...]
    snap_wait: tuple[float, ...]
    release_time: float
    speed_scale: float
    speeds: tuple[float, ...]

    def cell(self, vertex: int) -> tuple[int, int]:
        return vertex % self.cols, vertex // self.cols

    def vertex_point(self, vertex: int) -> Point:
        i, j = self.cell(vertex)
        return self.local_to_world((self.i0 + i) * self.epsilon, (self.j0 + j) * self.epsilon)

    def local_to_world(self, x: float, y: float) -> Point:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return Point(self.origin.x + c * x - s * y, self.origin.y + s * x + c * y)


def _to_local(p: Point, origin: Point, angle: float) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p.x - origin.x, p.y - origin.y
    return c * dx + s * dy, -s * dx + c * dy


def build_grid(instance: Instance, eps_prime: float) -> GridModel:
    if not eps_prime > 0:
        raise ValueError("eps_prime must be positive")
    S, D = instance.source, instance.destination
    sd = distance(S, D)
    if S.close_to(D) or sd == 0:
        raise DegenerateInstance("source and destination coincide")
    n = len(instance.robots)
    u = min(r.speed for r in instance.robots)
    speeds = tuple(r.speed / u for r in instance.robots)
    eps_norm = eps_prime * u
    eps = sd / math.ceil(n * sd / eps_norm)
    angle = math.atan2(D.y - S.y, D.x - S.x)
    local = [_to_local(r.start, S, angle) for r in instance.robots]
    xs = [0.0, sd] + [p[0] for p in local]
    ys = [0.0, 0.0] + [p[1] for p in local]
    i_lo, i_hi = math.floor(min(xs) / eps), math.ceil(max(xs) / eps)
    j_lo, j_hi = math.floor(min(ys) / eps), math.ceil(max(ys) / eps)
    span = max(i_hi - i_lo, j_hi - j_lo)
    if span > MAX_GRID_RATIO:
        extent = max(max(xs) - min(xs), max(ys) - min(ys))
        min_eps = 1.01 * n * (extent + 2 * eps) / MAX_GRID_RATIO / u
        raise GridTooLarge(f"grid would need {span} cells per side", min_eps)
    cols, rows = i_hi - i_lo + 1, j_hi - j_lo + 1
    snapped, waits = [], []
    for (x, y), s in zip(local, speeds):
        # nearest lattice point; exact ties go to the smaller coordinate
        i = math.ceil(x / eps - 0.5)
        j = math.ceil(y / eps - 0.5)
        snapped.append((j - j_lo) * cols + (i - i_lo))
        waits.append(math.hypot(x - i * eps, y - j * eps) / s)
    d_index = round(sd / eps)
    return GridModel(
        epsilon=eps,
        delta=span * eps,
        origin=S,
        angle=angle,
        cols=cols,
        rows=rows,
        i0=i_lo,
        j0=j_lo,
        source_vertex=(0 - j_lo) * cols + (0 - i_lo),
        dest_vertex=(0 - j_lo) * cols + (d_index - i_lo),
        snapped_starts=tuple(snapped),
        snap_wait=tuple(waits),
        release_time=max(waits),
        speed_scale=u,
        speeds=speeds,
    )


@dataclass
class GraphDeliveryProblem:
    n_vertices: int
    edges: list[tuple[int, int, float]]
    agents: list[tuple[int, float]]
    source: int
    dest: int
    release_time: Optional[list[float]] = None

    def __post_init__(self):
        if self.release_time is None:
            self.release_time = [0.0] * len(self.agents)
        for _, _, w in self.edges:
            if not w > 0:
                raise ValueError("edge weights must be positive")
        for _, s in self.agents:
            if not s > 0:
                raise ValueError("agent speeds must be positive")


class Leg(NamedTuple):
    agent: int
    pickup: int
    handover: int
    pickup_time: float
    handover_time: float
    path: tuple[int, ...]


class GraphDelivery(NamedTuple):
    time: float
    plan: list[Leg]


def _adjacency(problem: GraphDeliveryProblem):
    adj: list[list[tuple[int, float]]] = [[] for _ in range(problem.n_vertices)]
    for u, w, c in problem.edges:
        adj[u].append((w, float(c)))
        adj[w].append((u, float(c)))
    return adj


def _dijkstra(adj, start: int) -> list[float]:
    dist = [math.inf] * len(adj)
    dist[start] = 0.0
    heap = [(0.0, start)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for w, c in adj[u]:
            nd = d + c
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _shortest_path(adj, a: int, b: int) -> tuple[int, ...]:
    dist = _dijkstra(adj, a)
    path = [b]
    while path[-1] != a:
        u = path[-1]
        path.append(min((w for w, c in adj[u] if dist[w] + c == dist[u]), key=lambda w: (dist[w], w)))
    return tuple(reversed(path))


def solve_graph_delivery(problem: GraphDeliveryProblem) -> GraphDelivery:
    """Earliest delivery on a weighted graph with relays.

    Dijkstra over (vertex, holder) states: the holder either carries the
    message along an edge or hands it to another agent at the current
    vertex, which happens once both are there.
    """
    adj = _adjacency(problem)
    k = len(problem.agents)
    release = problem.release_time
    reach = []
    for i, (start, speed) in enumerate(problem.agents):
        d = _dijkstra(adj, start)
        reach.append([release[i] + x / speed for x in d])
    S, D = problem.source, problem.dest
    if all(math.isinf(reach[i][S]) for i in range(k)):
        raise Unreachable("no agent can reach the source")
    best = [[math.inf] * k for _ in range(problem.n_vertices)]
    pred: dict[tuple[int, int], Optional[tuple[int, int]]] = {}
    heap = []
    for i in range(k):
        if reach[i][S] < math.inf:
            best[S][i] = reach[i][S]
            pred[(S, i)] = None
            heap.append((reach[i][S], S, i))
    heapq.heapify(heap)
    done = set()
    final = None
    while heap:
        t, u, i = heapq.heappop(heap)
        if (u, i) in done:
            continue
        done.add((u, i))
        if u == D:
            final = (t, u, i)
            break
        speed = problem.agents[i][1]
        for w, c in adj[u]:
            nt = t + c / speed
            if nt < best[w][i]:
                best[w][i] = nt
                pred[(w, i)] = (u, i)
                heapq.heappush(heap, (nt, w, i))
        for j in range(k):
            if j != i:
                nt = max(t, reach[j][u])
                if nt < best[u][j]:
                    best[u][j] = nt
                    pred[(u, j)] = (u, i)
                    heapq.heappush(heap, (nt, u, j))
    if final is None:
        raise Unreachable("destination not reachable from the source")
    # walk predecessors back to the pickup
    states = [(final[1], final[2])]
    while pred[states[-1]] is not None:
        states.append(pred[states[-1]])
    states.reverse()
    legs = []
    run = [states[0]]
    for st in states[1:] + [None]:
        if st is not None and st[1] == run[-1][1]:
            run.append(st)
            continue
        agent = run[0][1]
        verts = tuple(v for v, _ in run)
        legs.append(Leg(agent, verts[0], verts[-1], best[verts[0]][agent], best[verts[-1]][agent], verts))
        run = [st]
    return GraphDelivery(final[0], legs)


def _l1_spread(f: np.ndarray, cost: float) -> np.ndarray:
    """min over cells u of f[u] + cost * L1(u, w), for every cell w."""
    out = f
    for axis in (1, 0):
        n = out.shape[axis]
        shape = [1, 1]
        shape[axis] = n
        ramp = (np.arange(n, dtype=float) * cost).reshape(shape)
        fwd = np.minimum.accumulate(out - ramp, axis=axis) + ramp
        flipped = np.flip(out, axis=axis)
        bwd = np.flip(np.minimum.accumulate(flipped - ramp, axis=axis) + ramp, axis=axis)
        out = np.minimum(fwd, bwd)
    return out


@dataclass
class GridDelivery:
    time: float
    legs: list[Leg]


def solve_grid_delivery(grid: GridModel) -> GridDelivery:
    """Exact relay on the full grid graph.

    Shortest paths on a full grid are L1 distances, so each agent's reach
    and carry times are separable distance transforms.  Agents are swept in
    increasing speed order: handing the message to a slower agent never
    helps, so one pass is enough.
    """
    eps = grid.epsilon
    rows, cols = grid.rows, grid.cols
    J, I = np.mgrid[0:rows, 0:cols]
    si, sj = grid.cell(grid.source_vertex)
    di, dj = grid.cell(grid.dest_vertex)
    k = len(grid.speeds)
    reach = []
    for v, s in zip(grid.snapped_starts, grid.speeds):
        ci, cj = grid.cell(v)
        reach.append(grid.release_time + eps * (np.abs(I - ci) + np.abs(J - cj)) / s)
    order = sorted(range(k), key=lambda i: (grid.speeds[i], i))
    source_time = min(float(r[sj, si]) for r in reach)
    base = np.full((rows, cols), np.inf)
    base[sj, si] = source_time
    held = base.copy()
    carried = {}
    for i in order:
        seed = np.maximum(held, reach[i])
        carried[i] = _l1_spread(seed, eps / grid.speeds[i])
        held = np.minimum(held, carried[i])

    # backtrack from the destination
    best_i = min(order, key=lambda i: (float(carried[i][dj, di]), order.index(i)))
    total = float(carried[best_i][dj, di])
    legs = []
    w = (di, dj)
    i = best_i
    while True:
        pos = order.index(i)
        before = base.copy()
        for j in order[:pos]:
            before = np.minimum(before, carried[j])
        seed = np.maximum(before, reach[i])
        cand = seed + eps * (np.abs(I - w[0]) + np.abs(J - w[1])) / grid.speeds[i]
        flat = int(np.argmin(cand))
        uj, ui = divmod(flat, cols)
        legs.append(Leg(i, uj * cols + ui, w[1] * cols + w[0], float(seed[uj, ui]), float(cand.flat[flat]), ()))
        if (ui, uj) == (si, sj) and before[uj, ui] == source_time:
            break
        prev = [j for j in order[:pos] if carried[j][uj, ui] == before[uj, ui]]
        if not prev:
            break
        i = prev[0]
        w = (ui, uj)
    legs.reverse()
    return GridDelivery(total, legs)


def _l_path(grid: GridModel, a: int, b: int) -> list[Point]:
    ai, aj = grid.cell(a)
    bi, bj = grid.cell(b)
    pts = [grid.vertex_point(a)]
    if ai != bi and aj != bj:
        pts.append(grid.vertex_point(aj * grid.cols + bi))
    if b != a:
        pts.append(grid.vertex_point(b))
    return pts


def _walk(path: list, pts: list[Point], t: float, speed: float) -> float:
    for p in pts[1:]:
        t += distance(path[-1][1], p) / speed
        path.append((t, p))
    return t


@dataclass
class MultiSolution:
    plan: DeliveryPlan
    grid: GridModel
    grid_time: float


def solve_multi_detailed(instance: Instance, eps_prime: float) -> MultiSolution:
    grid = build_grid(instance, eps_prime)
    result = solve_grid_delivery(grid)
    u = grid.speed_scale
    R = grid.release_time
    n = len(instance.robots)
    trajectories = []
    for r, robot in enumerate(instance.robots):
        snap = grid.vertex_point(grid.snapped_starts[r])
        path = [(0.0, robot.start)]
        if not snap.close_to(robot.start):
            path.append((grid.snap_wait[r], snap))
        trajectories.append(path)
    # replay the relay in normalised time
    events = []
    msg_time = 0.0
    for k, leg in enumerate(result.legs):
        s = grid.speeds[leg.agent]
        path = trajectories[leg.agent]
        path.append((R, path[-1][1]))
        arrive = _walk(path, _l_path(grid, grid.snapped_starts[leg.agent], leg.pickup), R, s)
        pick = max(arrive, msg_time)
        if pick > path[-1][0]:
            path.append((pick, path[-1][1]))
        if k == 0:
            events.append(PlanEvent(EventKind.PICKUP, pick, instance.source, None, leg.agent))
        else:
            prev = result.legs[k - 1].agent
            events.append(PlanEvent(EventKind.HANDOVER, pick, grid.vertex_point(leg.pickup), prev, leg.agent))
        msg_time = _walk(path, _l_path(grid, leg.pickup, leg.handover), pick, s)
    events.append(PlanEvent(EventKind.DELIVER, msg_time, instance.destination, result.legs[-1].agent, None))
    # express everything in real time
    trajectories = [[(t / u, p) for t, p in path] for path in trajectories]
    events = [PlanEvent(e.kind, e.time / u, e.location, e.from_robot, e.to_robot) for e in events]
    # vertex points of S and D are exact up to rounding; pin them
    plan = DeliveryPlan(msg_time / u, events, trajectories)
    assert len(plan.trajectories) == n
    return MultiSolution(plan, grid, (msg_time - R) / u)


def solve_multi(instance: Instance, eps_prime: float) -> DeliveryPlan:
    """Grid relay plan with time at most sqrt(2) times optimal plus eps_prime."""
    return solve_multi_detailed(instance, eps_prime).plan


def rectilinear_emulation(plan: DeliveryPlan, instance: Instance, angle: Optional[float] = None) -> float:
    """Delivery time when every straight leg of ``plan`` is replaced by its
    axis-aligned L-path (axes along SD unless ``angle`` is given).

    The relay structure of the plan is kept; robots move at full speed and
    wait for each other only at handovers.
    """
    S, D = instance.source, instance.destination
    if angle is None:
        angle = math.atan2(D.y - S.y, D.x - S.x)
    c, s = math.cos(angle), math.sin(angle)

    def rect(a: Point, b: Point) -> float:
        dx, dy = b.x - a.x, b.y - a.y
        return abs(c * dx + s * dy) + abs(-s * dx + c * dy)

    def route_length(robot: int, t_from: float, t_to: float) -> float:
        pts = [p for t, p in plan.trajectories[robot] if t_from - 1e-12 <= t <= t_to + 1e-12]
        start = plan.position(robot, t_from)
        end = plan.position(robot, t_to)
        pts = [start] + pts + [end]
        return sum(rect(a, b) for a, b in zip(pts, pts[1:]))

    msg = 0.0
    prev_time = 0.0
    holder = None
    for e in plan.events:
        if e.kind == EventKind.PICKUP:
            r = e.to_robot
            msg = route_length(r, 0.0, e.time) / instance.robots[r].speed
        elif e.kind == EventKind.HANDOVER:
            carry = msg + route_length(holder, prev_time, e.time) / instance.robots[holder].speed
            r = e.to_robot
            recv = route_length(r, 0.0, e.time) / instance.robots[r].speed
            msg = max(carry, recv)
        else:
            msg = msg + route_length(holder, prev_time, e.time) / instance.robots[holder].speed
            return msg
        holder = e.to_robot
        prev_time = e.time
    return msg
