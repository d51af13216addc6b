"""Brute-force reference solvers used to cross-check the fast solvers."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .geometry import Circle
from .model import Point


@dataclass(frozen=True)
class OracleConfig:
    grid_resolution: int = 1500
    refine_iterations: int = 6
    bounding_inflation: float = 0.5
    refine_points: int = 101
    refine_window: float = 5.0
    candidates: int = 8

    def __post_init__(self):
        if self.grid_resolution < 100:
            raise ValueError("grid_resolution must be at least 100")
        if self.bounding_inflation < 0.25:
            raise ValueError("bounding_inflation must be at least 0.25")


def _handover_objective(X, Y, L, K, S, D, v):
    a = math.hypot(L.x - S.x, L.y - S.y)
    slow = a + np.hypot(X - S.x, Y - S.y)
    fast = np.hypot(X - K.x, Y - K.y) / v
    return np.maximum(slow, fast) + np.hypot(X - D.x, Y - D.y) / v


def _local_minima(F: np.ndarray, count: int) -> list[tuple[int, int]]:
    pad = np.pad(F, 1, constant_values=np.inf)
    is_min = np.ones_like(F, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= F <= pad[1 + di : 1 + di + F.shape[0], 1 + dj : 1 + dj + F.shape[1]]
    idx = np.flatnonzero(is_min)
    idx = idx[np.argsort(F.ravel()[idx], kind="stable")][:count]
    return [tuple(int(c) for c in np.unravel_index(i, F.shape)) for i in idx]


def oracle_two_robot(L: Point, K: Point, S: Point, D: Point, v: float, cfg: OracleConfig = OracleConfig()) -> float:
    """Grid search over single-handover plans plus both solo plans.

    The slow robot (speed 1) walks L -> S -> M, the fast one (speed v) walks
    K -> M, whoever is early waits, then the fast one carries M -> D.
    """
    a = math.hypot(L.x - S.x, L.y - S.y)
    sd = math.hypot(S.x - D.x, S.y - D.y)
    best = min(a + sd, (math.hypot(K.x - S.x, K.y - S.y) + sd) / v)
    xs = [p.x for p in (L, K, S, D)]
    ys = [p.y for p in (L, K, S, D)]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = cfg.bounding_inflation * span
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    n = cfg.grid_resolution
    gx = np.linspace(x0, x1, n + 1)
    gy = np.linspace(y0, y1, n + 1)
    F = np.empty((n + 1, n + 1))
    chunk = 256
    for r in range(0, n + 1, chunk):
        X, Y = np.meshgrid(gx, gy[r : r + chunk])
        F[r : r + chunk] = _handover_objective(X, Y, L, K, S, D, v)
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    m = cfg.refine_points
    for i, j in _local_minima(F, cfg.candidates):
        cx, cy, value = gx[j], gy[i], F[i, j]
        wx, wy = hx, hy
        for _ in range(cfg.refine_iterations):
            hw = cfg.refine_window
            X, Y = np.meshgrid(np.linspace(cx - hw * wx, cx + hw * wx, m), np.linspace(cy - hw * wy, cy + hw * wy, m))
            G = _handover_objective(X, Y, L, K, S, D, v)
            k = int(np.argmin(G))
            if G.flat[k] <= value:
                cx, cy, value = X.flat[k], Y.flat[k], G.flat[k]
            wx, wy = wx / 10, wy / 10
        best = min(best, float(value))
    return best


def oracle_circle_min(circle: Circle, K: Point, D: Point, samples: int = 100_000, refine_iterations: int = 6):
    """Minimum of |KM| + |MD| over a discretised circle, locally refined.

    Returns (angle, point, value)."""
    def f(theta):
        mx = circle.center.x + circle.radius * np.cos(theta)
        my = circle.center.y + circle.radius * np.sin(theta)
        return np.hypot(mx - K.x, my - K.y) + np.hypot(mx - D.x, my - D.y)

    theta = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    vals = f(theta)
    k = int(np.argmin(vals))
    t, best = theta[k], vals[k]
    h = 2 * np.pi / samples
    for _ in range(refine_iterations):
        local = np.linspace(t - 2 * h, t + 2 * h, 41)
        lv = f(local)
        k = int(np.argmin(lv))
        if lv[k] <= best:
            t, best = local[k], lv[k]
        h /= 10
    return float(t), circle.point_at(float(t)), float(best)


def _all_pairs(n_vertices: int, edges) -> list[list[float]]:
    d = [[math.inf] * n_vertices for _ in range(n_vertices)]
    for i in range(n_vertices):
        d[i][i] = 0.0
    for u, w, c in edges:
        if c < d[u][w]:
            d[u][w] = d[w][u] = float(c)
    for k in range(n_vertices):
        for i in range(n_vertices):
            for j in range(n_vertices):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def oracle_graph_delivery(problem) -> float:
    """Exhaustive relay enumeration on a small graph.

    Tries every ordered sequence of distinct agents and every choice of
    handover vertices; each agent walks a shortest path to its pickup vertex,
    waits if early, then carries along a shortest path.
    """
    n = problem.n_vertices
    k = len(problem.agents)
    if n > 6 or k > 3:
        raise TooLarge("oracle limited to 6 vertices and 3 agents")
    d = _all_pairs(n, problem.edges)
    release = list(problem.release_time) if problem.release_time is not None else [0.0] * k
    best = math.inf
    for size in range(1, k + 1):
        for seq in itertools.permutations(range(k), size):
            for stops in itertools.product(range(n), repeat=size - 1):
                t = 0.0
                at = problem.source
                for pos, agent in enumerate(seq):
                    start, speed = problem.agents[agent]
                    arrive = release[agent] + d[start][at] / speed
                    t = max(t, arrive)
                    nxt = stops[pos] if pos < size - 1 else problem.dest
                    t += d[at][nxt] / speed
                    at = nxt
                best = min(best, t)
    return best


def oracle_line_delivery(positions, speeds, source: float, dest: float, resolution: int = 2001, refine_iterations: int = 6) -> float:
    """Optimal relay on a line for at most three robots, by grid search over
    the handover positions with local zoom refinement."""
    k = len(positions)
    if k > 3:
        raise TooLarge("line oracle limited to 3 robots")
    lo = min(list(positions) + [source, dest])
    hi = max(list(positions) + [source, dest])
    best = math.inf

    def chain_time(seq, handovers):
        t = np.zeros(handovers[0].shape) if handovers else np.zeros(())
        at = np.full(t.shape, float(source))
        for pos, agent in enumerate(seq):
            p, s = positions[agent], speeds[agent]
            t = np.maximum(t, np.abs(p - at) / s)
            nxt = handovers[pos] if pos < len(seq) - 1 else np.full(t.shape, float(dest))
            t = t + np.abs(nxt - at) / s
            at = nxt
        return t

    for size in range(1, k + 1):
        for seq in itertools.permutations(range(k), size):
            m = size - 1
            if m == 0:
                best = min(best, float(chain_time(seq, [])))
                continue
            res = resolution if m == 1 else int(math.sqrt(resolution) * 20)
            axes = [np.linspace(lo, hi, res)] * m
            grids = np.meshgrid(*axes, indexing="ij")
            T = chain_time(seq, grids)
            idx = np.unravel_index(int(np.argmin(T)), T.shape)
            centre = [float(g[idx]) for g in grids]
            value = float(T[idx])
            h = (hi - lo) / (res - 1)
            for _ in range(refine_iterations):
                axes = [np.linspace(c - 2 * h, c + 2 * h, 41) for c in centre]
                grids = np.meshgrid(*axes, indexing="ij")
                T = chain_time(seq, grids)
                idx = np.unravel_index(int(np.argmin(T)), T.shape)
                if T[idx] <= value:
                    value = float(T[idx])
                    centre = [float(g[idx]) for g in grids]
                h /= 10
            best = min(best, value)
    return best
