"""Planar primitives: distances, circles, rigid motions and the
tangency point that minimises |KM| + |MD| over a circle."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import CoincidentPoints, DegenerateSpeed, NoRoot
from .model import Point

TOL_SPEED = 1e-9
Angle = float

_SCAN = 256
_FINE_SCAN = 4096


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"invalid radius {self.radius}")

    def point_at(self, theta: float) -> Point:
        return Point(self.center.x + self.radius * math.cos(theta), self.center.y + self.radius * math.sin(theta))


def distance(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def normalize_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    t = math.atan2(math.sin(theta), math.cos(theta))
    return math.pi if t == -math.pi else t


def signed_angle(u: Point, v: Point) -> float:
    """Angle turning u onto v, in (-pi, pi]."""
    t = math.atan2(u.cross(v), u.dot(v))
    return math.pi if t == -math.pi else t


def unsigned_angle(u: Point, v: Point) -> float:
    return abs(signed_angle(u, v))


def rotate_about(p: Point, center: Point, theta: Angle) -> Point:
    if theta == 0:
        return p
    c, s = math.cos(theta), math.sin(theta)
    dx, dy = p.x - center.x, p.y - center.y
    return Point(center.x + c * dx - s * dy, center.y + s * dx + c * dy)


def reflect_across_line(p: Point, a: Point, b: Point) -> Point:
    """Mirror image of p in the line through a and b."""
    d = b - a
    n = d.norm()
    if n == 0:
        raise CoincidentPoints("line through identical points")
    ux, uy = d.x / n, d.y / n
    wx, wy = p.x - a.x, p.y - a.y
    along = wx * ux + wy * uy
    fx, fy = a.x + along * ux, a.y + along * uy
    return Point(2 * fx - p.x, 2 * fy - p.y)


def apollonius_circle(K: Point, S: Point, v: float) -> Circle:
    """Locus of points P with |PK| = v |PS|, for v > 1."""
    if not v > 1 + TOL_SPEED:
        raise DegenerateSpeed(f"speed ratio {v} too close to 1")
    if K.close_to(S):
        raise CoincidentPoints("K and S coincide")
    k = v * v - 1
    center = Point(S.x + (S.x - K.x) / k, S.y + (S.y - K.y) / k)
    return Circle(center, v * distance(S, K) / k)


def _frame(circle: Circle, K: Point, D: Point):
    """Coordinates of K and D in a frame centred at the circle centre with K
    on the positive x axis.  Returns (|CK|, dx, dy, cos, sin)."""
    ex, ey = K.x - circle.center.x, K.y - circle.center.y
    ck = math.hypot(ex, ey)
    c, s = ex / ck, ey / ck
    wx, wy = D.x - circle.center.x, D.y - circle.center.y
    return ck, c * wx + s * wy, -s * wx + c * wy, c, s


def _path_length(theta, ck, r, dx, dy):
    mx, my = r * np.cos(theta), r * np.sin(theta)
    return np.hypot(ck - mx, my) + np.hypot(dx - mx, dy - my)


def _path_slope(theta: float, ck: float, r: float, dx: float, dy: float) -> float:
    # d/dtheta of |K - M| + |M - D|; its zero is where CM bisects angle KMD
    c, s = math.cos(theta), math.sin(theta)
    mx, my = r * c, r * s
    tx, ty = -r * s, r * c
    a = math.hypot(mx - ck, my)
    b = math.hypot(mx - dx, my - dy)
    out = 0.0
    if a > 0:
        out += (tx * (mx - ck) + ty * my) / a
    if b > 0:
        out += (tx * (mx - dx) + ty * (my - dy)) / b
    return out


def tangency_angle(circle: Circle, K: Point, D: Point) -> float:
    """Polar angle (about the centre, measured from the ray towards K and
    signed towards D) of the circle point minimising |KM| + |MD|."""
    ck, dx, dy, _, _ = _frame(circle, K, D)
    sign = 1.0 if dy >= 0 else -1.0
    dy = abs(dy)
    r = circle.radius
    alpha_d = math.atan2(dy, dx)
    if alpha_d == 0.0:
        return 0.0
    for n in (_SCAN, _FINE_SCAN):
        grid = np.linspace(0.0, alpha_d, n + 1)
        vals = _path_length(grid, ck, r, dx, dy)
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n)]
        flo = _path_slope(lo, ck, r, dx, dy)
        fhi = _path_slope(hi, ck, r, dx, dy)
        if flo >= 0 and lo == 0.0:
            return 0.0
        if fhi <= 0 and hi == alpha_d:
            return sign * alpha_d
        if flo == 0:
            return sign * lo
        if fhi == 0:
            return sign * hi
        if flo < 0 < fhi:
            root = brentq(_path_slope, lo, hi, args=(ck, r, dx, dy), xtol=1e-13, rtol=4 * np.finfo(float).eps)
            return sign * root
    # a residual with no sign change is only acceptable when the objective is
    # flat to rounding over the whole arc (D next to K, or a vanishing arc)
    if vals.max() - vals.min() <= 1e-12 * max(1.0, vals.min()):
        return sign * float(grid[i])
    raise NoRoot("no sign change of the bisection residual")


def bisector_meeting_point(circle: Circle, K: Point, D: Point, v: float | None = None) -> Point:
    """Point M on ``circle`` where the radius CM bisects the angle DMK.

    This is the minimiser of |KM| + |MD| over the circle arc facing D.
    ``v`` is accepted for interface symmetry; the circle already encodes it.
    """
    alpha = tangency_angle(circle, K, D)
    ck, _, _, c, s = _frame(circle, K, D)
    lx, ly = circle.radius * math.cos(alpha), circle.radius * math.sin(alpha)
    return Point(circle.center.x + c * lx - s * ly, circle.center.y + s * lx + c * ly)


def min_path_on_circles(ck, r, dx, dy, n_scan: int = 64, iters: int = 60):
    """Vectorised min over each circle of |KM| + |MD|.

    All arguments are arrays in per-row local frames (centre at origin, K at
    (ck, 0)).  Returns (angle, value) arrays.
    """
    ck, r, dx, dy = (np.asarray(a, dtype=float) for a in (ck, r, dx, dy))
    dy = np.abs(dy)
    alpha_d = np.arctan2(dy, dx)
    frac = np.linspace(0.0, 1.0, n_scan + 1)
    grid = alpha_d[:, None] * frac[None, :]
    vals = _path_length(grid, ck[:, None], r[:, None], dx[:, None], dy[:, None])
    i = np.argmin(vals, axis=1)
    step = alpha_d / n_scan
    lo = np.maximum(i - 1, 0) * step
    hi = np.minimum(i + 1, n_scan) * step
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        c, s = np.cos(mid), np.sin(mid)
        mx, my = r * c, r * s
        tx, ty = -my, mx
        a = np.hypot(mx - ck, my)
        b = np.hypot(mx - dx, my - dy)
        g = (tx * (mx - ck) + ty * my) / np.where(a > 0, a, 1.0) + (tx * (mx - dx) + ty * (my - dy)) / np.where(
            b > 0, b, 1.0
        )
        neg = g < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    theta = 0.5 * (lo + hi)
    return theta, _path_length(theta, ck, r, dx, dy)
