"""Standalone SVG drawings of delivery plans."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .errors import PonyError
from .geometry import Circle, apollonius_circle
from .model import DeliveryPlan, EventKind, Instance, Point

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def plan_circle(instance: Instance, plan: DeliveryPlan) -> Optional[Circle]:
    """Apollonius circle of the two-robot relay: where the fast robot, seen
    from its position when the slow one reaches S, meets the slow one."""
    if len(instance.robots) != 2:
        return None
    speeds = [r.speed for r in instance.robots]
    slow = 0 if speeds[0] <= speeds[1] else 1
    fast = 1 - slow
    v = speeds[fast] / speeds[slow]
    t = (instance.robots[slow].start - instance.source).norm() / speeds[slow]
    Q = plan.position(fast, t)
    try:
        return apollonius_circle(Q, instance.source, v)
    except PonyError:
        return None


def render_svg(instance: Instance, plan: DeliveryPlan) -> str:
    if len(plan.trajectories) != len(instance.robots):
        raise ValueError("plan and instance disagree on the number of robots")
    circle = plan_circle(instance, plan)
    pts = [instance.source, instance.destination] + [p for path in plan.trajectories for _, p in path]
    pts += [r.start for r in instance.robots]
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    if circle is not None:
        xs += [circle.center.x - circle.radius, circle.center.x + circle.radius]
        ys += [circle.center.y - circle.radius, circle.center.y + circle.radius]
    w = max(max(xs) - min(xs), 1e-9)
    h = max(max(ys) - min(ys), 1e-9)
    span = max(w, h)
    mx, my = 0.1 * w + 0.02 * span, 0.1 * h + 0.02 * span
    x0, y0 = min(xs) - mx, -(max(ys) + my)
    vw, vh = w + 2 * mx, h + 2 * my
    unit = span / 100
    stroke = _fmt(0.4 * unit)

    def xy(p: Point) -> tuple[str, str]:
        return _fmt(p.x), _fmt(-p.y)

    root = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": " ".join(_fmt(c) for c in (x0, y0, vw, vh)),
            "width": "800",
            "height": _fmt(800 * vh / vw),
        },
    )
    if circle is not None:
        cx, cy = xy(circle.center)
        ET.SubElement(
            root,
            "circle",
            {"class": "apollonius", "cx": cx, "cy": cy, "r": _fmt(circle.radius), "fill": "none", "stroke": "#888888", "stroke-dasharray": _fmt(2 * unit), "stroke-width": stroke},
        )
    for i, path in enumerate(plan.trajectories):
        coords = []
        for _, p in path:
            c = " ".join(xy(p))
            if not coords or coords[-1] != c:
                coords.append(c)
        if len(coords) > 1:
            ET.SubElement(
                root,
                "polyline",
                {"class": "trajectory", "data-robot": str(i), "points": " ".join(c.replace(" ", ",") for c in coords), "fill": "none", "stroke": PALETTE[i % len(PALETTE)], "stroke-width": stroke},
            )
    for e in plan.events:
        if e.kind == EventKind.HANDOVER:
            x, y = e.location.x, -e.location.y
            d = 1.5 * unit
            diamond = f"{_fmt(x)},{_fmt(y - d)} {_fmt(x + d)},{_fmt(y)} {_fmt(x)},{_fmt(y + d)} {_fmt(x - d)},{_fmt(y)}"
            ET.SubElement(root, "polygon", {"class": "handover", "points": diamond, "fill": "#000000"})
    for i, r in enumerate(instance.robots):
        cx, cy = xy(r.start)
        ET.SubElement(root, "circle", {"class": "robot", "cx": cx, "cy": cy, "r": _fmt(1.2 * unit), "fill": PALETTE[i % len(PALETTE)]})
    for label, p in (("S", instance.source), ("D", instance.destination)):
        x, y = p.x, -p.y
        ET.SubElement(
            root,
            "rect",
            {"class": "marker", "x": _fmt(x - unit), "y": _fmt(y - unit), "width": _fmt(2 * unit), "height": _fmt(2 * unit), "fill": "#ffffff", "stroke": "#000000", "stroke-width": stroke},
        )
        text = ET.SubElement(root, "text", {"x": _fmt(x + 1.5 * unit), "y": _fmt(y - 1.5 * unit), "font-size": _fmt(5 * unit)})
        text.text = label
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"
