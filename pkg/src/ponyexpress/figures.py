"""Matplotlib renderings written next to the command-line reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Circle as CirclePatch

from .model import DeliveryPlan, EventKind, Instance
from .svg import plan_circle


def plot_plan(instance: Instance, plan: DeliveryPlan, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    circle = plan_circle(instance, plan)
    if circle is not None:
        ax.add_patch(CirclePatch((circle.center.x, circle.center.y), circle.radius, fill=False, ls="--", color="0.5"))
    for i, traj in enumerate(plan.trajectories):
        xs = [p.x for _, p in traj]
        ys = [p.y for _, p in traj]
        ax.plot(xs, ys, "-", lw=1.5, label=f"robot {i} (speed {instance.robots[i].speed:g})")
        ax.plot(xs[:1], ys[:1], "o", color=ax.lines[-1].get_color())
    for e in plan.events:
        if e.kind == EventKind.HANDOVER:
            ax.plot(e.location.x, e.location.y, "kD", ms=6)
    for label, p in (("S", instance.source), ("D", instance.destination)):
        ax.plot(p.x, p.y, "ks", mfc="white")
        ax.annotate(label, (p.x, p.y), textcoords="offset points", xytext=(5, 5))
    ax.set_aspect("equal")
    ax.set_title(f"delivery time {plan.total_time:.6g}")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def plot_landscape(vs, alphas, values, argmax, path: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    shown = np.where(np.isfinite(values), values, np.nan)
    mesh = ax.pcolormesh(vs, alphas, shown.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="ratio")
    ax.plot(argmax[0], argmax[1], "r+", ms=12, mew=2)
    ax.set_xlabel("speed ratio v")
    ax.set_ylabel("alpha (rad)")
    ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
