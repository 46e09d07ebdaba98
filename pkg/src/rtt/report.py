"""Solve reports: delimited files plus rendered figures.

Reports land in a directory: ``allocation.csv`` and ``schedule.csv`` hold
the numbers exactly (rationals as p/q), ``schedule.png`` draws the jobs on
a timeline, and series-parallel solves add the budget-makespan tradeoff
curve as ``tradeoff.csv``/``tradeoff.png``.
"""

from __future__ import annotations

import csv
import os
from fractions import Fraction

from .model import Instance, Schedule
from .rat import format_rational


def _job_kind(arc) -> str:
    if arc.job is None:
        return "dummy"
    return type(arc.job).__name__


def write_solve_report(directory, instance: Instance, flow, schedule: Schedule):
    os.makedirs(directory, exist_ok=True)
    rows = []
    for e, arc in enumerate(instance.arcs):
        amount = flow.amount(e) if hasattr(flow, "amount") else flow.get(e, 0)
        rows.append({
            "arc": e,
            "tail": arc.tail,
            "head": arc.head,
            "kind": _job_kind(arc),
            "flow": format_rational(Fraction(amount)),
            "duration": format_rational(arc.duration(amount)),
        })
    with open(os.path.join(directory, "allocation.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["arc", "tail", "head", "kind", "flow", "duration"])
        writer.writeheader()
        writer.writerows(rows)
    with open(os.path.join(directory, "schedule.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "event_time"])
        for v in instance.topological_order():
            writer.writerow([v, format_rational(schedule.event_time[v])])
    _draw_schedule(directory, instance, flow, schedule)


def _draw_schedule(directory, instance, flow, schedule):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    jobs = []
    for e, arc in enumerate(instance.arcs):
        if arc.job is None:
            continue
        amount = flow.amount(e) if hasattr(flow, "amount") else flow.get(e, 0)
        start = float(schedule.event_time[arc.tail])
        length = float(arc.duration(amount))
        jobs.append((f"{arc.tail}->{arc.head}", start, length))
    fig, ax = plt.subplots(figsize=(8, max(2, 0.3 * len(jobs))))
    for i, (label, start, length) in enumerate(jobs):
        ax.barh(i, max(length, 0.02), left=start, height=0.6, color="#4878a8")
    ax.set_yticks(range(len(jobs)))
    ax.set_yticklabels([j[0] for j in jobs], fontsize=7)
    ax.invert_yaxis()
    ax.axvline(float(schedule.makespan), color="#a84848", linestyle="--", linewidth=1)
    ax.set_xlabel("time")
    ax.set_title(f"makespan {schedule.makespan}")
    fig.tight_layout()
    fig.savefig(os.path.join(directory, "schedule.png"), dpi=120)
    plt.close(fig)


def write_tradeoff_report(directory, budgets, makespans):
    """Budget-to-makespan curve (series-parallel DP row)."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "tradeoff.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["budget", "makespan"])
        for b, mk in zip(budgets, makespans):
            writer.writerow([b, format_rational(mk)])
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(list(budgets), [float(m) for m in makespans], where="post", color="#4878a8")
    ax.set_xlabel("resource budget")
    ax.set_ylabel("optimal makespan")
    ax.set_title("resource-time tradeoff")
    fig.tight_layout()
    fig.savefig(os.path.join(directory, "tradeoff.png"), dpi=120)
    plt.close(fig)
