"""Instance transformations: activity-on-arc and the two-tuple expansion.

``activity_on_arc`` moves node jobs onto dedicated arcs.  ``two_tuple_expand``
rewrites every multi-tuple job as parallel two-edge chains, each offering a
single "pay this much resource, save this much time" option; this is the
form the linear relaxation works on.  ``map_back`` inverts the expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InvalidInstanceError
from .model import (
    ARC_JOBS,
    NODE_JOBS,
    TWO_TUPLE_ARC_JOBS,
    Arc,
    FlowAssignment,
    Instance,
    StepList,
)


@dataclass(frozen=True)
class ChainStep:
    """One parallel chain of an expanded job.

    Allocating `delta` units on arc `first` drops its duration from
    `zero_time` to 0, moving the job to the next breakpoint.  The last chain
    of a job has delta 0 and no closer improvement.  `bp_resource` is the
    cumulative resource of the breakpoint this chain starts from.
    """

    first: int
    closer: Optional[int]
    delta: int
    zero_time: Fraction
    bp_resource: int


@dataclass
class TransformTrace:
    """Bookkeeping to map solutions back through a transformation."""

    node_to_arc: dict = field(default_factory=dict)      # original node -> job arc index
    edge_to_arc: dict = field(default_factory=dict)      # original edge index -> dummy arc index
    job_to_chain: dict = field(default_factory=dict)     # original arc index -> [ChainStep]
    arc_map: dict = field(default_factory=dict)          # original dummy arc -> expanded arc
    num_expanded_arcs: int = 0


def activity_on_arc(instance: Instance) -> tuple[Instance, TransformTrace]:
    """Turn a NodeJobs instance into an equivalent ArcJobs instance.

    Node v becomes the arc (v:a, v:b) carrying v's duration function; each
    original edge (u, v) becomes a zero-duration dummy arc (u:b, v:a).
    """
    if instance.form != NODE_JOBS:
        raise InvalidInstanceError("activity_on_arc expects a NodeJobs instance")
    trace = TransformTrace()
    vertices = []
    arcs = []
    node_jobs = instance.node_jobs or {}
    for v in instance.vertices:
        vertices.append(f"{v}:a")
        vertices.append(f"{v}:b")
        trace.node_to_arc[v] = len(arcs)
        arcs.append(Arc(f"{v}:a", f"{v}:b", node_jobs.get(v)))
    for i, a in enumerate(instance.arcs):
        trace.edge_to_arc[i] = len(arcs)
        arcs.append(Arc(f"{a.tail}:b", f"{a.head}:a"))
    out = Instance(
        tuple(vertices), tuple(arcs),
        source=f"{instance.source}:a", sink=f"{instance.sink}:b",
        budget=instance.budget, target=instance.target, form=ARC_JOBS,
    )
    return out, trace


def materialize(job) -> StepList:
    """Breakpoint StepList of any duration function (identity on StepList)."""
    if isinstance(job, StepList):
        return job
    return StepList(job.breakpoints())


def two_tuple_expand(instance: Instance) -> tuple[Instance, TransformTrace]:
    """Expand every job arc into parallel chains with at most two tuples each.

    A job with tuples <r_1,t_1> ... <r_l,t_l> on arc (u, v) becomes l chains
    (u, u_i), (u_i, v).  For i < l the arc (u, u_i) can run in t_i for free
    or in 0 for r_{i+1} - r_i units; the last chain is the floor t_l that no
    resource removes.  Chain closers (u_i, v) are dummies.
    """
    if instance.form != ARC_JOBS:
        raise InvalidInstanceError("two_tuple_expand expects an ArcJobs instance")
    trace = TransformTrace()
    vertices = list(instance.vertices)
    arcs = []
    for e, a in enumerate(instance.arcs):
        if a.job is None:
            trace.arc_map[e] = len(arcs)
            arcs.append(a)
            continue
        pts = materialize(a.job).tuples
        if not pts:
            raise InvalidInstanceError(f"job on arc {e} has an empty tuple list")
        chains = []
        for i, bp in enumerate(pts):
            mid = f"_tt{e}_{i}"
            vertices.append(mid)
            last = i == len(pts) - 1
            if last:
                job = StepList([(0, bp.time)])
                delta = 0
            else:
                delta = pts[i + 1].resource - bp.resource
                job = StepList([(0, bp.time), (delta, Fraction(0))])
            first = len(arcs)
            arcs.append(Arc(a.tail, mid, job))
            closer = len(arcs)
            arcs.append(Arc(mid, a.head))
            chains.append(ChainStep(first, closer, delta, bp.time, bp.resource))
        trace.job_to_chain[e] = chains
    trace.num_expanded_arcs = len(arcs)
    out = Instance(
        tuple(vertices), tuple(arcs), instance.source, instance.sink,
        budget=instance.budget, target=instance.target, form=TWO_TUPLE_ARC_JOBS,
    )
    return out, trace


@dataclass(frozen=True)
class MapBackResult:
    resources: dict          # original job arc -> canonical integer-free resource
    durations: dict          # original job arc -> duration under that allocation
    flow: FlowAssignment     # flow projected onto the pre-expansion instance


def chain_resources(flow: FlowAssignment, chains) -> list:
    return [flow.amount(c.first) for c in chains]


def map_back(flow, trace: TransformTrace) -> MapBackResult:
    """Map a flow on the expanded instance back to per-job allocations.

    A chain's resource counts only up to its delta; amounts are summed over
    a job's chains and the canonical form zeroes any chain whose free-run
    time is already dominated by an earlier chain, which makes the kept
    chains a prefix and the total a valid breakpoint resource.
    """
    if isinstance(flow, dict):
        flow = FlowAssignment(flow)
    for k in flow.flow:
        if not isinstance(k, int) or not (0 <= k < trace.num_expanded_arcs):
            raise InvalidInstanceError(f"flow on arc {k!r} is not part of the expansion")
    resources = {}
    durations = {}
    projected = {}
    for e, chains in trace.job_to_chain.items():
        total = 0
        canonical = 0
        running_max = Fraction(0)
        first_free = True
        for c in chains:
            x = flow.amount(c.first)
            total += x
            if c.delta > 0 and x >= c.delta:
                dur = Fraction(0)
                used = c.delta
            else:
                dur = c.zero_time
                used = 0
            if not first_free and c.zero_time <= running_max:
                used = 0          # dominated: the canonical mapping drops it
                dur = c.zero_time
            canonical += used
            running_max = max(running_max, dur)
            first_free = False
        resources[e] = canonical
        durations[e] = running_max
        projected[e] = total
    for e, new_e in trace.arc_map.items():
        projected[e] = flow.amount(new_e)
    projected = {e: v for e, v in projected.items() if v}
    return MapBackResult(resources, durations, FlowAssignment(projected))
