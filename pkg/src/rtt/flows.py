"""Threshold rounding and integral minimum flow with lower bounds.

``alpha_round`` converts a fractional LP solution into per-arc resource
lower bounds (each two-tuple arc snaps to one of its two tuples).
``min_flow_lower_bounds`` then finds the cheapest integral flow meeting
those bounds: route each bound along some source-sink path, then cancel
surplus with a max-flow from sink to source on the residual network.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInstanceError, RttError
from .model import FlowAssignment, Instance, StepList


class Dinic:
    """Deterministic Dinic max-flow; adjacency follows edge insertion order."""

    def __init__(self, n: int):
        self.n = n
        self.adj = [[] for _ in range(n)]
        self.to = []
        self.cap = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        eid = len(self.to)
        self.adj[u].append(eid)
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(eid + 1)
        self.to.append(u)
        self.cap.append(0)
        return eid

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        queue = [s]
        for u in queue:
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, s, t, level, it):
        """One blocking-path augmentation, iterative to spare the stack."""
        path = []
        u = s
        while True:
            if u == t:
                pushed = min(self.cap[eid] for eid in path)
                for eid in path:
                    self.cap[eid] -= pushed
                    self.cap[eid ^ 1] += pushed
                return pushed
            advanced = False
            while it[u] < len(self.adj[u]):
                eid = self.adj[u][it[u]]
                v = self.to[eid]
                if self.cap[eid] > 0 and level[v] == level[u] + 1:
                    path.append(eid)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if not path:
                return 0
            level[u] = -1  # dead end: prune
            u = self.to[path[-1] ^ 1]
            it[u] += 1
            path.pop()

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._augment(s, t, level, it)
                if not pushed:
                    break
                total += pushed

    def flow_on(self, eid: int) -> int:
        """Flow routed through edge eid (its reverse edge's residual)."""
        return self.cap[eid ^ 1]


@dataclass(frozen=True)
class LowerBoundedFlowProblem:
    """Integral min-flow problem: meet every arc's lower bound, minimize value."""

    instance: Instance
    lower: dict  # arc index -> non-negative integer lower bound

    def __post_init__(self):
        for e, lb in self.lower.items():
            if not (0 <= e < len(self.instance.arcs)):
                raise InvalidInstanceError(f"lower bound on unknown arc {e}")
            if lb < 0 or int(lb) != lb:
                raise InvalidInstanceError(f"lower bound {lb} on arc {e} must be a non-negative integer")


def _paths_from_source(instance: Instance):
    """parent arc index per vertex on some source path (BFS, arc order)."""
    parent = {instance.source: None}
    queue = [instance.source]
    out = instance.out_arcs()
    for u in queue:
        for eid in out[u]:
            v = instance.arcs[eid].head
            if v not in parent:
                parent[v] = eid
                queue.append(v)
    return parent


def _paths_to_sink(instance: Instance):
    parent = {instance.sink: None}
    queue = [instance.sink]
    inc = instance.in_arcs()
    for u in queue:
        for eid in inc[u]:
            v = instance.arcs[eid].tail
            if v not in parent:
                parent[v] = eid
                queue.append(v)
    return parent


def min_flow_lower_bounds(problem: LowerBoundedFlowProblem) -> FlowAssignment:
    """Integral flow meeting every lower bound with minimum source outflow.

    Always feasible on a DAG: each arc's bound is routed along any path
    through it; a sink-to-source max-flow on the residual network then
    cancels every unit that no bound pins down.
    """
    inst = problem.instance
    arcs = inst.arcs
    flow = [0] * len(arcs)
    up = _paths_from_source(inst)
    down = _paths_to_sink(inst)
    for e, lb in sorted(problem.lower.items()):
        if lb == 0:
            continue
        a = arcs[e]
        flow[e] += lb
        v = a.tail
        while up[v] is not None:
            flow[up[v]] += lb
            v = arcs[up[v]].tail
        v = a.head
        while down[v] is not None:
            flow[down[v]] += lb
            v = arcs[down[v]].head
    # Cancel surplus: push sink->source flow; traversing an arc backwards
    # returns units above its bound, traversing forwards reroutes.
    index = {v: i for i, v in enumerate(inst.vertices)}
    big = sum(flow) + 1
    net = Dinic(len(inst.vertices))
    fwd, bwd = [], []
    for e, a in enumerate(arcs):
        fwd.append(net.add_edge(index[a.tail], index[a.head], big))
        bwd.append(net.add_edge(index[a.head], index[a.tail],
                                flow[e] - problem.lower.get(e, 0)))
    net.max_flow(index[inst.sink], index[inst.source])
    out = {}
    for e in range(len(arcs)):
        val = flow[e] + net.flow_on(fwd[e]) - net.flow_on(bwd[e])
        if val:
            out[e] = val
    return FlowAssignment(out)


def two_tuple_params(arc):
    """(t0, re) when the arc offers exactly <0,t0> and <re,0>, else None."""
    job = arc.job
    if isinstance(job, StepList) and len(job.tuples) == 2 and job.tuples[1].time == 0:
        return job.tuples[0].time, job.tuples[1].resource
    return None


def relaxed_duration(arc, f) -> Fraction:
    """Linear-relaxation duration of an arc at flow f."""
    params = two_tuple_params(arc)
    if params is not None:
        t0, re = params
        d = t0 * (1 - Fraction(f) / re)
        return d if d > 0 else Fraction(0)
    if arc.job is None:
        return Fraction(0)
    return arc.job.tuples[0].time if isinstance(arc.job, StepList) else arc.job.duration(0)


def alpha_round(solution, alpha) -> dict:
    """Snap each two-tuple arc of an LP solution to one of its tuples.

    Arcs whose relaxed duration fell below alpha * t(0) are pinned to their
    full resource (duration rounds down to 0, resource inflated by at most
    1/(1-alpha)); the rest are released to 0 (duration rounds up to t(0),
    inflated by at most 1/alpha).  The boundary rounds up: the fast
    interval is half-open.
    """
    alpha = Fraction(alpha)
    if not (0 < alpha < 1):
        raise RttError(f"alpha must be strictly between 0 and 1, got {alpha}")
    bounds = {}
    inst = solution.instance
    for e, arc in enumerate(inst.arcs):
        params = two_tuple_params(arc)
        if params is None:
            continue
        t0, re = params
        f = solution.flow.get(e, Fraction(0))
        if relaxed_duration(arc, f) < alpha * t0:
            bounds[e] = re
    return bounds
