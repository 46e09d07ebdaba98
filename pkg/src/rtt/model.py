"""Core data model: duration functions, instances, flows, schedules.

An :class:`Instance` is a single-source single-sink DAG.  Depending on
``form``, jobs sit on nodes (``NodeJobs``, the raw race-DAG view) or on
arcs (``ArcJobs`` and the expanded ``TwoTupleArcJobs``).  Resource units
flow source-to-sink and are reused by every job along their path, so a
schedule is just the longest-path relaxation of the per-arc durations at
the given flow.

All times are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .errors import CyclicDependencyError, InvalidFlowError, InvalidInstanceError

NODE_JOBS = "NodeJobs"
ARC_JOBS = "ArcJobs"
TWO_TUPLE_ARC_JOBS = "TwoTupleArcJobs"

# ln 2 to 30 decimal digits, scaled by 10**30.  Used to evaluate
# floor(log2(base) - log2(log2(e))) = floor(log2(base * ln 2)) exactly in
# integer arithmetic; float log2 can misround next to integer boundaries.
_LN2_NUM = 693147180559945309417232121458
_LN2_DEN = 10**30


@dataclass(frozen=True)
class ResourceTimeTuple:
    """One step of a duration function: spend `resource` units, finish in `time`."""

    resource: int
    time: Fraction

    def __post_init__(self):
        if self.resource < 0:
            raise InvalidInstanceError(f"negative resource {self.resource}")
        object.__setattr__(self, "time", Fraction(self.time))
        if self.time < 0:
            raise InvalidInstanceError(f"negative time {self.time}")


def _as_tuples(pairs) -> tuple[ResourceTimeTuple, ...]:
    out = []
    for p in pairs:
        if isinstance(p, ResourceTimeTuple):
            out.append(p)
        else:
            r, t = p
            out.append(ResourceTimeTuple(int(r), Fraction(t)))
    return tuple(out)


@dataclass(frozen=True)
class StepList:
    """General non-increasing step function given by explicit resource-time tuples.

    First tuple must have resource 0; resources strictly increase and times
    never increase.  ``duration(r)`` returns the time of the largest tuple
    whose resource does not exceed ``r``.
    """

    tuples: tuple[ResourceTimeTuple, ...]

    def __init__(self, tuples):
        object.__setattr__(self, "tuples", _as_tuples(tuples))
        tt = self.tuples
        if not tt:
            raise InvalidInstanceError("step list must have at least one tuple")
        if tt[0].resource != 0:
            raise InvalidInstanceError("first tuple must have resource 0")
        for a, b in zip(tt, tt[1:]):
            if b.resource <= a.resource:
                raise InvalidInstanceError("tuple resources must strictly increase")
            if b.time > a.time:
                raise InvalidInstanceError("tuple times must be non-increasing")
        object.__setattr__(self, "_resources", tuple(t.resource for t in tt))

    def duration(self, r) -> Fraction:
        i = bisect_right(self._resources, r) - 1
        return self.tuples[i].time

    def breakpoints(self) -> tuple[ResourceTimeTuple, ...]:
        return self.tuples


@dataclass(frozen=True)
class KWay:
    """Duration of a job sped up by a flat k-way splitter.

    With r >= 2 units the job of zero-resource duration `base` finishes in
    ceil(base/r) + r; one unit buys nothing, and allocations past
    floor(sqrt(base)) stop helping (the splitter overhead dominates).
    """

    base: int

    def __post_init__(self):
        if self.base < 1:
            raise InvalidInstanceError("base duration must be >= 1")

    def duration(self, r) -> Fraction:
        r = math.floor(r)
        cap = math.isqrt(self.base)
        if r > cap:
            r = cap
        if r < 2:
            return Fraction(self.base)
        return Fraction(-(-self.base // r) + r)

    def breakpoints(self) -> tuple[ResourceTimeTuple, ...]:
        return _kway_breakpoints(self.base)


@dataclass(frozen=True)
class RecursiveBinary:
    """Duration of a job sped up by a recursive binary reduction tree.

    Useful allocations are powers of two: with r = 2^j units (1 <= j <= k)
    the job finishes in ceil(base/2^j) + j + 1, where
    k = floor(log2(base) - log2(log2(e))) is the last height that still
    improves the duration.  Other allocations round down to the nearest
    power of two; everything past 2^k is capped.
    """

    base: int

    def __post_init__(self):
        if self.base < 1:
            raise InvalidInstanceError("base duration must be >= 1")

    def height_cap(self) -> int:
        """Largest worthwhile reducer height k (may be <= 0: no reducer helps)."""
        return _binary_height_cap(self.base)

    def breakpoints(self) -> tuple[ResourceTimeTuple, ...]:
        return _binary_breakpoints(self.base)

    def duration(self, r) -> Fraction:
        pts = self.breakpoints()
        i = bisect_right([t.resource for t in pts], r) - 1
        return pts[i].time


@lru_cache(maxsize=None)
def _kway_breakpoints(base: int) -> tuple[ResourceTimeTuple, ...]:
    pts = [ResourceTimeTuple(0, Fraction(base))]
    for k in range(2, math.isqrt(base) + 1):
        t = Fraction(-(-base // k) + k)
        if t <= pts[-1].time:
            pts.append(ResourceTimeTuple(k, t))
    return tuple(pts)


@lru_cache(maxsize=None)
def _binary_height_cap(base: int) -> int:
    k = -1
    while (1 << (k + 1)) * _LN2_DEN <= base * _LN2_NUM:
        k += 1
    return k


@lru_cache(maxsize=None)
def _binary_breakpoints(base: int) -> tuple[ResourceTimeTuple, ...]:
    pts = [ResourceTimeTuple(0, Fraction(base))]
    for j in range(1, _binary_height_cap(base) + 1):
        t = Fraction(-(-base // (1 << j)) + j + 1)
        # base 3 is the one case where the j=1 step would *increase* the
        # duration; such steps are dropped to keep the function non-increasing.
        if t <= pts[-1].time:
            pts.append(ResourceTimeTuple(1 << j, t))
    return tuple(pts)


DurationFunction = Union[StepList, KWay, RecursiveBinary]


def eval_duration(f: DurationFunction, r) -> Fraction:
    """Time to finish a job with duration function `f` given `r` resource units."""
    if r < 0:
        raise InvalidInstanceError(f"negative resource {r}")
    return f.duration(r)


def reducer_time(n: int, h: int) -> int:
    """Completion time of n serialized unit updates behind a height-h reducer.

    ceil(n / 2^h) + h + 1: the leaves absorb the updates in parallel and the
    tree drains in h more steps plus the final root write.
    """
    if n < 1:
        raise InvalidInstanceError("need at least one update")
    if h < 0:
        raise InvalidInstanceError("height must be non-negative")
    return -(-n // (1 << h)) + h + 1


@dataclass(frozen=True)
class Arc:
    """Directed arc; ``job is None`` marks a dummy (zero duration at any flow)."""

    tail: str
    head: str
    job: Optional[DurationFunction] = None

    def duration(self, r) -> Fraction:
        if self.job is None:
            return Fraction(0)
        return self.job.duration(r)


@dataclass(frozen=True)
class Instance:
    """Single-source single-sink DAG with jobs on arcs or nodes.

    Immutable after construction; structural invariants (acyclic, one
    source, one sink, every vertex on a source-sink path) are enforced in
    ``__post_init__``.
    """

    vertices: tuple[str, ...]
    arcs: tuple[Arc, ...]
    source: str
    sink: str
    budget: int = 0
    target: Optional[Fraction] = None
    form: str = ARC_JOBS
    node_jobs: Optional[Mapping[str, Optional[DurationFunction]]] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if self.target is not None:
            object.__setattr__(self, "target", Fraction(self.target))
        _validate_structure(self)

    # -- graph helpers -------------------------------------------------

    def out_arcs(self) -> dict[str, list[int]]:
        out = {v: [] for v in self.vertices}
        for i, a in enumerate(self.arcs):
            out[a.tail].append(i)
        return out

    def in_arcs(self) -> dict[str, list[int]]:
        inc = {v: [] for v in self.vertices}
        for i, a in enumerate(self.arcs):
            inc[a.head].append(i)
        return inc

    def topological_order(self) -> list[str]:
        return _topological_order(self.vertices, self.arcs)

    def job_arcs(self) -> list[int]:
        """Indices of non-dummy arcs."""
        return [i for i, a in enumerate(self.arcs) if a.job is not None]

    def families(self) -> set[type]:
        """Duration-function classes present among the jobs."""
        if self.form == NODE_JOBS:
            return {type(j) for j in (self.node_jobs or {}).values() if j is not None}
        return {type(a.job) for a in self.arcs if a.job is not None}


def _topological_order(vertices, arcs) -> list[str]:
    indeg = {v: 0 for v in vertices}
    succs = {v: [] for v in vertices}
    for a in arcs:
        indeg[a.head] += 1
        succs[a.tail].append(a.head)
    ready = [v for v in vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for w in succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != len(vertices):
        raise InvalidInstanceError("graph contains a cycle")
    return order


def _validate_structure(inst: Instance):
    seen = set()
    for v in inst.vertices:
        if v in seen:
            raise InvalidInstanceError(f"duplicate vertex {v!r}")
        seen.add(v)
    for a in inst.arcs:
        if a.tail not in seen or a.head not in seen:
            raise InvalidInstanceError(f"arc {a.tail}->{a.head} references unknown vertex")
        if a.tail == a.head:
            raise InvalidInstanceError(f"self-loop at {a.tail}")
    if inst.source not in seen or inst.sink not in seen:
        raise InvalidInstanceError("source/sink not in vertex set")
    if inst.budget < 0:
        raise InvalidInstanceError("budget must be non-negative")
    if inst.form not in (NODE_JOBS, ARC_JOBS, TWO_TUPLE_ARC_JOBS):
        raise InvalidInstanceError(f"unknown form {inst.form!r}")
    if inst.form == NODE_JOBS:
        for a in inst.arcs:
            if a.job is not None:
                raise InvalidInstanceError("NodeJobs instances carry jobs on nodes, not arcs")
        for v in (inst.node_jobs or {}):
            if v not in seen:
                raise InvalidInstanceError(f"node job on unknown vertex {v!r}")
    elif inst.node_jobs:
        raise InvalidInstanceError(f"{inst.form} instances must not carry node jobs")

    indeg = {v: 0 for v in inst.vertices}
    outdeg = {v: 0 for v in inst.vertices}
    for a in inst.arcs:
        outdeg[a.tail] += 1
        indeg[a.head] += 1
    sources = [v for v in inst.vertices if indeg[v] == 0]
    sinks = [v for v in inst.vertices if outdeg[v] == 0]
    if len(sources) != 1 or sources[0] != inst.source:
        raise InvalidInstanceError(f"expected single source {inst.source!r}, found {sources}")
    if len(sinks) != 1 or sinks[0] != inst.sink:
        raise InvalidInstanceError(f"expected single sink {inst.sink!r}, found {sinks}")
    _topological_order(inst.vertices, inst.arcs)  # raises on cycles
    # single source + single sink + acyclic already implies every vertex
    # can walk back to the source and forward to the sink.


@dataclass(frozen=True)
class FlowAssignment:
    """Resources on each arc, keyed by arc index; integral after rounding."""

    flow: dict

    def amount(self, arc_idx: int):
        return self.flow.get(arc_idx, 0)

    def value(self, instance: Instance):
        """Total outflow at the source (= resources committed)."""
        return sum(self.amount(i) for i in instance.out_arcs()[instance.source])

    def is_integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.flow.values())


@dataclass(frozen=True)
class Schedule:
    """Earliest event time per vertex; makespan is the sink's event time."""

    event_time: dict
    makespan: Fraction


@dataclass(frozen=True)
class FlowReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_flow(instance: Instance, flow: FlowAssignment, budget: Optional[int] = None,
                  require_integral: bool = False) -> FlowReport:
    """Check a flow against the instance; the report lists every violation."""
    if isinstance(flow, dict):
        flow = FlowAssignment(flow)
    violations = []
    n_arcs = len(instance.arcs)
    for k, v in flow.flow.items():
        if not isinstance(k, int) or not (0 <= k < n_arcs):
            violations.append(f"flow on unknown arc id {k!r}")
        if v < 0:
            violations.append(f"negative flow {v} on arc {k}")
        if require_integral and Fraction(v).denominator != 1:
            violations.append(f"non-integral flow {v} on arc {k}")
    inc, out = instance.in_arcs(), instance.out_arcs()
    for v in instance.vertices:
        if v in (instance.source, instance.sink):
            continue
        fin = sum(flow.amount(i) for i in inc[v])
        fout = sum(flow.amount(i) for i in out[v])
        if fin != fout:
            violations.append(f"conservation violated at {v!r}: in {fin} != out {fout}")
    cap = instance.budget if budget is None else budget
    src_out = sum(flow.amount(i) for i in out[instance.source])
    if src_out > cap:
        violations.append(f"source outflow {src_out} exceeds budget {cap}")
    return FlowReport(tuple(violations))


def evaluate(instance: Instance, flow, budget: Optional[int] = None,
             check: bool = True) -> Schedule:
    """Earliest-start schedule induced by a flow.

    T(source) = 0 and T(v) is the max over incoming arcs (u, v) of
    T(u) + duration(job, flow on the arc); the makespan is T(sink).
    """
    if instance.form not in (ARC_JOBS, TWO_TUPLE_ARC_JOBS):
        raise InvalidInstanceError("evaluate needs jobs on arcs; transform NodeJobs first")
    if isinstance(flow, dict):
        flow = FlowAssignment(flow)
    if check:
        report = validate_flow(instance, flow, budget=budget)
        if not report.ok:
            raise InvalidFlowError("; ".join(report.violations), report.violations)
    inc = instance.in_arcs()
    times = {instance.source: Fraction(0)}
    for v in instance.topological_order():
        if v == instance.source:
            continue
        best = Fraction(0)
        for i in inc[v]:
            a = instance.arcs[i]
            t = times[a.tail] + a.duration(flow.amount(i))
            if t > best:
                best = t
        times[v] = best
    return Schedule(times, times[instance.sink])


def build_race_instance(cells: Iterable[str], edges: Iterable[tuple], family: str,
                        budget: int = 0) -> Instance:
    """Race DAG for a program's memory cells: jobs on nodes, base = in-degree.

    Each cell becomes a node job whose zero-resource duration is the number
    of updates it receives (its in-degree); degree-0 nodes get base 1 so
    every job has a positive duration.  `family` selects 'kway' or 'binary'
    splitting as the speed-up model.
    """
    cells = list(cells)
    edges = [(str(u), str(v)) for (u, v) in edges]
    indeg = {v: 0 for v in cells}
    for u, v in edges:
        if u not in indeg or v not in indeg:
            raise InvalidInstanceError(f"edge {u}->{v} references unknown cell")
        indeg[v] += 1
    try:
        _topological_order(cells, [Arc(u, v) for u, v in edges])
    except InvalidInstanceError:
        raise CyclicDependencyError("cyclic read-write dependency") from None
    ctor = {"kway": KWay, "binary": RecursiveBinary}.get(family)
    if ctor is None:
        raise InvalidInstanceError(f"unknown duration family {family!r}")
    node_jobs = {v: ctor(max(indeg[v], 1)) for v in cells}
    arcs = tuple(Arc(u, v) for u, v in edges)
    srcs = [v for v in cells if indeg[v] == 0]
    outdeg = {v: 0 for v in cells}
    for u, _ in edges:
        outdeg[u] += 1
    snks = [v for v in cells if outdeg[v] == 0]
    if len(srcs) != 1 or len(snks) != 1:
        raise InvalidInstanceError(f"need a single source and sink, found {srcs} / {snks}")
    return Instance(tuple(cells), arcs, srcs[0], snks[0], budget=budget, form=NODE_JOBS,
                    node_jobs=node_jobs)
