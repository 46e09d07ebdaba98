"""Brute-force exact solvers: the ground truth for every ratio test.

Only allocations at a job's breakpoints matter (a step function cannot
tell flows between breakpoints apart), so the search enumerates one
breakpoint per job arc and checks that some conserved integral flow within
budget covers all of them, which is exactly an integral min-flow question.
Branch and bound: allocations are tried largest-first per arc in arc-index
order, pruning on an optimistic longest-path bound and on flow
infeasibility, so the returned witness is reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InvalidInstanceError, SizeGuardError
from .flows import LowerBoundedFlowProblem, min_flow_lower_bounds
from .model import ARC_JOBS, TWO_TUPLE_ARC_JOBS, FlowAssignment, Instance, evaluate


@dataclass(frozen=True)
class SizeGuard:
    """Refusal threshold that keeps the oracle off accidentally huge inputs."""

    max_arcs: int = 16
    max_budget: int = 8

    def check(self, instance: Instance, budget: int):
        if len(instance.arcs) > self.max_arcs or budget > self.max_budget:
            raise SizeGuardError(
                f"oracle refuses instance with {len(instance.arcs)} arcs, budget {budget} "
                f"(guard: {self.max_arcs} arcs, budget {self.max_budget}); "
                "pass a larger SizeGuard or set RTT_SIZE_GUARD to override")


DEFAULT_GUARD = SizeGuard()


def guard_from_env(default: SizeGuard = DEFAULT_GUARD) -> SizeGuard:
    """SizeGuard from RTT_SIZE_GUARD ('ARCS' or 'ARCS,BUDGET'), else the default."""
    raw = os.environ.get("RTT_SIZE_GUARD")
    if not raw:
        return default
    parts = raw.split(",")
    try:
        if len(parts) == 1:
            return SizeGuard(int(parts[0]), default.max_budget)
        return SizeGuard(int(parts[0]), int(parts[1]))
    except ValueError:
        raise SizeGuardError(f"cannot parse RTT_SIZE_GUARD={raw!r}; expected 'ARCS[,BUDGET]'")


def _candidates(arc, budget: int):
    """Breakpoints worth trying on an arc: strictly improving, within budget."""
    pts = arc.job.breakpoints()
    out = [(pts[0].resource, pts[0].time)]
    for bp in pts[1:]:
        if bp.resource > budget:
            break
        if bp.time < out[-1][1]:
            out.append((bp.resource, bp.time))
    return out


class _Search:
    def __init__(self, instance: Instance, budget: int):
        self.inst = instance
        self.budget = budget
        self.jobs = instance.job_arcs()
        self.cands = {e: _candidates(instance.arcs[e], budget) for e in self.jobs}
        self.in_arcs = instance.in_arcs()
        self.topo = instance.topological_order()
        self.best: Optional[Fraction] = None
        self.best_bounds = None
        # optimistic duration: the least each arc can take within budget
        self.floor_dur = {}
        for e, a in enumerate(instance.arcs):
            if a.job is None:
                self.floor_dur[e] = Fraction(0)
            else:
                self.floor_dur[e] = self.cands[e][-1][1]

    def longest_path(self, durations) -> Fraction:
        times = {self.inst.source: Fraction(0)}
        for v in self.topo:
            if v == self.inst.source:
                continue
            best = Fraction(0)
            for e in self.in_arcs[v]:
                t = times[self.inst.arcs[e].tail] + durations[e]
                if t > best:
                    best = t
            times[v] = best
        return times[self.inst.sink]

    def feasible_within_budget(self, bounds) -> bool:
        if not bounds:
            return True
        flow = min_flow_lower_bounds(LowerBoundedFlowProblem(self.inst, bounds))
        return flow.value(self.inst) <= self.budget

    def run(self) -> tuple[Fraction, FlowAssignment]:
        durations = dict(self.floor_dur)
        bounds = {}

        def dfs(i: int):
            bound = self.longest_path(durations)
            if self.best is not None and bound >= self.best:
                return
            if i == len(self.jobs):
                if self.best is None or bound < self.best:
                    self.best = bound
                    self.best_bounds = dict(bounds)
                return
            e = self.jobs[i]
            for resource, time in reversed(self.cands[e]):
                durations[e] = time
                if resource:
                    bounds[e] = resource
                    if self.feasible_within_budget(bounds):
                        dfs(i + 1)
                    del bounds[e]
                else:
                    dfs(i + 1)
            durations[e] = self.floor_dur[e]

        dfs(0)
        assert self.best is not None  # zero allocation is always feasible
        witness = min_flow_lower_bounds(LowerBoundedFlowProblem(self.inst, self.best_bounds))
        return self.best, witness


def brute_min_makespan(instance: Instance, budget: int,
                       guard: SizeGuard = DEFAULT_GUARD) -> tuple[Fraction, FlowAssignment]:
    """Exact minimum makespan over all integral flows of value <= budget.

    Returns the makespan and a witness flow achieving it (the minimum flow
    meeting the optimal allocation, so witnesses are reproducible).
    """
    if instance.form not in (ARC_JOBS, TWO_TUPLE_ARC_JOBS):
        raise InvalidInstanceError("oracle needs jobs on arcs; transform NodeJobs first")
    if budget < 0:
        raise InvalidInstanceError("budget must be non-negative")
    guard.check(instance, budget)
    makespan, witness = _Search(instance, budget).run()
    check = evaluate(instance, witness, budget=budget)
    assert check.makespan == makespan, "witness flow does not achieve the reported optimum"
    return makespan, witness


def brute_min_resource(instance: Instance, target, budget_max: int,
                       guard: SizeGuard = DEFAULT_GUARD) -> Optional[int]:
    """Smallest budget whose optimal makespan meets the target, scanning upward."""
    target = Fraction(target)
    guard.check(instance, budget_max)
    for b in range(budget_max + 1):
        makespan, _ = brute_min_makespan(instance, b, guard=guard)
        if makespan <= target:
            return b
    return None
