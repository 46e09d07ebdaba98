"""Approximation drivers built on the relaxation, rounding and min-flow.

Pipeline shared by all drivers: expand jobs to two-tuple chains, solve the
LP, read per-job fractional allocations, round them (threshold rounding or
the driver's own rule), and repair into an integral flow with a min-flow
whose lower bounds are the rounded requirements.  The guarantee field is
declarative: tests assert it, nothing branches on it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import IncompatibleAlgorithmError, InvalidInstanceError
from .flows import LowerBoundedFlowProblem, alpha_round, min_flow_lower_bounds
from .lp import LpSolution, build_lp, per_job_summary, solve_lp
from .model import (
    ARC_JOBS,
    TWO_TUPLE_ARC_JOBS,
    FlowAssignment,
    Instance,
    KWay,
    RecursiveBinary,
    Schedule,
    evaluate,
)
from .transform import map_back, two_tuple_expand


@dataclass(frozen=True)
class ApproxResult:
    """Integral solution plus its declared (resource, makespan) guarantee."""

    allocation: dict            # job arc index -> integer resource committed
    flow: FlowAssignment        # integral flow on the ArcJobs instance
    schedule: Schedule
    resource_used: int
    guarantee: tuple            # (resource factor, makespan factor)
    lp_objective: Fraction
    lp_flow_value: Fraction


@dataclass(frozen=True)
class _Pipeline:
    instance: Instance
    expanded: Instance
    trace: object
    solution: LpSolution


def _normalize(instance: Instance) -> Instance:
    if instance.form == TWO_TUPLE_ARC_JOBS:
        return replace(instance, form=ARC_JOBS)
    if instance.form != ARC_JOBS:
        raise InvalidInstanceError("approximation drivers need jobs on arcs; transform first")
    return instance


def _relax(instance: Instance, budget: int) -> _Pipeline:
    instance = _normalize(instance)
    expanded, trace = two_tuple_expand(instance)
    solution = solve_lp(build_lp(expanded, budget))
    solution = replace(solution, per_job=per_job_summary(solution, trace))
    return _Pipeline(instance, expanded, trace, solution)


def _finish_on_instance(pipe: _Pipeline, requirements: dict, guarantee,
                        allocation=None) -> ApproxResult:
    """Min-flow on the pre-expansion instance with per-job lower bounds."""
    bounds = {e: r for e, r in requirements.items() if r}
    flow = min_flow_lower_bounds(LowerBoundedFlowProblem(pipe.instance, bounds))
    used = flow.value(pipe.instance)
    schedule = evaluate(pipe.instance, flow, budget=used)
    return ApproxResult(dict(allocation if allocation is not None else requirements),
                        flow, schedule, used, guarantee,
                        pipe.solution.objective, pipe.solution.source_outflow())


def bicriteria_general(instance: Instance, budget: int, alpha) -> ApproxResult:
    """Threshold rounding: uses at most 1/(1-alpha) times the LP flow and
    1/alpha times the LP makespan, for any duration functions."""
    alpha = Fraction(alpha)
    pipe = _relax(instance, budget)
    bounds = alpha_round(pipe.solution, alpha)
    flow = min_flow_lower_bounds(LowerBoundedFlowProblem(pipe.expanded, bounds))
    rounded = map_back(FlowAssignment(bounds), pipe.trace)
    projected = map_back(flow, pipe.trace).flow
    used = flow.value(pipe.expanded)
    schedule = evaluate(pipe.instance, projected, budget=used)
    return ApproxResult(rounded.resources, projected, schedule, used,
                        (Fraction(1) / (1 - alpha), Fraction(1) / alpha),
                        pipe.solution.objective, pipe.solution.source_outflow())


def _rounded_jobs(pipe: _Pipeline, alpha) -> dict:
    """Canonical per-job resource after threshold rounding at alpha."""
    bounds = alpha_round(pipe.solution, alpha)
    return map_back(FlowAssignment(bounds), pipe.trace).resources


def _require_family(instance: Instance, family, label: str):
    for a in instance.arcs:
        if a.job is not None and not isinstance(a.job, family):
            raise IncompatibleAlgorithmError(
                f"{label} needs every job to use {family.__name__} splitting")


def kway_five_approx(instance: Instance, budget: int) -> ApproxResult:
    """5-approximation of the minimum makespan for k-way split jobs.

    Threshold-round at alpha=1/2, then re-allocate each job: half the
    rounded amount when it exceeds 3, otherwise 2 or 0 units depending on
    whether the LP spent 2; total flow never exceeds the LP's.
    """
    instance = _normalize(instance)
    _require_family(instance, KWay, "kway_five_approx")
    pipe = _relax(instance, budget)
    rounded = _rounded_jobs(pipe, Fraction(1, 2))
    requirements = {}
    for e, r_bar in rounded.items():
        r_star = pipe.solution.per_job[e][0]
        if r_bar > 3:
            requirements[e] = r_bar // 2
        elif r_star >= 2:
            requirements[e] = 2
        else:
            requirements[e] = 0
    return _finish_on_instance(pipe, requirements, (Fraction(1), Fraction(5)))


def binary_four_approx(instance: Instance, budget: int) -> ApproxResult:
    """4-approximation of the minimum makespan for recursive binary jobs.

    After alpha=1/2 rounding the per-job amount is 0 or a power of two;
    halving it whenever it exceeds the LP's fractional spend brings the
    flow back under the LP's while at most doubling each duration.
    """
    instance = _normalize(instance)
    _require_family(instance, RecursiveBinary, "binary_four_approx")
    pipe = _relax(instance, budget)
    rounded = _rounded_jobs(pipe, Fraction(1, 2))
    requirements = {}
    for e, r_bar in rounded.items():
        if r_bar and (r_bar & (r_bar - 1)):
            raise AssertionError(
                f"rounded allocation {r_bar} on arc {e} is not a power of two")
        r_star = pipe.solution.per_job[e][0]
        if r_bar > r_star:
            r_bar //= 2
        requirements[e] = r_bar
    return _finish_on_instance(pipe, requirements, (Fraction(1), Fraction(4)))


def binary_improved_bicriteria(instance: Instance, budget: int) -> ApproxResult:
    """(4/3, 14/5) bi-criteria rounding for recursive binary jobs.

    The LP's per-job spend r rounds to the nearest power of two with the
    midpoint at 1.5 * 2^i (up to 4/3 more resource), clamped to the job's
    largest breakpoint; spends below one unit round to zero.
    """
    instance = _normalize(instance)
    _require_family(instance, RecursiveBinary, "binary_improved_bicriteria")
    pipe = _relax(instance, budget)
    requirements = {}
    for e, (r_star, _t_star) in pipe.solution.per_job.items():
        job = pipe.instance.arcs[e].job
        top = job.breakpoints()[-1].resource
        if r_star < 1 or top == 0:
            requirements[e] = 0
            continue
        i = 0
        while (1 << (i + 1)) <= r_star:
            i += 1
        if (1 << i) >= top:
            requirements[e] = top
        elif r_star < Fraction(3 * (1 << i), 2):
            requirements[e] = 1 << i
        else:
            requirements[e] = 1 << (i + 1)
    return _finish_on_instance(pipe, requirements, (Fraction(4, 3), Fraction(14, 5)))
