"""Solvers for the discrete resource-time tradeoff problem with resource reuse over paths.

Jobs sit on the arcs (or, pre-transform, the nodes) of a single-source,
single-sink DAG.  Each job has a non-increasing duration function of the
resources routed through it, and every resource unit travels one
source-to-sink path, serving every job it passes.  The package provides:

* an exact brute-force oracle and an exact DP for series-parallel DAGs,
* an LP relaxation with threshold rounding and min-flow repair, giving
  bi-criteria and single-criteria approximation drivers,
* instance generators with known certificates for validation,
* a CLI (``rtt``) plus a JSON instance format.
"""

from .model import (
    ResourceTimeTuple,
    StepList,
    KWay,
    RecursiveBinary,
    Instance,
    FlowAssignment,
    Schedule,
    NODE_JOBS,
    ARC_JOBS,
    TWO_TUPLE_ARC_JOBS,
    eval_duration,
    reducer_time,
    build_race_instance,
    evaluate,
    validate_flow,
)

__all__ = [
    "ResourceTimeTuple",
    "StepList",
    "KWay",
    "RecursiveBinary",
    "Instance",
    "FlowAssignment",
    "Schedule",
    "NODE_JOBS",
    "ARC_JOBS",
    "TWO_TUPLE_ARC_JOBS",
    "eval_duration",
    "reducer_time",
    "build_race_instance",
    "evaluate",
    "validate_flow",
]

__version__ = "0.1.0"
