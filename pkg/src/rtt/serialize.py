"""On-disk formats: instance files, flow files, certificate sidecars.

Instances are JSON documents; all times serialize as 'p/q' strings so
golden files never drift.  Flow files map arc ids (positions in the arcs
list) to integers.  A certificate sidecar records budget, target and the
generator's expected answer.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ParseError
from .generators import GeneratedInstance
from .model import (
    ARC_JOBS,
    NODE_JOBS,
    TWO_TUPLE_ARC_JOBS,
    Arc,
    FlowAssignment,
    Instance,
    KWay,
    RecursiveBinary,
    StepList,
)
from .rat import format_rational, parse_rational

FORMAT_VERSION = 1


def job_to_obj(job):
    if job is None:
        return "dummy"
    if isinstance(job, StepList):
        return {"step": [[t.resource, format_rational(t.time)] for t in job.tuples]}
    if isinstance(job, KWay):
        return {"kway": job.base}
    if isinstance(job, RecursiveBinary):
        return {"binary": job.base}
    raise ParseError(f"cannot serialize job {job!r}")


def job_from_obj(obj):
    if obj == "dummy" or obj is None:
        return None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"malformed job {obj!r}")
    kind, value = next(iter(obj.items()))
    try:
        if kind == "step":
            return StepList([(int(r), parse_rational(t)) for r, t in value])
        if kind == "kway":
            return KWay(int(value))
        if kind == "binary":
            return RecursiveBinary(int(value))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"malformed job {obj!r}: {exc}")
    raise ParseError(f"unknown job kind {kind!r}")


def instance_to_obj(instance: Instance) -> dict:
    if instance.form == NODE_JOBS:
        jobs = instance.node_jobs or {}
        vertices = [{"id": v, "job": job_to_obj(jobs.get(v))} for v in instance.vertices]
    else:
        vertices = list(instance.vertices)
    return {
        "format_version": FORMAT_VERSION,
        "form": instance.form,
        "source": instance.source,
        "sink": instance.sink,
        "vertices": vertices,
        "arcs": [{"tail": a.tail, "head": a.head, "job": job_to_obj(a.job)}
                 for a in instance.arcs],
        "budget": instance.budget,
        "target": None if instance.target is None else format_rational(instance.target),
    }


def instance_from_obj(obj) -> Instance:
    try:
        form = obj.get("form", ARC_JOBS)
        if form not in (NODE_JOBS, ARC_JOBS, TWO_TUPLE_ARC_JOBS):
            raise ParseError(f"unknown form {form!r}")
        vertices = []
        node_jobs = {}
        for v in obj["vertices"]:
            if isinstance(v, dict):
                vertices.append(v["id"])
                node_jobs[v["id"]] = job_from_obj(v.get("job"))
            else:
                vertices.append(v)
        arcs = tuple(Arc(a["tail"], a["head"], job_from_obj(a.get("job")))
                     for a in obj["arcs"])
        target = obj.get("target")
        return Instance(
            tuple(vertices), arcs, obj["source"], obj["sink"],
            budget=int(obj.get("budget", 0)),
            target=None if target is None else parse_rational(target),
            form=form,
            node_jobs=node_jobs if form == NODE_JOBS else None,
        )
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"malformed instance file: {exc}")


def dump_instance(instance: Instance) -> str:
    return json.dumps(instance_to_obj(instance), indent=2) + "\n"


def load_instance(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}")
    return instance_from_obj(obj)


def save_instance(instance: Instance, path):
    with open(path, "w") as fh:
        fh.write(dump_instance(instance))


def read_instance(path) -> Instance:
    with open(path) as fh:
        return load_instance(fh.read())


def dump_flow(flow) -> str:
    if isinstance(flow, FlowAssignment):
        flow = flow.flow
    items = {str(k): int(v) for k, v in sorted(flow.items()) if v}
    return json.dumps(items, indent=2) + "\n"


def load_flow(text: str) -> FlowAssignment:
    try:
        obj = json.loads(text)
        flow = {}
        for k, v in obj.items():
            if not isinstance(v, int):
                raise ParseError(f"flow on arc {k} must be an integer, got {v!r}")
            flow[int(k)] = v
        return FlowAssignment(flow)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"malformed flow file: {exc}")


def read_flow(path) -> FlowAssignment:
    with open(path) as fh:
        return load_flow(fh.read())


def save_flow(flow, path):
    with open(path, "w") as fh:
        fh.write(dump_flow(flow))


def certificate_obj(gen: GeneratedInstance) -> dict:
    return {
        "budget": gen.budget,
        "target": None if gen.target is None else format_rational(gen.target),
        "expected_achievable": gen.expected_achievable,
        "provenance": gen.provenance,
    }


def save_certificate(gen: GeneratedInstance, path):
    with open(path, "w") as fh:
        fh.write(json.dumps(certificate_obj(gen), indent=2) + "\n")


def load_certificate(path) -> dict:
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("target") is not None:
        obj["target"] = Fraction(obj["target"])
    return obj
