"""Exact pseudo-polynomial DP for two-terminal series-parallel instances.

Series composition feeds the *same* budget to both children: a unit
travels its whole source-sink path, serving every job it meets, so jobs in
series share resources.  Parallel composition splits the budget.  This is
the path-reuse semantics and it differs from the classic non-reusable
time-cost tradeoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import InvalidInstanceError
from .model import ARC_JOBS, Instance


@dataclass(frozen=True)
class Leaf:
    """One job; ``job is None`` stands for a zero-duration dummy arc.

    ``ref`` is free-form bookkeeping (sp_recognize stores the arc index).
    """

    job: object = None
    ref: object = None

    def duration(self, r) -> Fraction:
        return Fraction(0) if self.job is None else self.job.duration(r)


@dataclass(frozen=True)
class Series:
    left: "SpTree"
    right: "SpTree"


@dataclass(frozen=True)
class Parallel:
    left: "SpTree"
    right: "SpTree"


SpTree = Union[Leaf, Series, Parallel]


def leaves(tree: SpTree) -> list:
    """Leaves in left-to-right order; index = allocation key."""
    if isinstance(tree, Leaf):
        return [tree]
    return leaves(tree.left) + leaves(tree.right)


@dataclass(frozen=True)
class DpTable:
    """Per-node makespan rows, nodes numbered in post-order; rows[λ] non-increasing."""

    rows: dict
    root: int

    def root_row(self) -> list:
        return self.rows[self.root]


def sp_min_makespan(tree: SpTree, budget: int) -> tuple[Fraction, DpTable, dict]:
    """(optimal makespan, full DP table, one optimal per-leaf budget assignment).

    Leaf: T(λ) = t(λ).  Series: T1(λ) + T2(λ), both children see the whole
    λ.  Parallel: min over splits i of max(T1(i), T2(λ-i)); ties take the
    smallest i.  The allocation maps leaf positions (see ``leaves``) to the
    budget available to that leaf.
    """
    if budget < 0:
        raise InvalidInstanceError("budget must be non-negative")
    rows = {}
    splits = {}
    counter = [0]
    leaf_pos = [0]

    def solve(node) -> int:
        if isinstance(node, Leaf):
            nid = counter[0]
            counter[0] += 1
            rows[nid] = [node.duration(lam) for lam in range(budget + 1)]
            splits[nid] = ("leaf", leaf_pos[0])
            leaf_pos[0] += 1
            return nid
        left = solve(node.left)
        right = solve(node.right)
        nid = counter[0]
        counter[0] += 1
        if isinstance(node, Series):
            rows[nid] = [rows[left][lam] + rows[right][lam] for lam in range(budget + 1)]
            splits[nid] = ("series", left, right)
        else:
            row = []
            arg = []
            lrow, rrow = rows[left], rows[right]
            for lam in range(budget + 1):
                best = None
                best_i = 0
                for i in range(lam + 1):
                    cand = lrow[i] if lrow[i] >= rrow[lam - i] else rrow[lam - i]
                    if best is None or cand < best:
                        best = cand
                        best_i = i
                row.append(best)
                arg.append(best_i)
            rows[nid] = row
            splits[nid] = ("parallel", left, right, arg)
        return nid

    root = solve(tree)
    table = DpTable(rows, root)
    allocation = {}

    def backtrack(nid: int, lam: int):
        kind = splits[nid][0]
        if kind == "leaf":
            allocation[splits[nid][1]] = lam
        elif kind == "series":
            _, left, right = splits[nid]
            backtrack(left, lam)
            backtrack(right, lam)
        else:
            _, left, right, arg = splits[nid]
            i = arg[lam]
            backtrack(left, i)
            backtrack(right, lam - i)

    backtrack(root, budget)
    return rows[root][budget], table, allocation


def sp_min_resource(tree: SpTree, target, budget_max: int) -> Optional[int]:
    """Smallest λ <= budget_max with T(root, λ) <= target, or None if infeasible.

    The root row is non-increasing in λ, so a single table at budget_max
    answers the question exactly.
    """
    target = Fraction(target)
    _, table, _ = sp_min_makespan(tree, budget_max)
    for lam, value in enumerate(table.root_row()):
        if value <= target:
            return lam
    return None


def sp_recognize(instance: Instance) -> Optional[SpTree]:
    """Series-parallel decomposition of an ArcJobs instance, or None.

    Standard two-terminal reduction: repeatedly merge parallel arcs and
    contract internal degree-(1,1) vertices.  Leaves are the job arcs in
    input order; dummies become zero-duration leaves.
    """
    if instance.form != ARC_JOBS:
        raise InvalidInstanceError("sp_recognize expects an ArcJobs instance")
    items = [(a.tail, a.head, Leaf(a.job, ref=e)) for e, a in enumerate(instance.arcs)]
    s, t = instance.source, instance.sink
    changed = True
    while changed:
        changed = False
        # parallel merges, keeping first-seen order
        by_ends = {}
        merged = []
        for tail, head, tree in items:
            key = (tail, head)
            if key in by_ends:
                idx = by_ends[key]
                merged[idx] = (tail, head, Parallel(merged[idx][2], tree))
                changed = True
            else:
                by_ends[key] = len(merged)
                merged.append((tail, head, tree))
        items = merged
        # series contractions
        indeg, outdeg = {}, {}
        for tail, head, _ in items:
            outdeg[tail] = outdeg.get(tail, 0) + 1
            indeg[head] = indeg.get(head, 0) + 1
        for v in instance.vertices:
            if v in (s, t):
                continue
            if indeg.get(v, 0) == 1 and outdeg.get(v, 0) == 1:
                into = next(i for i, it in enumerate(items) if it[1] == v)
                outof = next(i for i, it in enumerate(items) if it[0] == v)
                a, b = items[into], items[outof]
                composed = (a[0], b[1], Series(a[2], b[2]))
                items = [it for i, it in enumerate(items) if i not in (into, outof)]
                items.append(composed)
                changed = True
                break
    if len(items) == 1 and items[0][0] == s and items[0][1] == t:
        return items[0][2]
    return None
