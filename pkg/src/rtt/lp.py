"""Linear relaxation of the tradeoff problem and its exact solver.

The LP has one flow variable per arc and one event-time variable per
vertex: two-tuple arcs run in t(0)*(1 - f/r) under the relaxation (capped
at f <= r), single-tuple arcs keep their constant duration, flow conserves
at internal vertices and at most B units leave the source; minimize the
sink's event time.

The solver returns exact rationals.  Pipeline: presolve contracts
pass-through vertices (one dummy side, degree 1/1), a float64 simplex
proposes an optimal basis, and that basis is re-solved and certified in
exact rational arithmetic; if certification fails, a from-scratch exact
Bland simplex takes over.  Pivot rules are fixed (Dantzig with lowest
index tie-breaks in the float phase, Bland in the exact phase), so
identical inputs give identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import LpSolveError, InvalidInstanceError
from .flows import relaxed_duration, two_tuple_params
from .model import Instance, TWO_TUPLE_ARC_JOBS
from .rat import rat, to_fraction

_FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: dict          # var index -> Fraction
    sense: str            # '<=', '>=' or '='
    rhs: Fraction


@dataclass
class LinearProgram:
    """min c.x subject to rows, x >= 0."""

    var_names: list
    objective: dict       # var index -> Fraction
    rows: list
    meta: Optional["LpMeta"] = None

    def to_lp_text(self) -> str:
        """Human-readable dump in the common LP text format."""
        def term(c, name, first):
            c = Fraction(c)
            sign = "-" if c < 0 else ("" if first else "+")
            mag = abs(c)
            coeff = "" if mag == 1 else f"{mag} "
            return f"{sign} {coeff}{name}".strip() if not first else f"{sign}{coeff}{name}"

        def expr(coeffs):
            parts = []
            for i in sorted(coeffs):
                if coeffs[i] == 0:
                    continue
                parts.append(term(coeffs[i], self.var_names[i], not parts))
            return " ".join(parts) if parts else "0"

        lines = ["Minimize", f" obj: {expr(self.objective)}", "Subject To"]
        for r in self.rows:
            lines.append(f" {r.name}: {expr(r.coeffs)} {r.sense.replace('==', '=')} {r.rhs}")
        lines += ["Bounds"] + [f" 0 <= {n}" for n in self.var_names] + ["End", ""]
        return "\n".join(lines)


@dataclass
class LpMeta:
    instance: Instance
    budget: int
    flow_var: dict        # arc index -> var index
    time_var: dict        # vertex -> var index


@dataclass(frozen=True)
class LpSolution:
    """Exact optimal solution; satisfies every constraint in rational arithmetic."""

    instance: Instance
    flow: dict            # arc index -> Fraction
    event_time: dict      # vertex -> Fraction
    objective: Fraction
    per_job: Optional[dict] = None

    def source_outflow(self) -> Fraction:
        out = self.instance.out_arcs()[self.instance.source]
        return sum((self.flow.get(e, Fraction(0)) for e in out), Fraction(0))


def build_lp(instance: Instance, budget: Optional[int] = None) -> LinearProgram:
    """LP over a two-tuple instance: caps, precedence, conservation, budget."""
    if instance.form != TWO_TUPLE_ARC_JOBS:
        raise InvalidInstanceError("build_lp expects a TwoTupleArcJobs instance")
    B = instance.budget if budget is None else budget
    var_names = []
    flow_var, time_var = {}, {}
    for e in range(len(instance.arcs)):
        flow_var[e] = len(var_names)
        var_names.append(f"f{e}")
    for i, v in enumerate(instance.vertices):
        time_var[v] = len(var_names)
        var_names.append(f"T{i}")

    rows = []
    for e, arc in enumerate(instance.arcs):
        params = two_tuple_params(arc)
        if params is not None:
            t0, re = params
            rows.append(Row(f"cap_{e}", {flow_var[e]: Fraction(1)}, "<=", Fraction(re)))
    for e, arc in enumerate(instance.arcs):
        params = two_tuple_params(arc)
        coeffs = {time_var[arc.tail]: Fraction(1), time_var[arc.head]: Fraction(-1)}
        if params is not None:
            t0, re = params
            coeffs[flow_var[e]] = t0 / re
            rhs = -t0
        else:
            rhs = -relaxed_duration(arc, 0)
        rows.append(Row(f"order_{e}", coeffs, "<=", Fraction(rhs)))
    for v in instance.vertices:
        if v in (instance.source, instance.sink):
            continue
        coeffs = {}
        for e, arc in enumerate(instance.arcs):
            if arc.tail == v:
                coeffs[flow_var[e]] = coeffs.get(flow_var[e], Fraction(0)) + 1
            if arc.head == v:
                coeffs[flow_var[e]] = coeffs.get(flow_var[e], Fraction(0)) - 1
        rows.append(Row(f"cons_{v}", coeffs, "=", Fraction(0)))
    src_out = {flow_var[e]: Fraction(1) for e in instance.out_arcs()[instance.source]}
    rows.append(Row("budget", src_out, "<=", Fraction(B)))
    rows.append(Row("fix_source", {time_var[instance.source]: Fraction(1)}, "=", Fraction(0)))

    objective = {time_var[instance.sink]: Fraction(1)}
    return LinearProgram(var_names, objective, rows, LpMeta(instance, B, flow_var, time_var))


# ---------------------------------------------------------------------------
# presolve: contract pass-through vertices of the expanded DAG
# ---------------------------------------------------------------------------

@dataclass
class _Rec:
    tail: str
    head: str
    t0: Fraction
    cap: Optional[int]    # None when uncapped (dummy / single tuple)
    members: list = field(default_factory=list)

    @property
    def is_free(self):
        return self.cap is None and self.t0 == 0


def _reduce_graph(instance: Instance):
    """Merge runs through (1,1)-degree vertices where one side is free.

    Every original arc keeps a pointer to the reduced arc carrying its
    flow; the LP only needs variables for reduced arcs and kept vertices.
    """
    recs = []
    for e, arc in enumerate(instance.arcs):
        params = two_tuple_params(arc)
        if params is not None:
            t0, cap = params
        else:
            t0, cap = relaxed_duration(arc, 0), None
        recs.append(_Rec(arc.tail, arc.head, Fraction(t0), cap, [e]))

    alive = {id(r): r for r in recs}
    in_of = {v: [] for v in instance.vertices}
    out_of = {v: [] for v in instance.vertices}
    for r in recs:
        in_of[r.head].append(r)
        out_of[r.tail].append(r)

    changed = True
    while changed:
        changed = False
        for v in instance.vertices:
            if v in (instance.source, instance.sink):
                continue
            if len(in_of[v]) == 1 and len(out_of[v]) == 1:
                a, b = in_of[v][0], out_of[v][0]
                if a is b or not (a.is_free or b.is_free):
                    continue
                keep, gone = (b, a) if a.is_free else (a, b)
                merged = _Rec(a.tail, b.head, keep.t0, keep.cap, a.members + b.members)
                for r in (a, b):
                    in_of[r.head].remove(r)
                    out_of[r.tail].remove(r)
                    del alive[id(r)]
                in_of[merged.head].append(merged)
                out_of[merged.tail].append(merged)
                alive[id(merged)] = merged
                in_of[v] = []
                out_of[v] = []
                changed = True
    reduced = sorted(alive.values(), key=lambda r: r.members[0])
    kept = [v for v in instance.vertices if in_of[v] or out_of[v] or v in (instance.source, instance.sink)]
    return reduced, kept


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Exact optimum of the relaxation LP (see module docstring for method)."""
    meta = lp.meta
    if meta is None:
        raise LpSolveError("solve_lp needs the metadata attached by build_lp")
    inst, B = meta.instance, meta.budget
    reduced, kept = _reduce_graph(inst)

    nf = len(reduced)
    fvar = {i: i for i in range(nf)}
    tvar = {}
    for v in kept:
        if v == inst.source:
            continue
        tvar[v] = nf + len(tvar)
    nvars = nf + len(tvar)

    def tcoef(v):
        return None if v == inst.source else tvar[v]

    rows = []
    for i, r in enumerate(reduced):
        if r.cap is not None:
            rows.append(({fvar[i]: rat(1)}, "<=", rat(r.cap)))
    for i, r in enumerate(reduced):
        coeffs = {}
        tv, hv = tcoef(r.tail), tcoef(r.head)
        if tv is not None:
            coeffs[tv] = rat(1)
        if hv is not None:
            coeffs[hv] = coeffs.get(hv, rat(0)) - 1
        if r.cap is not None and r.t0 != 0:
            coeffs[fvar[i]] = rat(r.t0.numerator, r.t0.denominator) / r.cap
        rhs = rat(-r.t0.numerator, r.t0.denominator)
        rows.append((coeffs, "<=", rhs))
    for v in kept:
        if v in (inst.source, inst.sink):
            continue
        coeffs = {}
        for i, r in enumerate(reduced):
            if r.tail == v:
                coeffs[fvar[i]] = coeffs.get(fvar[i], rat(0)) + 1
            if r.head == v:
                coeffs[fvar[i]] = coeffs.get(fvar[i], rat(0)) - 1
        rows.append((coeffs, "=", rat(0)))
    rows.append(({fvar[i]: rat(1) for i, r in enumerate(reduced) if r.tail == inst.source},
                 "<=", rat(B)))
    objective = {tvar[inst.sink]: rat(1)}

    x = _exact_solve_min(objective, rows, nvars)

    flow = {}
    for i, r in enumerate(reduced):
        val = to_fraction(x[fvar[i]])
        for e in r.members:
            flow[e] = val
    # earliest event times under the relaxed durations at the solved flows
    times = {inst.source: Fraction(0)}
    inc = inst.in_arcs()
    for v in inst.topological_order():
        if v == inst.source:
            continue
        times[v] = max(times[a.tail] + relaxed_duration(a, flow.get(e, Fraction(0)))
                       for e, a in ((e, inst.arcs[e]) for e in inc[v]))
    objective_value = times[inst.sink]
    solution = LpSolution(inst, flow, times, objective_value)
    _verify(lp, solution)
    reduced_obj = to_fraction(x[tvar[inst.sink]])
    if objective_value != reduced_obj:
        raise LpSolveError(
            f"internal inconsistency: forward pass {objective_value} vs simplex {reduced_obj}")
    return solution


def _verify(lp: LinearProgram, solution: LpSolution):
    """Re-check every original constraint in exact rational arithmetic."""
    meta = lp.meta
    values = {}
    for e, vi in meta.flow_var.items():
        values[vi] = solution.flow.get(e, Fraction(0))
    for v, vi in meta.time_var.items():
        values[vi] = solution.event_time[v]
    for row in lp.rows:
        lhs = sum((Fraction(c) * values[i] for i, c in row.coeffs.items()), Fraction(0))
        ok = {"<=": lhs <= row.rhs, ">=": lhs >= row.rhs, "=": lhs == row.rhs}[row.sense]
        if not ok:
            raise LpSolveError(f"constraint {row.name} violated: {lhs} {row.sense} {row.rhs}",
                               certificate=row)
    for vi, val in values.items():
        if val < 0:
            raise LpSolveError(f"variable {lp.var_names[vi]} negative: {val}")


def per_job_summary(solution: LpSolution, trace) -> dict:
    """Per original job: total chain flow r* and max relaxed chain duration t*."""
    summary = {}
    for e, chains in trace.job_to_chain.items():
        total = Fraction(0)
        worst = Fraction(0)
        for c in chains:
            f = Fraction(solution.flow.get(c.first, Fraction(0)))
            total += f
            if c.delta > 0:
                d = c.zero_time * (1 - f / c.delta)
                if d < 0:
                    d = Fraction(0)
            else:
                d = c.zero_time
            worst = max(worst, d)
        summary[e] = (total, worst)
    return summary


# ---------------------------------------------------------------------------
# exact simplex with float64 warm start
# ---------------------------------------------------------------------------

def _standard_form(objective, rows, nvars):
    """-> (c, A, b, n_struct): min c.x, A x = b, x >= 0, slacks appended."""
    norm = []
    for coeffs, sense, rhs in rows:
        if sense == ">=":
            coeffs = {i: -c for i, c in coeffs.items()}
            rhs, sense = -rhs, "<="
        norm.append((coeffs, sense, rhs))
    nslack = sum(1 for _, sense, _ in norm if sense == "<=")
    n = nvars + nslack
    A, b = [], []
    c = [rat(0)] * n
    for i, v in objective.items():
        c[i] = rat(v)
    si = nvars
    for coeffs, sense, rhs in norm:
        row = [rat(0)] * n
        for i, v in coeffs.items():
            row[i] = rat(v)
        if sense == "<=":
            row[si] = rat(1)
            si += 1
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        A.append(row)
        b.append(rat(rhs))
    return c, A, b, nvars


def _float_simplex_basis(c, A, b):
    """Two-phase float64 tableau simplex; returns a candidate optimal basis."""
    m = len(A)
    n = len(A[0])
    Af = np.array([[float(v) for v in row] for row in A], dtype=np.float64)
    bf = np.array([float(v) for v in b], dtype=np.float64)
    cf = np.array([float(v) for v in c], dtype=np.float64)

    # phase 1: artificials for every row keep the code simple
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = Af
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = bf
    basis = list(range(n, n + m))
    T[m, :] = -T[:m, :].sum(axis=0)
    T[m, n:n + m] = 0.0
    _float_iterate(T, basis, allowed=n)
    if T[m, -1] < -1e-7:
        return None
    # drive artificials out of the basis where possible
    for r_i, bv in enumerate(basis):
        if bv >= n:
            piv = next((j for j in range(n) if abs(T[r_i, j]) > 1e-9), None)
            if piv is not None:
                _float_pivot(T, basis, r_i, piv)
    # phase 2
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[m, :n] = cf
    for r_i, bv in enumerate(basis):
        if bv < n:
            T2[m, :] -= cf[bv] * T2[r_i, :]
    _float_iterate(T2, basis, allowed=n)
    return basis


def _float_pivot(T, basis, r_i, j):
    T[r_i, :] /= T[r_i, j]
    col = T[:, j].copy()
    col[r_i] = 0.0
    T -= np.outer(col, T[r_i, :])
    basis[r_i] = j


def _float_iterate(T, basis, allowed):
    m = T.shape[0] - 1
    for _ in range(200 * (m + allowed)):
        obj = T[m, :allowed]
        j = int(np.argmin(obj))
        if obj[j] >= -_FLOAT_TOL:
            return
        col = T[:m, j]
        rhs = T[:m, -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(col > _FLOAT_TOL, rhs / col, np.inf)
        r_i = int(np.argmin(ratios))
        if not np.isfinite(ratios[r_i]):
            raise LpSolveError("float phase: LP appears unbounded")
        _float_pivot(T, basis, r_i, j)
    raise LpSolveError("float phase: iteration limit hit")


def _exact_solve_basis(c, A, b, basis, n_struct):
    """Solve for the given basis exactly; return (x, optimal?) or None if singular."""
    m = len(A)
    n = len(A[0])
    if len(set(basis)) != m or any(bv >= n for bv in basis):
        return None
    M = [[A[i][bv] for bv in basis] for i in range(m)]
    lu = _lu(M)
    if lu is None:
        return None
    xB = _lu_solve(lu, [b[i] for i in range(m)])
    if any(v < 0 for v in xB):
        return None, False
    yT = _lu_solve_transpose(lu, [c[bv] for bv in basis])
    inbase = set(basis)
    for j in range(n):
        if j in inbase:
            continue
        red = c[j] - sum(yT[i] * A[i][j] for i in range(m) if A[i][j])
        if red < 0:
            return None, False
    x = [rat(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = xB[i]
    return x, True


def _lu(M):
    """In-place fraction Gaussian elimination with row pivoting; None if singular."""
    m = len(M)
    M = [row[:] for row in M]
    perm = list(range(m))
    for k in range(m):
        piv = next((i for i in range(k, m) if M[i][k] != 0), None)
        if piv is None:
            return None
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            perm[k], perm[piv] = perm[piv], perm[k]
        inv = 1 / M[k][k]
        for i in range(k + 1, m):
            if M[i][k] != 0:
                factor = M[i][k] * inv
                M[i][k] = factor
                row_i, row_k = M[i], M[k]
                for j in range(k + 1, m):
                    if row_k[j]:
                        row_i[j] -= factor * row_k[j]
    return M, perm


def _lu_solve(lu, rhs):
    M, perm = lu
    m = len(M)
    y = [rhs[perm[i]] for i in range(m)]
    for i in range(m):
        for j in range(i):
            if M[i][j]:
                y[i] -= M[i][j] * y[j]
    for i in reversed(range(m)):
        for j in range(i + 1, m):
            if M[i][j]:
                y[i] -= M[i][j] * y[j]
        y[i] /= M[i][i]
    return y


def _lu_solve_transpose(lu, rhs):
    """Solve M^T y = rhs given the LU of M (with row permutation)."""
    M, perm = lu
    m = len(M)
    # M = P^-1 L U  =>  M^T = U^T L^T P ; solve U^T z = rhs, L^T w = z, y = P^T w
    z = rhs[:]
    for i in range(m):
        for j in range(i):
            if M[j][i]:
                z[i] -= M[j][i] * z[j]
        z[i] /= M[i][i]
    for i in reversed(range(m)):
        for j in range(i + 1, m):
            if M[j][i]:
                z[i] -= M[j][i] * z[j]
    y = [rat(0)] * m
    for i in range(m):
        y[perm[i]] = z[i]
    return y


def _exact_simplex(c, A, b):
    """From-scratch exact two-phase tableau simplex with Bland's rule."""
    m, n = len(A), len(A[0])
    # phase 1 tableau with artificials
    width = n + m + 1
    T = [[rat(0)] * width for _ in range(m + 1)]
    for i in range(m):
        for j in range(n):
            T[i][j] = A[i][j]
        T[i][n + i] = rat(1)
        T[i][-1] = b[i]
    basis = list(range(n, n + m))
    for j in range(width):
        T[m][j] = -sum(T[i][j] for i in range(m))
    for i in range(m):
        T[m][n + i] = rat(0)
    _exact_iterate(T, basis, allowed=n)
    if T[m][-1] < 0:
        raise LpSolveError("exact simplex: infeasible (phase 1)")
    for r_i, bv in enumerate(basis):
        if bv >= n:
            piv = next((j for j in range(n) if T[r_i][j] != 0), None)
            if piv is not None:
                _exact_pivot(T, basis, r_i, piv)
    T2 = [[T[i][j] for j in range(n)] + [T[i][-1]] for i in range(m)]
    obj = [c[j] for j in range(n)] + [rat(0)]
    for r_i, bv in enumerate(basis):
        if bv < n and c[bv] != 0:
            coef = c[bv]
            for j in range(n + 1):
                obj[j] -= coef * T2[r_i][j]
    T2.append(obj)
    _exact_iterate(T2, basis, allowed=n)
    x = [rat(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T2[i][-1]
    return x


def _exact_pivot(T, basis, r_i, j):
    inv = 1 / T[r_i][j]
    T[r_i] = [v * inv for v in T[r_i]]
    prow = T[r_i]
    for i in range(len(T)):
        if i != r_i and T[i][j] != 0:
            factor = T[i][j]
            T[i] = [a - factor * p for a, p in zip(T[i], prow)]
    basis[r_i] = j


def _exact_iterate(T, basis, allowed):
    m = len(T) - 1
    while True:
        j = next((jj for jj in range(allowed) if T[m][jj] < 0), None)  # Bland
        if j is None:
            return
        best, r_i = None, None
        for i in range(m):
            if T[i][j] > 0:
                ratio = T[i][-1] / T[i][j]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r_i]):
                    best, r_i = ratio, i
        if r_i is None:
            raise LpSolveError("exact simplex: LP is unbounded")
        _exact_pivot(T, basis, r_i, j)


def _exact_solve_min(objective, rows, nvars):
    """Minimize objective over rows; exact optimum via float warm start."""
    c, A, b, n_struct = _standard_form(objective, rows, nvars)
    basis = None
    try:
        basis = _float_simplex_basis(c, A, b)
    except LpSolveError:
        basis = None
    if basis is not None:
        res = _exact_solve_basis(c, A, b, basis, n_struct)
        if res is not None and res[0] is not None and res[1]:
            return res[0][:nvars]
    x = _exact_simplex(c, A, b)
    return x[:nvars]
