"""Degree-constrained multigraph integer programs on HiGHS.

Every variable is the multiplicity of a vertex pair.  HiGHS works in floating
point, so callers with huge numbers pass an exact big-int ``base`` and a
``window``; the program then only decides the small offsets ``x - base``.
The rounded answer is re-checked exactly before it is returned.

The component bound uses a directed multicommodity flow: the support must
contain an arborescence hung from an extra root of out-degree at most m.
Its LP relaxation is integral on the arborescence part, which keeps the
branch and bound small even at n = 20.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .core import CostMatrix, InfeasibleError, Multigraph, components

# above this magnitude a float64 no longer represents every integer offset
SAFE = 2**40
# budget for the optional degree-surplus tie-break stage
PREFER_SECONDS = 0.5


def pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u, n)]


class _Program:
    def __init__(self):
        self.lo, self.hi, self.integ, self.obj = [], [], [], []
        self.rows, self.cols, self.vals = [], [], []
        self.rlo, self.rhi = [], []

    def var(self, lo, hi, integer=True, obj=0.0) -> int:
        self.lo.append(lo); self.hi.append(hi)
        self.integ.append(1 if integer else 0); self.obj.append(obj)
        return len(self.lo) - 1

    def row(self, coeffs: dict, lo=-np.inf, hi=np.inf) -> None:
        r = len(self.rlo)
        for j, a in coeffs.items():
            self.rows.append(r); self.cols.append(j); self.vals.append(a)
        self.rlo.append(lo); self.rhi.append(hi)

    def solve(self, obj=None, time_limit=None):
        A = coo_matrix((self.vals, (self.rows, self.cols)), shape=(len(self.rlo), len(self.lo))).tocsr()
        opts = {"presolve": True, "mip_rel_gap": 0.0}
        if time_limit is not None:
            opts["time_limit"] = time_limit
        res = milp(
            c=np.array(self.obj if obj is None else obj, float),
            constraints=LinearConstraint(A, np.array(self.rlo, float), np.array(self.rhi, float)),
            integrality=np.array(self.integ),
            bounds=Bounds(np.array(self.lo, float), np.array(self.hi, float)),
            options=opts,
        )
        if res.x is None:
            if res.status == 1:
                raise TimeoutError(f"no incumbent within the time limit ({res.message})")
            raise InfeasibleError(f"degree program has no solution ({res.message})")
        return res.x


def solve_degree_program(
    costs: CostMatrix,
    total: int,
    deg_lb,
    *,
    max_components: int | None = None,
    base: dict | None = None,
    window: int | None = None,
    time_limit: float | None = None,
    prefer: list[int] | None = None,
) -> Multigraph:
    """min cost(x) s.t. sum(x) = total, dotted_degree(v) >= deg_lb[v],
    and, if ``max_components`` is set, at most that many support components
    (uncovered vertices count as components).  ``prefer`` breaks cost ties
    toward degrees exceeding ``prefer[v]`` as little as possible.
    """
    n = costs.n
    P = pairs(n)
    nx = len(P)
    base = dict(base or {})
    deg_base = [0] * n
    for (u, v), k in base.items():
        deg_base[u] += k
        deg_base[v] += k
    rhs_total = total - sum(base.values())
    rhs_deg = [deg_lb[v] - deg_base[v] for v in range(n)]
    if window is not None:
        # offsets move a degree by at most 2 * window * n, so a bound further
        # below is redundant and only needs to stay representable
        rhs_deg = [max(x, -2 * window * (n + 1)) for x in rhs_deg]
    prog = _Program()
    for e in P:
        t = base.get(e, 0)
        lo, hi = (-t, max(0, total - t)) if window is None else (-min(t, window), window)
        for x in (lo, hi):
            if abs(x) > SAFE:
                raise OverflowError("integer program offsets exceed float precision; pass a base")
        prog.var(lo, hi, obj=float(costs(*e)))
    for x in [rhs_total, *rhs_deg]:
        if abs(x) > SAFE:
            raise OverflowError("integer program offsets exceed float precision; pass a base")

    def degree_row(v):
        return {i: (2.0 if a == b else 1.0) for i, (a, b) in enumerate(P) if v in (a, b)}

    prog.row({i: 1.0 for i in range(nx)}, rhs_total, rhs_total)
    for v in range(n):
        prog.row(degree_row(v), rhs_deg[v])

    if max_components is not None:
        # pairs whose multiplicity can never reach zero keep their endpoints
        # together, so the arborescence only has to span the contracted groups
        group = list(range(n))

        def find(v):
            while group[v] != v:
                group[v] = group[group[v]]
                v = group[v]
            return v

        if window is not None:
            for (a, b), t in base.items():
                if a != b and t > window:
                    group[find(a)] = find(b)
        heads = sorted({find(v) for v in range(n)})
        gi = {h: i for i, h in enumerate(heads)}
        g = len(heads)
        between: dict = {}
        for i, (a, b) in enumerate(P):
            ga, gb = gi[find(a)], gi[find(b)]
            if ga != gb:
                between.setdefault((min(ga, gb), max(ga, gb)), []).append(i)
        if g > max_components:
            root = g
            arcs = [(a, b) for a, b in between] + [(b, a) for a, b in between]
            arcs += [(root, v) for v in range(g)]
            y = {arc: prog.var(0, 1) for arc in arcs}
            for v in range(g):
                prog.row({y[arc]: 1.0 for arc in arcs if arc[1] == v}, 1, 1)
            prog.row({y[(root, v)]: 1.0 for v in range(g)}, hi=max_components)
            for (a, b), idx in between.items():
                # a tree arc needs an edge copy between the two groups
                row = {y[(a, b)]: 1.0, y[(b, a)]: 1.0}
                row.update({i: -1.0 for i in idx})
                prog.row(row, hi=sum(base.get(P[i], 0) for i in idx))
            for k in range(g):
                # one unit from the root to k along arborescence arcs
                f = {arc: prog.var(0, 1, integer=False) for arc in arcs if arc[0] != k}
                for arc, j in f.items():
                    prog.row({j: 1.0, y[arc]: -1.0}, hi=0)
                for v in range(g):
                    row = {}
                    for arc, j in f.items():
                        if arc[1] == v:
                            row[j] = row.get(j, 0.0) + 1.0
                        if arc[0] == v:
                            row[j] = row.get(j, 0.0) - 1.0
                    need = 1.0 if v == k else 0.0
                    prog.row(row, need, need)

    def assemble(sol) -> Multigraph:
        x = {}
        for i, e in enumerate(P):
            k = base.get(e, 0) + int(round(sol[i]))
            if k:
                x[e] = k
        return Multigraph(n, x)

    X = assemble(prog.solve(time_limit=time_limit))

    if prefer is not None and any(d > prefer[v] for v, d in enumerate(X.dotted_degrees())):
        # among cost-optimal answers, least degree surplus over ``prefer``
        best = X.cost(costs) - sum(costs(*e) * k for e, k in base.items())
        prog.row({i: float(costs(*e)) for i, e in enumerate(P)}, hi=best + 0.5)
        svars = []
        for v in range(n):
            s = prog.var(0, np.inf, integer=False)
            svars.append(s)
            row = degree_row(v)
            row[s] = -1.0
            prog.row(row, hi=max(prefer[v] - deg_base[v], -2 * SAFE))
        obj2 = [0.0] * len(prog.lo)
        for s in svars:
            obj2[s] = 1.0
        surplus = lambda G: sum(max(0, d - prefer[v]) for v, d in enumerate(G.dotted_degrees()))
        try:
            Y = assemble(prog.solve(obj2, PREFER_SECONDS))
            if Y.cost(costs) == X.cost(costs) and surplus(Y) < surplus(X):
                X = Y
        except (InfeasibleError, TimeoutError):
            pass  # tie-break found nothing in time; keep the first answer

    # exact re-check of what HiGHS promised
    if X.total() != total:
        raise RuntimeError("integer program returned a wrong edge count")
    deg = X.dotted_degrees()
    if any(deg[v] < deg_lb[v] for v in range(n)):
        raise RuntimeError("integer program violated a degree bound")
    if max_components is not None:
        parts, unc = components(X)
        if len(parts) + len(unc) > max_components:
            raise RuntimeError("integer program violated the component bound")
    return X
