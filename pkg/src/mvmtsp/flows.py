"""Transportation lower bound and the fixed-size degree-lower-bounded subproblem."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import _milp
from .core import CostMatrix, Instance, Multigraph, StructureError

INF = float("inf")


@dataclass
class TransportSpec:
    costs: CostMatrix
    demand: Mapping[int, int]
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        for v, r in self.demand.items():
            if r < 0:
                raise StructureError(f"negative demand at {v}")
            if not 0 <= v < self.costs.n:
                raise StructureError(f"demand vertex {v} outside range")


def solve_transportation(spec: TransportSpec) -> Multigraph:
    """Minimum-cost multigraph with dotted degree exactly ``2 * demand(v)``.

    Bipartite uncapacitated transportation problem: supply copy ``u`` sends
    to demand copy ``v`` at cost ``c(uv)``; the diagonal arc is the
    self-loop.  Successive shortest paths with Dijkstra on reduced costs,
    each augmentation pushing its full bottleneck, so the number of rounds
    does not depend on the size of the demands.
    """
    c = spec.costs.c
    n = spec.costs.n
    supply = [int(spec.demand.get(v, 0)) for v in range(n)]
    need = list(supply)
    flow = [[0] * n for _ in range(n)]  # flow[u][v]: supply u -> demand v
    pi_l = [0] * n
    pi_r = [0] * n
    pi_s = pi_t = 0
    rounds = 0
    while any(supply):
        # dense Dijkstra on reduced costs over source, 2n copies and sink
        dl = [INF] * n
        dr = [INF] * n
        pl = [None] * n  # predecessor (right node) of a left node
        pr = [None] * n  # predecessor (left node) of a right node
        for u in range(n):
            if supply[u]:
                dl[u] = pi_s - pi_l[u]
        done_l = [False] * n
        done_r = [False] * n
        while True:
            best, side, node = INF, None, None
            for u in range(n):
                if not done_l[u] and dl[u] < best:
                    best, side, node = dl[u], 0, u
            for v in range(n):
                if not done_r[v] and dr[v] < best:
                    best, side, node = dr[v], 1, v
            if side is None:
                break
            if side == 0:
                u = node
                done_l[u] = True
                row = c[u]
                for v in range(n):
                    if not done_r[v]:
                        nd = best + row[v] + pi_l[u] - pi_r[v]
                        if nd < dr[v]:
                            dr[v], pr[v] = nd, u
            else:
                v = node
                done_r[v] = True
                for u in range(n):
                    if flow[u][v] and not done_l[u]:
                        nd = best - c[u][v] + pi_r[v] - pi_l[u]
                        if nd < dl[u]:
                            dl[u], pl[u] = nd, v
        target, tdist = None, INF
        for v in range(n):
            if need[v] and dr[v] + pi_r[v] - pi_t < tdist:
                target, tdist = v, dr[v] + pi_r[v] - pi_t
        if target is None:
            raise RuntimeError("transportation problem unbalanced")
        for u in range(n):
            pi_l[u] += min(dl[u], tdist)
        for v in range(n):
            pi_r[v] += min(dr[v], tdist)
        pi_t += tdist
        # walk back along the path, collecting the bottleneck
        path = []
        v = target
        while True:
            u = pr[v]
            path.append((u, v, +1))
            if pl[u] is None:
                start = u
                break
            v2 = pl[u]
            path.append((u, v2, -1))
            v = v2
        amount = min(supply[start], need[target])
        for u, v, sign in path:
            if sign < 0:
                amount = min(amount, flow[u][v])
        for u, v, sign in path:
            flow[u][v] += sign * amount
        supply[start] -= amount
        need[target] -= amount
        rounds += 1
    spec.stats["augmentations"] = rounds
    x: dict = {}
    for u in range(n):
        for v in range(n):
            f = flow[u][v]
            if f:
                key = (u, v) if u <= v else (v, u)
                x[key] = x.get(key, 0) + f
    # the diagonal arc carries one loop per unit; off-diagonal pairs add up
    return Multigraph(n, x)


def tp_lower_bound(instance: Instance) -> int:
    """Cost of the transportation relaxation on the city requests (depots demand 0)."""
    X = solve_transportation(TransportSpec(instance.costs, instance.requests))
    return X.cost(instance.costs)


def lb_fixed_size_multigraph(
    costs: CostMatrix, deg_lb: Mapping[int, int], N: int
) -> Multigraph:
    """Minimum-cost multigraph with exactly ``N`` edges and dotted degree >= ``deg_lb``."""
    n = costs.n
    lb = [max(0, int(deg_lb.get(v, 0))) for v in range(n)]
    need = (sum(lb) + 1) // 2
    if N < need:
        raise StructureError(f"{N} edges cannot meet degree lower bounds summing to {sum(lb)}")
    if N <= _milp.SAFE // 4:
        return _milp.solve_degree_program(costs, N, lb)
    # huge numbers: exact big-int base, then a small window of corrections
    base = solve_transportation(TransportSpec(costs, {v: (b + 1) // 2 for v, b in enumerate(lb)}))
    x = base.to_dict()
    extra = N - base.total()
    if extra > 0:
        e = min(_milp.pairs(n), key=lambda e: (costs(*e), e))
        x[e] = x.get(e, 0) + extra
    return _milp.solve_degree_program(costs, N, lb, base=x, window=2 * n + 2)
