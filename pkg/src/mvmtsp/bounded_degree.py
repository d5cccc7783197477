"""Minimum-cost multigraph with N edges, at most m components and degrees >= rho - 1.

Two engines:

``exact``
    One integer program over pair multiplicities with a multicommodity
    arborescence flow enforcing the component bound.  When the numbers outgrow float
    precision the program is posed on offsets from the exact transportation
    optimum (degrees exactly rho, N edges), inside a window of +-(2n + 2)
    per pair.
``local``
    Forest-swap local search on ``c(F) + L(rho - 1 - deg_F, N - |F|)`` with
    ``L`` the fixed-size degree-lower-bounded subproblem.  Heuristic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import _milp
from .core import CostMatrix, InfeasibleError, Multigraph, StructureError, components, mg_sum
from .flows import TransportSpec, lb_fixed_size_multigraph, solve_transportation
from .graphkit import UnionFind, msf_m_components

ENGINES = ("exact", "local")
# below this edge count the program is posed on absolute multiplicities
FULL_LIMIT = 10**6


@dataclass(frozen=True)
class DegreeSpec:
    rho: Mapping[int, int]
    N: int
    max_components: int

    def __post_init__(self):
        if self.max_components < 1:
            raise StructureError("max_components must be positive")
        for v, r in self.rho.items():
            if r < 2 or r % 2:
                raise StructureError(f"rho({v}) = {r} must be even and >= 2")
        if sum(self.rho.values()) != 2 * self.N:
            raise StructureError("sum of rho must equal 2N")


def _check(costs: CostMatrix, spec: DegreeSpec) -> list[int]:
    n = costs.n
    if set(spec.rho) != set(range(n)):
        raise StructureError("rho must be given for every vertex")
    if spec.N < n - min(spec.max_components, n):
        raise InfeasibleError("N < n - m: too few edges to cover the vertices")
    return [spec.rho[v] - 1 for v in range(n)]


def bounded_degree_multigraph(
    costs: CostMatrix, spec: DegreeSpec, engine: str = "exact", stats: dict | None = None
) -> Multigraph:
    lb = _check(costs, spec)
    if engine == "exact":
        X = _exact(costs, spec, lb)
    elif engine == "local":
        X = _local(costs, spec, lb, stats)
    else:
        raise StructureError(f"unknown engine {engine!r}")
    return X


def _exact(costs: CostMatrix, spec: DegreeSpec, lb: list[int]) -> Multigraph:
    n = costs.n
    m = min(spec.max_components, n)
    rho = [spec.rho[v] for v in range(n)]
    if spec.N <= FULL_LIMIT:
        return _milp.solve_degree_program(costs, spec.N, lb, max_components=m, prefer=rho)
    base = solve_transportation(TransportSpec(costs, {v: r // 2 for v, r in spec.rho.items()}))
    return _milp.solve_degree_program(
        costs, spec.N, lb, max_components=m, base=base.to_dict(), window=2 * n + 2, prefer=rho
    )


def _value(costs, forest_edges, lb, N, n):
    deg = [0] * n
    for u, v in forest_edges:
        deg[u] += 1
        deg[v] += 1
    rest = {v: max(0, lb[v] - deg[v]) for v in range(n)}
    Y = lb_fixed_size_multigraph(costs, rest, N - len(forest_edges))
    return sum(costs(u, v) for u, v in forest_edges) + Y.cost(costs), Y


def _local(costs: CostMatrix, spec: DegreeSpec, lb: list[int], stats: dict | None) -> Multigraph:
    n = costs.n
    m = min(spec.max_components, n)
    F = list(msf_m_components(costs, range(n), m).edges)
    best, Y = _value(costs, F, lb, spec.N, n)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    steps = 0
    improved = True
    while improved:
        improved = False
        cand = []
        for i, e in enumerate(F):
            rest = F[:i] + F[i + 1:]
            uf = UnionFind(range(n))
            for a, b in rest:
                uf.union(a, b)
            Fset = set(F)
            for f in pairs:
                if f in Fset or uf.find(f[0]) == uf.find(f[1]):
                    continue
                cand.append((costs(*f) - costs(*e), i, f))
        cand.sort()
        for _, i, f in cand:
            G = F[:i] + F[i + 1:] + [f]
            val, Yg = _value(costs, G, lb, spec.N, n)
            if val < best:
                F, best, Y, improved = G, val, Yg, True
                steps += 1
                break
    if stats is not None:
        stats["local_steps"] = steps
    X = mg_sum(Multigraph(n, {e: 1 for e in F}), Y)
    return X


def contract_violations(costs: CostMatrix, spec: DegreeSpec, X: Multigraph) -> list[str]:
    """Checks (i)-(iii) of the bounded-degree contract; empty means satisfied."""
    out = []
    if X.total() != spec.N:
        out.append(f"edge count {X.total()} != {spec.N}")
    parts, unc = components(X)
    if unc:
        out.append(f"uncovered vertices {unc}")
    if len(parts) > spec.max_components:
        out.append(f"{len(parts)} components > {spec.max_components}")
    deg = X.dotted_degrees()
    for v, r in spec.rho.items():
        if deg[v] < r - 1:
            out.append(f"degree of {v} is {deg[v]} < {r - 1}")
    return out
