"""The six approximation algorithms, the agent-count sweep and the solving facade."""
from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field

from .bounded_degree import DegreeSpec, bounded_degree_multigraph
from .core import (
    CostMatrix,
    InfeasibleError,
    Instance,
    Multigraph,
    Solution,
    StructureError,
    components,
    edge_key,
    mg_sum,
)
from .flows import TransportSpec, solve_transportation, tp_lower_bound
from .forests import cerdeira_forest, constrained_spanning_multigraph
from .graphkit import double_and_shortcut_cycle, msf_m_components, reduce_degrees

FACTORS = {"alg1": 4, "alg2": 3, "alg3": 4, "alg4": 4, "alg5": 2, "alg6": 2}
AUTO = {"P1": "alg1", "P2": "alg3", "P3": "alg5", "P4": "alg5",
        "P5": "alg2", "P6": "alg4", "P7": "alg6", "P8": "alg6"}
ALGORITHMS = tuple(FACTORS) + ("sweep",)
# beyond this many depot subsets the sweep picks depots greedily
SUBSET_LIMIT = 256


@dataclass
class SolveReport:
    solution: Solution
    algorithm: str
    claimed_factor: int
    lower_bound_used: int
    wall_time: float
    stats: dict = field(default_factory=dict)


def _report(instance, solution, algorithm, factor, t0, stats=None) -> SolveReport:
    return SolveReport(
        solution, algorithm, factor, tp_lower_bound(instance), time.perf_counter() - t0, stats or {}
    )


def _need(instance: Instance, *variants):
    if instance.variant not in variants:
        raise StructureError(f"expected variant in {variants}, got {instance.variant}")


def _loops_onto(tours: list[dict], owner: dict[int, int], instance: Instance) -> None:
    """Add r(v) - 1 self-loops at v to the tour that ``owner`` assigns it."""
    for v in instance.cities:
        extra = instance.requests[v] - 1
        if extra:
            t = tours[owner[v]]
            t[(v, v)] = t.get((v, v), 0) + extra


def _forest_tours(instance: Instance, parts) -> list[Multigraph]:
    """Cycles H_i from forest components plus the surplus self-loops."""
    n = instance.n
    tours = []
    owner = {}
    for i, (verts, eds) in enumerate(parts):
        tours.append(double_and_shortcut_cycle(verts, eds, instance.costs).to_dict())
        for v in verts:
            owner.setdefault(v, i)
    _loops_onto(tours, owner, instance)
    return [Multigraph(n, t) for t in tours]


def _loop_partition(instance: Instance) -> list[Multigraph]:
    """m > n: split the r(v) self-loop copies into m non-empty single-vertex groups."""
    m, n = instance.agents, instance.n
    k = {v: 1 for v in range(n)}
    heap = [(-(instance.requests[v] - 1), v) for v in range(n)]
    heapq.heapify(heap)
    for _ in range(m - n):
        free, v = heapq.heappop(heap)
        k[v] += 1
        heapq.heappush(heap, (free + 1, v))
    tours = []
    for v in range(n):
        q, extra = divmod(instance.requests[v], k[v])
        for j in range(k[v]):
            tours.append(Multigraph(n, {(v, v): q + (1 if j < extra else 0)}))
    return tours


def solve_p1(instance: Instance) -> SolveReport:
    """4-approximation, no depots, non-empty tours that may overlap."""
    _need(instance, "P1")
    t0 = time.perf_counter()
    m, n = instance.agents, instance.n
    if m > instance.total_requests:
        raise InfeasibleError("m > r(V)")
    if m > n:
        tours = _loop_partition(instance)
    else:
        F = msf_m_components(instance.costs, range(n), m)
        tours = _forest_tours(instance, F.parts())
    return _report(instance, Solution.build(tours, "P1", instance.costs), "alg1", 4, t0)


def solve_p2(instance: Instance) -> SolveReport:
    """4-approximation, no depots, non-empty vertex-disjoint tours."""
    _need(instance, "P2")
    t0 = time.perf_counter()
    m, n = instance.agents, instance.n
    if m > n:
        raise InfeasibleError("m > |V|")
    F = msf_m_components(instance.costs, range(n), m)
    tours = _forest_tours(instance, F.parts())
    return _report(instance, Solution.build(tours, "P2", instance.costs), "alg3", 4, t0)


def solve_p6(instance: Instance) -> SolveReport:
    """4-approximation, depots, non-empty vertex-disjoint tours."""
    _need(instance, "P6")
    t0 = time.perf_counter()
    D = instance.depots
    if len(D) > len(instance.cities):
        raise InfeasibleError("m > |V̄|")
    df = cerdeira_forest(instance.costs, range(instance.n), D)
    parts = df.forest.parts()
    by_depot = {df.depot_of[i]: p for i, p in enumerate(parts)}
    tours = _forest_tours(instance, [by_depot[d] for d in D])
    return _report(instance, Solution.build(tours, "P6", instance.costs), "alg4", 4, t0)


def solve_p5(instance: Instance) -> SolveReport:
    """3-approximation, depots, non-empty tours that may overlap."""
    _need(instance, "P5")
    t0 = time.perf_counter()
    n, D = instance.n, instance.depots
    if len(D) > instance.total_requests:
        raise InfeasibleError("m > r(V̄)")
    S = constrained_spanning_multigraph(instance)
    tours = []
    hits = {v: 0 for v in instance.cities}
    for depot, verts, eds in S.parts:
        tours.append(double_and_shortcut_cycle(verts, eds, instance.costs).to_dict())
        for v in verts:
            if v in hits:
                hits[v] += 1
    residual = {v: instance.requests[v] - hits[v] for v in instance.cities}
    if min(residual.values(), default=0) < 0:
        raise RuntimeError("city lies in more components than its request")
    TP = solve_transportation(TransportSpec(instance.costs, residual))
    parts, _ = components(TP)
    for verts in parts:
        vs = set(verts)
        i = next(i for i, t in enumerate(tours) if any(a in vs or b in vs for a, b in t))
        for e in TP.restrict(vs).items():
            tours[i][e[0]] = tours[i].get(e[0], 0) + e[1]
    tours = [Multigraph(n, t) for t in tours]
    return _report(instance, Solution.build(tours, "P5", instance.costs), "alg2", 3, t0)


def _double_and_reduce(X: Multigraph, costs: CostMatrix, rho: dict, anchor=None, stats=None):
    return reduce_degrees(X.scaled(2), costs, rho, anchor=anchor, stats=stats)


def solve_p3(instance: Instance, bd_engine: str = "exact") -> SolveReport:
    """2-approximation, no depots, empty tours allowed (serves P4 as well)."""
    _need(instance, "P3", "P4")
    t0 = time.perf_counter()
    n, m = instance.n, instance.agents
    rho = {v: 2 * instance.requests[v] for v in range(n)}
    spec = DegreeSpec(rho, instance.total_requests, m)
    Xp = bounded_degree_multigraph(instance.costs, spec, engine=bd_engine)
    stats: dict = {}
    parts, _ = components(Xp)
    tours = []
    for verts in parts:
        comp = Xp.restrict(verts)
        tours.append(_double_and_reduce(comp, instance.costs, {v: rho[v] for v in verts}, stats=stats))
    tours += [Multigraph(n)] * (m - len(tours))
    sol = Solution.build(tours, instance.variant, instance.costs)
    return _report(instance, sol, "alg5", 2, t0, stats)


def _meta_instance(instance: Instance):
    """Contract the depots into one vertex placed last; returns costs, maps."""
    D = instance.depots
    cities = instance.cities
    c = instance.costs
    nearest = {v: min(D, key=lambda d: (c(d, v), d)) for v in cities}
    loop_opts = [(c(d, d), (d, d)) for d in D] + [
        (c(a, b), edge_key(a, b)) for a, b in itertools.combinations(D, 2)
    ]
    loop_cost, loop_edge = min(loop_opts)
    k = len(cities)
    rows = [[c(u, v) for v in cities] + [c(nearest[u], u)] for u in cities]
    rows.append([c(nearest[v], v) for v in cities] + [loop_cost])
    return CostMatrix(rows), cities, nearest, loop_edge


def solve_p7(instance: Instance, bd_engine: str = "exact") -> SolveReport:
    """2-approximation, depots, empty tours allowed (serves P8 as well)."""
    _need(instance, "P7", "P8")
    t0 = time.perf_counter()
    n, D = instance.n, instance.depots
    m = len(D)
    if not instance.cities:
        sol = Solution.build([Multigraph(n)] * m, instance.variant, instance.costs)
        return _report(instance, sol, "alg6", 2, t0)
    mc, cities, nearest, loop_edge = _meta_instance(instance)
    k = len(cities)
    hat = k  # meta-depot index in the contracted instance
    dset = set(D)
    best = None
    stats = {"updates": 0, "mu": None}
    for mu in range(1, m + 1):
        rho = {i: 2 * instance.requests[v] for i, v in enumerate(cities)}
        rho[hat] = 2 * mu
        spec = DegreeSpec(rho, instance.total_requests + mu, 1)
        Xh = bounded_degree_multigraph(mc, spec, engine=bd_engine).scaled(2)
        # expand the meta-depot edges to the nearest real depot
        x: dict = {}
        for (a, b), mult in Xh.items():
            if a == hat and b == hat:
                e = loop_edge
            elif b == hat:
                e = edge_key(cities[a], nearest[cities[a]])
            else:
                e = edge_key(cities[a], cities[b])
            x[e] = x.get(e, 0) + mult
        X = Multigraph(n, x)
        tours = {}
        parts, _ = components(X)
        run_stats: dict = {}
        for verts in parts:
            if not any(v not in dset for v in verts):
                continue  # depot-only component: an empty tour is cheaper
            depots_here = [d for d in D if d in verts]
            keep = depots_here[0]
            target = {v: (2 * instance.requests[v] if v not in dset else 0) for v in verts}
            target[keep] = 2
            T = reduce_degrees(X.restrict(verts), instance.costs, target, anchor=keep, stats=run_stats)
            tours[keep] = T
        agent_tours = [tours.get(d, Multigraph(n)) for d in D]
        sol = Solution.build(agent_tours, instance.variant, instance.costs)
        if best is None or sol.total_cost < best.total_cost:
            best = sol
            stats["mu"] = mu
        stats["updates"] += run_stats.get("updates", 0)
    return _report(instance, best, "alg6", 2, t0, stats)


BASE = {"P1": solve_p1, "P2": solve_p2, "P5": solve_p5, "P6": solve_p6}
SWEEP_BASE = {"P3": "P1", "P4": "P2", "P7": "P5", "P8": "P6"}


def _sub_instance(instance: Instance, chosen: tuple[int, ...], variant: str):
    keep = sorted(set(instance.cities) | set(chosen))
    pos = {v: i for i, v in enumerate(keep)}
    sub = Instance(
        instance.costs.submatrix(keep),
        {pos[v]: r for v, r in instance.requests.items()},
        tuple(pos[d] for d in chosen),
        len(chosen),
        variant,
    )
    return sub, keep


def _lift(T: Multigraph, keep: list[int], n: int) -> Multigraph:
    return Multigraph(n, {(keep[a], keep[b]): k for (a, b), k in T.items()})


def _depot_subsets(instance: Instance, ell: int):
    D = instance.depots
    total = sum(1 for _ in itertools.islice(itertools.combinations(D, ell), SUBSET_LIMIT + 1))
    if total <= SUBSET_LIMIT:
        return list(itertools.combinations(D, ell))
    c = instance.costs
    near = sorted(D, key=lambda d: (min(c(d, v) for v in instance.cities), d))
    return [tuple(sorted(near[:ell], key=D.index))]


def sweep_reduction(instance: Instance, base: str | None = None) -> SolveReport:
    """Run the non-empty-tour algorithm for every agent count and keep the cheapest."""
    _need(instance, "P3", "P4", "P7", "P8")
    t0 = time.perf_counter()
    base = base or SWEEP_BASE[instance.variant]
    if base not in BASE:
        raise StructureError(f"unknown base variant {base}")
    solver = BASE[base]
    n, m = instance.n, instance.agents
    best, best_ell = None, None
    if instance.depots:
        if base not in ("P5", "P6"):
            raise StructureError("depot instances sweep over P5 or P6")
        if not instance.cities:
            sol = Solution.build([Multigraph(n)] * m, instance.variant, instance.costs)
            return _report(instance, sol, "sweep", 3 if base == "P5" else 4, t0)
        D = instance.depots
        for ell in range(1, m + 1):
            for chosen in _depot_subsets(instance, ell):
                sub, keep = _sub_instance(instance, chosen, base)
                try:
                    rep = solver(sub)
                except InfeasibleError:
                    continue
                lifted = dict(zip(chosen, (_lift(T, keep, n) for T in rep.solution.agent_tours)))
                tours = [lifted.get(d, Multigraph(n)) for d in D]
                sol = Solution.build(tours, instance.variant, instance.costs)
                if best is None or sol.total_cost < best.total_cost:
                    best, best_ell = sol, ell
    else:
        if base not in ("P1", "P2"):
            raise StructureError("unrestricted instances sweep over P1 or P2")
        for ell in range(1, m + 1):
            sub = instance.with_variant(base, agents=ell)
            try:
                rep = solver(sub)
            except InfeasibleError:
                continue
            tours = list(rep.solution.agent_tours) + [Multigraph(n)] * (m - ell)
            sol = Solution.build(tours, instance.variant, instance.costs)
            if best is None or sol.total_cost < best.total_cost:
                best, best_ell = sol, ell
    if best is None:
        raise InfeasibleError("no agent count admits a solution")
    factor = FACTORS[{"P1": "alg1", "P2": "alg3", "P5": "alg2", "P6": "alg4"}[base]]
    return _report(instance, best, "sweep", factor, t0, {"ell": best_ell, "base": base})


def solve(instance: Instance, algorithm: str = "auto", bd_engine: str = "exact") -> SolveReport:
    alg = AUTO[instance.variant] if algorithm == "auto" else algorithm
    if alg == "sweep":
        return sweep_reduction(instance)
    expected = {"alg1": ("P1",), "alg3": ("P2",), "alg2": ("P5",), "alg4": ("P6",),
                "alg5": ("P3", "P4"), "alg6": ("P7", "P8")}
    if alg not in expected:
        raise StructureError(f"unknown algorithm {algorithm!r}")
    if instance.variant not in expected[alg]:
        raise StructureError(f"{alg} does not solve {instance.variant}")
    if alg == "alg1":
        return solve_p1(instance)
    if alg == "alg2":
        return solve_p5(instance)
    if alg == "alg3":
        return solve_p2(instance)
    if alg == "alg4":
        return solve_p6(instance)
    if alg == "alg5":
        return solve_p3(instance, bd_engine)
    return solve_p7(instance, bd_engine)
