"""Certificate verifier and exhaustive exact optimum for desk-scale instances.

The oracle shares no code with the approximation algorithms beyond the core
types: it enumerates aggregate multigraphs vertex by vertex with a simple
half-cost bound, and decides each variant's tour structure by search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    DEPOT_VARIANTS,
    DISJOINT,
    EMPTY_ALLOWED,
    VARIANTS,
    Instance,
    InfeasibleError,
    Multigraph,
    ScaleGuardError,
    Solution,
    components,
    edge_key,
)

MAX_N, MAX_R, MAX_M = 8, 4, 4


# ------------------------------------------------------------- verifier


def verify_solution(instance: Instance, solution: Solution) -> list[str]:
    """Every violated requirement of the instance's variant; empty means feasible."""
    out: list[str] = []
    n, m, var = instance.n, instance.agents, instance.variant
    tours = solution.agent_tours
    if len(tours) != m:
        return [f"agents: {len(tours)} tours for {m} agents"]
    for i, T in enumerate(tours):
        if T.universe != n:
            return [f"universe: tour {i} lives on {T.universe} vertices, expected {n}"]
    cost = sum(T.cost(instance.costs) for T in tours)
    if solution.total_cost != cost:
        out.append(f"cost: declared {solution.total_cost}, actual {cost}")
    deg = [0] * n
    for T in tours:
        for v, d in enumerate(T.dotted_degrees()):
            deg[v] += d
    for v in instance.cities:
        if deg[v] != 2 * instance.requests[v]:
            out.append(f"degree: vertex {v} has {deg[v]}, expected {2 * instance.requests[v]}")
    dset = set(instance.depots)
    nonempty = []
    for i, T in enumerate(tours):
        if not T:
            if var not in EMPTY_ALLOWED:
                out.append(f"empty: tour {i} is empty")
            continue
        nonempty.append(i)
        parts, _ = components(T)
        if len(parts) != 1:
            out.append(f"connectivity: tour {i} has {len(parts)} components")
        odd = [v for v, d in enumerate(T.dotted_degrees()) if d % 2]
        if odd:
            out.append(f"parity: tour {i} has odd degree at {odd}")
        if var in DEPOT_VARIANTS:
            vs = T.vertices()
            here = sorted(vs & dset)
            if here != [instance.depots[i]]:
                out.append(f"depot: tour {i} contains depots {here}, expected [{instance.depots[i]}]")
            if not vs - dset:
                out.append(f"depot: tour {i} visits no city")
    if var in DISJOINT:
        seen: dict[int, int] = {}
        for i in nonempty:
            for v in tours[i].vertices():
                if v in seen:
                    out.append(f"disjoint: tours {seen[v]} and {i} share vertex {v}")
                else:
                    seen[v] = i
    return out


# ----------------------------------------------------- structure checks


def _simple_cycles(edges: dict):
    """Yield simple cycles (as edge lists, length >= 3) of a simple graph."""
    adj: dict[int, list[int]] = {}
    for (a, b), k in edges.items():
        if k and a != b:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    for s in sorted(adj):
        # cycles whose smallest vertex is s
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            for w in adj[v]:
                if w == s and len(path) >= 3 and path[1] < path[-1]:
                    yield [edge_key(path[i], path[i + 1]) for i in range(len(path) - 1)] + [edge_key(path[-1], s)]
                elif w > s and w not in path:
                    stack.append((w, path + [w]))


def cycle_packing(X: dict, cap: int) -> int:
    """Max number of edge-disjoint cycles in an even multigraph, capped at ``cap``.

    Loops and digons are always part of some maximum packing, so only the
    simple remainder needs search.
    """
    count = 0
    rest = {}
    for (a, b), k in X.items():
        if a == b:
            count += k
        else:
            count += k // 2
            if k % 2:
                rest[(a, b)] = 1
    if count >= cap:
        return cap
    return count + _pack_simple(rest, cap - count)


def _pack_simple(E: dict, cap: int) -> int:
    if cap <= 0 or not E:
        return 0
    best = 0
    for cyc in _simple_cycles(E):
        F = dict(E)
        for e in cyc:
            del F[e]
        best = max(best, 1 + _pack_simple(F, cap - 1))
        if best >= cap:
            return cap
        # every maximum packing uses some cycle through the first edge or
        # leaves it unused; trying all cycles is exhaustive at this size
    return best


def _paths(adj_mult: dict, a: int, b: int):
    """Simple a-b paths in a multigraph given as {edge: mult}; yields edge lists."""
    adj: dict[int, list[int]] = {}
    for (u, v), k in adj_mult.items():
        if k and u != v:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
    if a == b:
        yield []
        return
    stack = [(a, [a])]
    while stack:
        v, path = stack.pop()
        for w in sorted(adj.get(v, ())):
            if w == b:
                p = path + [w]
                yield [edge_key(p[i], p[i + 1]) for i in range(len(p) - 1)]
            elif w not in path:
                stack.append((w, path + [w]))


def _depot_split(X: dict, depots: list[int], dset: set):
    """Edge-disjoint closed walks W_d through each depot d, avoiding other depots.

    Returns one walk (edge multiset) per depot, or None if impossible.
    """
    city = {e: k for e, k in X.items() if e[0] not in dset and e[1] not in dset}
    ends = {}
    for d in depots:
        nb = []
        for (a, b), k in X.items():
            if d in (a, b):
                nb += [b if a == d else a] * k
        if len(nb) != 2:
            return None
        ends[d] = nb

    def rec(i, H):
        if i == len(depots):
            return []
        d = depots[i]
        a, b = ends[d]
        for p in _paths(H, a, b):
            H2 = dict(H)
            for e in p:
                H2[e] -= 1
            tail = rec(i + 1, H2)
            if tail is not None:
                return [p] + tail
        return None

    found = rec(0, city)
    if found is None:
        return None
    walks = []
    for d, p in zip(depots, found):
        w: dict = {}
        for e in p + [edge_key(d, ends[d][0]), edge_key(d, ends[d][1])]:
            w[e] = w.get(e, 0) + 1
        walks.append(w)
    return walks


def _attach_rest(X: dict, parts: list[dict], n: int) -> list[dict]:
    """Give every leftover component of ``X - sum(parts)`` to a part touching it."""
    left = dict(X)
    for p in parts:
        for e, k in p.items():
            left[e] -= k
    R = Multigraph(n, {e: k for e, k in left.items() if k})
    comps, _ = components(R)
    parts = [dict(p) for p in parts]
    pending = [set(c) for c in comps]
    while pending:
        progress = False
        for c in list(pending):
            for p in parts:
                if any(a in c or b in c for a, b in p):
                    for e, k in R.restrict(c).items():
                        p[e] = p.get(e, 0) + k
                    pending.remove(c)
                    progress = True
                    break
        if not progress:
            raise RuntimeError("leftover component touches no tour")
    return parts


def _split_into(X: dict, t: int, n: int) -> list[dict]:
    """Split a connected even multigraph into exactly t connected even parts."""
    parts = []
    rest = dict(X)
    for (a, b), k in list(rest.items()):
        while len(parts) < t - 1 and a == b and rest[(a, b)]:
            parts.append({(a, b): 1}); rest[(a, b)] -= 1
        while len(parts) < t - 1 and a != b and rest[(a, b)] >= 2:
            parts.append({(a, b): 2}); rest[(a, b)] -= 2
    if len(parts) < t - 1:
        simple = {e: 1 for e, k in rest.items() if k % 2 and e[0] != e[1]}
        need = t - 1 - len(parts)
        chosen = _find_packing(simple, need)
        for cyc in chosen:
            parts.append({e: 1 for e in cyc})
            for e in cyc:
                rest[e] -= 1
    R = Multigraph(n, {e: k for e, k in rest.items() if k})
    comps, _ = components(R)
    parts.append(R.restrict(comps[0]).to_dict())
    return _attach_rest(X, parts, n)


def _find_packing(E: dict, need: int):
    if need == 0:
        return []
    for cyc in _simple_cycles(E):
        F = dict(E)
        for e in cyc:
            del F[e]
        rest = _find_packing(F, need - 1)
        if rest is not None:
            return [cyc] + rest
    return None


# ------------------------------------------------------ variant checks


def _structure(variant: str, X: dict, comps, m: int, depots, dset, deg, n):
    """Per-agent tours if X is feasible for ``variant``, else None."""
    k = len(comps)
    if variant in ("P2", "P4") or variant in ("P1", "P3"):
        if variant == "P2" and k != m:
            return None
        if k > m:
            return None
        tours = [Multigraph(n, X).restrict(c).to_dict() for c in comps]
        if variant == "P1" and k < m:
            caps = [cycle_packing(t, m) for t in tours]
            if sum(caps) < m:
                return None
            want = []
            left = m - k
            for c in caps:
                extra = min(c - 1, left)
                want.append(1 + extra)
                left -= extra
            split = []
            for t, w in zip(tours, want):
                split += _split_into(t, w, n) if w > 1 else [t]
            tours = split
        return tours + [{}] * (m - len(tours))
    # depot variants; depot loops and depot-depot edges never occur here
    if variant in ("P5", "P6") and any(deg[d] != 2 for d in depots):
        return None
    by_depot: dict[int, dict] = {}
    for c in comps:
        cs = set(c)
        here = [d for d in depots if d in cs]
        if not here:
            return None
        if variant in ("P6", "P8") and len(here) != 1:
            return None
        sub = Multigraph(n, X).restrict(c).to_dict()
        if len(here) == 1:
            by_depot[here[0]] = sub
            continue
        walks = _depot_split(sub, here, dset)
        if walks is None:
            return None
        for d, w in zip(here, _attach_rest(sub, walks, n)):
            by_depot[d] = w
    return [by_depot.get(d, {}) for d in depots]


# ------------------------------------------------------------ the oracle


@dataclass
class OracleResult:
    cost: int
    solution: Solution


def _guard(instance: Instance):
    if instance.n > MAX_N or instance.agents > MAX_M or max(instance.requests.values(), default=0) > MAX_R:
        raise ScaleGuardError(
            f"oracle limited to n <= {MAX_N}, r <= {MAX_R}, m <= {MAX_M}"
        )


def exact_opt_all(instance: Instance, variants) -> dict[str, OracleResult | None]:
    """Exact optimum of several variants sharing costs, requests, depots and m.

    Depot variants take depots from the instance; unrestricted ones ignore it
    and must be called with a depot-free instance.
    """
    _guard(instance)
    variants = list(variants)
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(v)
        if (v in DEPOT_VARIANTS) != bool(instance.depots):
            raise ValueError(f"variant {v} does not match the instance's depot set")
    n, m, c = instance.n, instance.agents, instance.costs
    depots = list(instance.depots)
    dset = set(depots)
    allowed = {}
    for u in range(n):
        for v in range(u, n):
            if u in dset and v in dset:
                continue  # depot loops and depot-depot edges never help (one visit per depot)
            allowed[(u, v)] = c(u, v)
    best: dict[str, OracleResult | None] = {v: None for v in variants}
    # global lower bound: transportation relaxation computed by brute force is
    # too slow, so use the half-cost bound of the empty assignment instead
    depot_choices = [(2,)] if all(v in ("P5", "P6") for v in variants) else [(0, 2)]
    combos = list(itertools.product(*(depot_choices[0] for _ in depots))) if depots else [()]

    def interested(cost):
        return any(b is None or cost < b.cost for b in best.values())

    for combo in combos:
        target = [0] * n
        for v in instance.cities:
            target[v] = 2 * instance.requests[v]
        for d, t in zip(depots, combo):
            target[d] = t
        if depots and all(t == 0 for t in combo) and instance.cities:
            continue  # some depot must serve the cities
        cand = [v for v in variants if not (v in ("P5", "P6") and any(t != 2 for t in combo))]
        if not cand:
            continue
        _enumerate(instance, target, allowed, cand, best, depots, dset, interested)
    return best


def _enumerate(instance, target, allowed, cand, best, depots, dset, interested):
    n, m = instance.n, instance.agents
    order = list(range(n))
    # half-cost of each vertex's cheapest usable edge among vertices >= i
    half = [[0] * n for _ in range(n + 1)]
    for i in range(n):
        for w in range(i, n):
            opts = [allowed[edge_key(w, z)] for z in range(i, n) if edge_key(w, z) in allowed]
            half[i][w] = min(opts) if opts else None
    x: dict = {}
    deficit = list(target)

    def bound(i):
        s = 0
        for w in range(i, n):
            if deficit[w]:
                h = half[i][w]
                if h is None:
                    return None
                s += deficit[w] * h
        return s  # twice a lower bound on the remaining cost

    def leaf(cost):
        X = dict(x)
        Xm = Multigraph(n, X)
        comps, _ = components(Xm)
        deg = Xm.dotted_degrees()
        for v in cand:
            b = best[v]
            if b is not None and cost >= b.cost:
                continue
            tours = _structure(v, X, comps, m, depots, dset, deg, n)
            if tours is not None:
                sol = Solution(tuple(Multigraph(n, t) for t in tours), v, cost)
                best[v] = OracleResult(cost, sol)

    def vertex(i, cost):
        while i < n and deficit[i] == 0:
            i += 1
        if i == n:
            leaf(cost)
            return
        b = bound(i)
        if b is None:
            return
        if not any(best[v] is None or 2 * cost + b < 2 * best[v].cost for v in cand):
            return
        # neighbours of i (loop first), cheapest first
        nbrs = sorted(
            (w for w in range(i, n) if edge_key(i, w) in allowed and (w == i or deficit[w])),
            key=lambda w: (allowed[edge_key(i, w)], w),
        )
        distribute(i, nbrs, 0, cost)

    def distribute(i, nbrs, j, cost):
        if deficit[i] == 0:
            vertex(i + 1, cost)
            return
        if j == len(nbrs):
            return
        w = nbrs[j]
        e = edge_key(i, w)
        ce = allowed[e]
        if w == i:
            hi = deficit[i] // 2
        else:
            hi = min(deficit[i], deficit[w])
        # later neighbours must be able to absorb the rest; a later loop
        # absorbs any even remainder
        later = nbrs[j + 1:]
        loop_later = i in later
        rest_cap = sum(deficit[z] for z in later if z != i)
        for k in range(hi, -1, -1):
            used = 2 * k if w == i else k
            left = deficit[i] - used
            if left > rest_cap and not loop_later:
                break
            if k:
                x[e] = x.get(e, 0) + k
                deficit[i] -= used
                if w != i:
                    deficit[w] -= k
            distribute(i, nbrs, j + 1, cost + k * ce)
            if k:
                x[e] -= k
                if not x[e]:
                    del x[e]
                deficit[i] += used
                if w != i:
                    deficit[w] += k

    vertex(0, 0)


def exact_opt(instance: Instance) -> tuple[int, Solution]:
    """Exact optimum of the instance's own variant; raises when infeasible."""
    res = exact_opt_all(instance, [instance.variant])[instance.variant]
    if res is None:
        raise InfeasibleError(f"no feasible {instance.variant} solution")
    return res.cost, res.solution
