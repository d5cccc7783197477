"""Spanning forests, cycle decompositions, implicit Eulerian trails and bulk shortcuts.

Everything here works on the compact representation: a multigraph is an
edge -> multiplicity map, and a closed walk of length r(V) is never expanded.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    CostMatrix,
    InfeasibleError,
    Multigraph,
    Solution,
    StructureError,
    components,
    edge_key,
)


class UnionFind:
    def __init__(self, items: Iterable[int] = ()):
        self.parent = {v: v for v in items}

    def find(self, a):
        parent = self.parent
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Forest:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    comp: Mapping[int, int]
    count: int

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "Forest":
        vertices = tuple(sorted(set(vertices)))
        edges = tuple(edge_key(u, v) for u, v in edges)
        uf = UnionFind(vertices)
        for u, v in edges:
            if not uf.union(u, v):
                raise StructureError(f"edge ({u}, {v}) closes a cycle")
        roots = sorted({uf.find(v) for v in vertices})
        index = {r: i for i, r in enumerate(roots)}
        comp = {v: index[uf.find(v)] for v in vertices}
        return cls(vertices, edges, comp, len(roots))

    def cost(self, costs: CostMatrix) -> int:
        return sum(costs(u, v) for u, v in self.edges)

    def parts(self) -> list[tuple[list[int], list[tuple[int, int]]]]:
        """Components as ``(sorted vertices, edges)``, ordered by smallest vertex."""
        verts: list[list[int]] = [[] for _ in range(self.count)]
        eds: list[list[tuple[int, int]]] = [[] for _ in range(self.count)]
        for v in self.vertices:
            verts[self.comp[v]].append(v)
        for u, v in self.edges:
            eds[self.comp[u]].append((u, v))
        return list(zip(verts, eds))

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)


def msf_m_components(costs: CostMatrix, vertices: Iterable[int], m: int) -> Forest:
    """Minimum spanning forest with exactly ``m`` components (truncated Kruskal)."""
    vertices = sorted(set(vertices))
    if m < 1:
        raise StructureError("m must be positive")
    if m > len(vertices):
        raise InfeasibleError(f"cannot split {len(vertices)} vertices into {m} components")
    c = costs.c
    order = sorted(
        ((c[u][v], u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]),
    )
    uf = UnionFind(vertices)
    need = len(vertices) - m
    chosen = []
    for _, u, v in order:
        if len(chosen) == need:
            break
        if uf.union(u, v):
            chosen.append((u, v))
    return Forest.from_edges(vertices, chosen)


def _adjacency(edges: Iterable[tuple[int, int]]) -> dict[int, list[int]]:
    adj: dict[int, set] = {}
    for u, v in edges:
        adj.setdefault(u, set())
        adj.setdefault(v, set())
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return {k: sorted(s) for k, s in adj.items()}


def double_and_shortcut_cycle(
    vertices: Iterable[int], edges: Iterable[tuple[int, int]], costs: CostMatrix
) -> Multigraph:
    """Hamiltonian cycle on ``vertices`` obtained from the doubled component.

    ``edges`` must connect ``vertices`` (parallel edges and loops are ignored);
    the cycle follows the depth-first preorder, which is exactly the
    doubled-tree Euler tour with repeated vertices skipped.
    """
    vertices = sorted(set(vertices))
    n = costs.n
    if not vertices:
        raise StructureError("empty component")
    if len(vertices) == 1:
        v = vertices[0]
        return Multigraph(n, {(v, v): 1})
    adj = _adjacency(edges)
    start = vertices[0]
    seen = {start}
    order = [start]
    stack = [iter(adj.get(start, ()))]
    while stack:
        for w in stack[-1]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                stack.append(iter(adj.get(w, ())))
                break
        else:
            stack.pop()
    if seen != set(vertices):
        raise StructureError("component is not connected")
    if len(order) == 2:
        return Multigraph(n, {edge_key(*order): 2})
    cyc: dict = {}
    for a, b in zip(order, order[1:] + order[:1]):
        k = edge_key(a, b)
        cyc[k] = cyc.get(k, 0) + 1
    return Multigraph(n, cyc)


# ---------------------------------------------------------------- cycles


def cycle_edges(cycle: Sequence[int]) -> dict[tuple[int, int], int]:
    """Edge multiplicities of one traversal of a closed cycle."""
    if len(cycle) == 1:
        return {(cycle[0], cycle[0]): 1}
    out: dict = {}
    for a, b in zip(cycle, tuple(cycle[1:]) + tuple(cycle[:1])):
        k = edge_key(a, b)
        out[k] = out.get(k, 0) + 1
    return out


@dataclass(frozen=True)
class CycleDecomposition:
    entries: tuple[tuple[tuple[int, ...], int], ...]
    source: Multigraph

    def reconstruct(self) -> Multigraph:
        x: dict = {}
        for cyc, mu in self.entries:
            for e, k in cycle_edges(cyc).items():
                x[e] = x.get(e, 0) + k * mu
        return Multigraph(self.source.universe, x)


def cycle_decompose(X: Multigraph) -> CycleDecomposition:
    """Factor an even multigraph into O(n^2) cycles with big multiplicities."""
    deg = X.dotted_degrees()
    odd = [v for v, d in enumerate(deg) if d % 2]
    if odd:
        raise StructureError(f"odd dotted degree at vertices {odd}")
    x = X.to_dict()
    entries: list[tuple[tuple[int, ...], int]] = []
    for (a, b) in sorted(x):
        if a == b:
            entries.append(((a,), x.pop((a, b))))
    adj: dict[int, set] = {}
    for a, b in x:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    while x:
        start = min(v for v, s in adj.items() if s)
        path = [start]
        pos = {start: 0}
        prev = None
        while True:
            cur = path[-1]
            nxt = None
            for u in sorted(adj[cur]):
                if u != prev:
                    nxt = u
                    break
            if nxt is None:
                # only the arriving edge is left; it must carry a second copy
                nxt = prev
            if nxt in pos:
                cyc = tuple(path[pos[nxt]:])
                break
            pos[nxt] = len(path)
            path.append(nxt)
            prev = cur
        ce = cycle_edges(cyc)
        mu = min(x[e] // k for e, k in ce.items())
        if mu < 1:
            raise StructureError("walk closed on an edge with a single copy")
        for e, k in ce.items():
            left = x[e] - k * mu
            if left:
                x[e] = left
            else:
                del x[e]
                a, b = e
                adj[a].discard(b)
                adj[b].discard(a)
        entries.append((cyc, mu))
    return CycleDecomposition(tuple(entries), X)


@dataclass(frozen=True)
class ImplicitTrail:
    start: int
    entries: tuple[tuple[int, tuple[int, ...], int], ...]  # (root, cycle from root, multiplicity)

    def expand(self) -> list[int]:
        """Explicit closed walk; only sensible for small multiplicities."""
        walk = [self.start]
        for root, cyc, mu in self.entries:
            i = walk.index(root)
            one = list(cyc[1:]) + [root]
            walk[i + 1:i + 1] = one * mu
        return walk


def _rotate(cyc: tuple[int, ...], w: int) -> tuple[int, ...]:
    i = cyc.index(w)
    return cyc[i:] + cyc[:i]


def implicit_trail(dec: CycleDecomposition, start: int) -> ImplicitTrail:
    """Root every cycle at the first vertex where an Euler tour of the
    one-copy-per-cycle multigraph reaches it."""
    entries = dec.entries
    if not entries:
        raise StructureError("empty decomposition")
    # Hierholzer on A = one copy of every cycle
    edges: list[tuple[int, int]] = []
    for cyc, _ in entries:
        if len(cyc) == 1:
            edges.append((cyc[0], cyc[0]))
        else:
            edges.extend(zip(cyc, tuple(cyc[1:]) + tuple(cyc[:1])))
    inc: dict[int, list[int]] = {}
    for i, (a, b) in enumerate(edges):
        inc.setdefault(a, []).append(i)
        if a != b:
            inc.setdefault(b, []).append(i)
    if start not in inc:
        raise StructureError(f"start vertex {start} is not covered")
    for lst in inc.values():
        lst.reverse()
    used = [False] * len(edges)
    stack = [start]
    eta: list[int] = []
    while stack:
        v = stack[-1]
        lst = inc[v]
        while lst and used[lst[-1]]:
            lst.pop()
        if lst:
            i = lst.pop()
            used[i] = True
            a, b = edges[i]
            stack.append(b if a == v else a)
        else:
            eta.append(stack.pop())
    eta.reverse()
    if not all(used):
        raise StructureError("support is disconnected")
    by_vertex: dict[int, list[int]] = {}
    for idx, (cyc, _) in enumerate(entries):
        for w in set(cyc):
            by_vertex.setdefault(w, []).append(idx)
    rooted = [False] * len(entries)
    out = []
    seen = set()
    for w in eta:
        if w in seen:
            continue
        seen.add(w)
        for idx in by_vertex.get(w, ()):
            if not rooted[idx]:
                rooted[idx] = True
                cyc, mu = entries[idx]
                out.append((w, _rotate(cyc, w), mu))
    return ImplicitTrail(start, tuple(out))


# ------------------------------------------------------------- shortcuts


class _Editor:
    """Mutable multiplicity map with an update counter."""

    def __init__(self, X: Multigraph):
        self.x = X.to_dict()
        self.updates = 0

    def add(self, u, v, k):
        if not k:
            return
        e = edge_key(u, v)
        left = self.x.get(e, 0) + k
        if left < 0:
            raise RuntimeError(f"multiplicity of {e} would become negative")
        if left:
            self.x[e] = left
        else:
            self.x.pop(e, None)
        self.updates += 1


def _neighbours_on(cyc: tuple[int, ...], v: int) -> tuple[int, int]:
    i = cyc.index(v)
    return cyc[i - 1], cyc[(i + 1) % len(cyc)]


def _shortcut_vertex(ed: _Editor, X: Multigraph, v: int, keep: int, start: int) -> None:
    """Reduce the visits of ``v`` to ``keep`` (each visit = dotted degree 2)."""
    trail = implicit_trail(cycle_decompose(X), start)
    through = [(cyc, mu) for _, cyc, mu in trail.entries if v in cyc]
    occ = sum(mu for _, mu in through)
    surplus = occ - keep
    if surplus <= 0:
        return
    # (1) bulk shortcuts inside repeated cycles, taken from the tail of the
    # trail; one copy of every cycle stays, so connectivity is kept
    remaining = []
    for cyc, mu in reversed(through):
        t = min(mu - 1, surplus)
        if t > 0:
            surplus -= t
            if len(cyc) == 1:
                ed.add(v, v, -t)
            else:
                u, w = _neighbours_on(cyc, v)
                ed.add(u, v, -t)
                ed.add(v, w, -t)
                ed.add(u, w, t)
        remaining.append(cyc)
    if surplus <= 0:
        return
    remaining.reverse()
    # (2) every cycle through v has one copy left; drop loops first ...
    loops = [c for c in remaining if len(c) == 1]
    rings = [c for c in remaining if len(c) > 1]
    while surplus and loops and (rings or len(loops) > 1 or keep == 0):
        loops.pop()
        ed.add(v, v, -1)
        surplus -= 1
    if not surplus:
        return
    # ... then splice consecutive cycles together at v (cost non-increasing
    # by the triangle inequality), and if v must vanish, bypass it once more
    chain = rings[len(rings) - surplus - 1:] if keep else rings
    if keep == 0 and len(chain) < 1:
        return
    merges = len(chain) - 1
    ends = [_neighbours_on(c, v) for c in chain]
    for (u_a, w_a), (u_b, w_b) in zip(ends, ends[1:]):
        ed.add(w_a, v, -1)
        ed.add(v, u_b, -1)
        ed.add(w_a, u_b, 1)
    if keep == 0:
        first, last = ends[0][0], ends[-1][1]
        ed.add(first, v, -1)
        ed.add(v, last, -1)
        ed.add(first, last, 1)
        merges += 1
    if merges != surplus:
        raise RuntimeError("shortcut bookkeeping mismatch")


def reduce_degrees(
    X: Multigraph,
    costs: CostMatrix,
    rho: Mapping[int, int],
    anchor: int | None = None,
    stats: dict | None = None,
) -> Multigraph:
    """Shortcut ``X`` until every dotted degree equals ``rho``.

    ``rho`` defaults to the current degree for vertices it does not mention.
    The result has connected support over the vertices with positive target
    and never costs more than ``X`` on metric costs.
    """
    if not X:
        return X
    deg = X.dotted_degrees()
    parts, _ = components(X)
    if len(parts) != 1:
        raise StructureError("reduce_degrees needs connected support")
    target = {v: deg[v] for v in parts[0]}
    for v, r in rho.items():
        r = int(r)
        if r % 2:
            raise StructureError(f"target degree of {v} is odd")
        if r < 0 or r > deg[v]:
            raise StructureError(f"target degree {r} of {v} outside [0, {deg[v]}]")
        target[v] = r
    if any(d % 2 for d in deg):
        raise StructureError("input has odd dotted degrees")
    if anchor is not None and target.get(anchor, 0) < 2:
        raise StructureError("anchor must keep at least one visit")
    if not any(target[v] for v in target):
        return Multigraph(X.universe)
    gamma = {v: deg[v] - target[v] for v in target if deg[v] > target[v]}
    ed = _Editor(X)
    cur = X
    for v in sorted(gamma, key=lambda v: (gamma[v], v)):
        if anchor is not None:
            start = anchor
        else:
            covered = sorted(cur.vertices())
            start = next((w for w in covered if target[w] > 0), covered[0])
        _shortcut_vertex(ed, cur, v, target[v] // 2, start)
        cur = Multigraph._raw(X.universe, ed.x)
    if stats is not None:
        stats["updates"] = stats.get("updates", 0) + ed.updates
    got = cur.dotted_degrees()
    bad = [v for v in target if got[v] != target[v]]
    if bad:
        raise RuntimeError(f"degree targets missed at {bad}")
    parts, _ = components(cur)
    if len(parts) > 1:
        raise RuntimeError("shortcutting disconnected the multigraph")
    return cur


def disconnect_depot(X: Multigraph, costs: CostMatrix, d: int) -> Multigraph:
    """Bypass every visit of ``d`` by chords, bulk over cycle multiplicities."""
    if X.dotted_degree(d) == 0:
        raise StructureError(f"vertex {d} is not covered")
    return reduce_degrees(X, costs, {d: 0})


def normalize_depot_visits(S: Solution, costs: CostMatrix, depots: Sequence[int]) -> Solution:
    """Each depot ends with one visit by its own agent and none by others.

    Agent ``i`` owns ``depots[i]``; every city keeps its degree.
    """
    depots = list(depots)
    dset = set(depots)
    tours = []
    for i, T in enumerate(S.agent_tours):
        own = depots[i] if i < len(depots) else None
        if not T:
            tours.append(T)
            continue
        # depot loops never help and only touch the depot
        x = T.to_dict()
        for d in dset:
            x.pop((d, d), None)
        T = Multigraph(T.universe, x)
        if not T:
            tours.append(T)
            continue
        rho = {}
        for d in T.vertices() & dset:
            rho[d] = 2 if d == own else 0
        if own in rho and T.dotted_degree(own) < 2:
            rho.pop(own)
        anchor = own if own in rho and rho[own] else None
        if rho and any(T.dotted_degree(d) != r for d, r in rho.items()):
            T = reduce_degrees(T, costs, rho, anchor=anchor)
        tours.append(T)
    return Solution.build(tours, S.variant, costs)


def merge_overlapping_tours(S: Solution, costs: CostMatrix | None = None) -> Solution:
    """Union tours that share a vertex; the lowest agent index keeps the union."""
    tours = list(S.agent_tours)
    k = len(tours)
    uf = UnionFind(range(k))
    owner: dict[int, int] = {}
    for i, T in enumerate(tours):
        for v in T.vertices():
            if v in owner:
                uf.union(owner[v], i)
            else:
                owner[v] = i
    merged = [Multigraph(t.universe) for t in tours]
    for i, T in enumerate(tours):
        r = uf.find(i)
        merged[r] = merged[r] + T
    total = S.total_cost if costs is None else sum(t.cost(costs) for t in merged)
    return Solution(tuple(merged), S.variant, total)
