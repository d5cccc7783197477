"""Depot-constrained spanning forests and the vertex-copy auxiliary graph.

The one-depot-per-component forest is a minimum-weight common base of two
matroids on the non depot-depot edges:

* M1, the graphic matroid after identifying all depots into one vertex;
* M2, sets X with ``|X| - h(X) <= |cities| - |D|`` where ``h(X)`` counts the
  depot stars that X touches.

A common base has ``|cities|`` edges, is acyclic with no depot-depot path
and touches every depot star, which is exactly the required forest.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import CostMatrix, InfeasibleError, Instance, Multigraph, StructureError, edge_key
from .graphkit import Forest, UnionFind


@dataclass(frozen=True)
class DepotForest:
    forest: Forest
    depot_of: tuple[int, ...]  # depot of each component, indexed by component id

    @property
    def edges(self):
        return self.forest.edges

    def cost(self, costs: CostMatrix) -> int:
        return self.forest.cost(costs)


def _forest_paths(n_nodes: int, tree_edges: list[tuple[int, int, int]]):
    """Parent pointers of a rooted forest; ``tree_edges`` holds (a, b, element id)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    for a, b, eid in tree_edges:
        adj[a].append((b, eid))
        adj[b].append((a, eid))
    parent = [-1] * n_nodes
    pedge = [-1] * n_nodes
    depth = [0] * n_nodes
    root = [-1] * n_nodes
    for s in range(n_nodes):
        if root[s] != -1:
            continue
        root[s] = s
        stack = [s]
        while stack:
            a = stack.pop()
            for b, eid in adj[a]:
                if root[b] == -1:
                    root[b] = s
                    parent[b] = a
                    pedge[b] = eid
                    depth[b] = depth[a] + 1
                    stack.append(b)
    return parent, pedge, depth, root


def _path_elements(a, b, parent, pedge, depth) -> list[int]:
    out = []
    while depth[a] > depth[b]:
        out.append(pedge[a]); a = parent[a]
    while depth[b] > depth[a]:
        out.append(pedge[b]); b = parent[b]
    while a != b:
        out.append(pedge[a]); a = parent[a]
        out.append(pedge[b]); b = parent[b]
    return out


def cerdeira_forest(
    costs: CostMatrix, vertices: Iterable[int], depots: Iterable[int], stats: dict | None = None
) -> DepotForest:
    """Minimum spanning forest with one depot and at least one city per component."""
    vertices = sorted(set(vertices))
    depots = sorted(set(depots))
    dset = set(depots)
    if not dset <= set(vertices):
        raise StructureError("depots must be among the vertices")
    cities = [v for v in vertices if v not in dset]
    k = len(cities)
    if not depots:
        raise StructureError("at least one depot required")
    if k < len(depots):
        raise InfeasibleError(f"m > |cities|: {len(depots)} depots but {k} cities")
    # contracted node ids: 0 = all depots, 1.. = cities
    node = {d: 0 for d in depots}
    for i, v in enumerate(cities):
        node[v] = i + 1
    elems: list[tuple[int, int]] = []
    for i, u in enumerate(vertices):
        for v in vertices[i + 1:]:
            if u in dset and v in dset:
                continue
            elems.append((u, v))
    elems.sort(key=lambda e: (costs(*e), e))
    w = [costs(*e) for e in elems]
    star = [e[0] if e[0] in dset else (e[1] if e[1] in dset else -1) for e in elems]
    ends = [(node[a], node[b]) for a, b in elems]
    didx = {d: i for i, d in enumerate(depots)}
    star = [didx[s] if s != -1 else -1 for s in star]
    slack = k - len(depots)
    nE = len(elems)
    inI = [False] * nE
    size = 0
    rounds = 0

    while size < k:
        I = [e for e in range(nE) if inI[e]]
        cnt = [0] * len(depots)
        for e in I:
            if star[e] >= 0:
                cnt[star[e]] += 1
        h = sum(1 for x in cnt if x)
        parent, pedge, depth, root = _forest_paths(k + 1, [(*ends[e], e) for e in I])
        free1 = [False] * nE
        cyc: list[list[int] | None] = [None] * nE
        sink = [False] * nE
        for y in range(nE):
            if inI[y]:
                continue
            a, b = ends[y]
            if root[a] != root[b]:
                free1[y] = True
            else:
                cyc[y] = _path_elements(a, b, parent, pedge, depth)
            s = star[y]
            gain = 1 if s >= 0 and cnt[s] == 0 else 0
            sink[y] = size + 1 - (h + gain) <= slack
        # category of an element of I for M2 exchanges: the depot it is the
        # only representative of, or -1
        sole = {e: (star[e] if star[e] >= 0 and cnt[star[e]] == 1 else -1) for e in I}
        cats = sorted(set(sole.values()))

        def m2_ok(y, cat):
            # |I| - h(I - x + y) <= slack for x in category cat
            hh = h - (1 if cat >= 0 else 0)
            s = star[y]
            if s >= 0 and (cnt[s] == 0 or (cat == s)):
                hh += 1
            return size - hh <= slack

        INFT = (float("inf"), 0)
        dist = [INFT] * nE
        pred = [-1] * nE
        for y in range(nE):
            if not inI[y] and free1[y]:
                dist[y] = (w[y], 1)
        valid = {cat: [y for y in range(nE) if not inI[y] and m2_ok(y, cat)] for cat in cats}
        changed = True
        while changed:
            changed = False
            # y -> x arcs (M2 exchange), batched per category
            for cat in cats:
                best, arg = INFT, -1
                for y in valid[cat]:
                    if dist[y] < best:
                        best, arg = dist[y], y
                if arg < 0:
                    continue
                for x in I:
                    if sole[x] == cat:
                        nd = (best[0] - w[x], best[1] + 1)
                        if nd < dist[x]:
                            dist[x], pred[x] = nd, arg
                            changed = True
            # x -> y arcs (M1 exchange)
            bestI, argI = INFT, -1
            for x in I:
                if dist[x] < bestI:
                    bestI, argI = dist[x], x
            for y in range(nE):
                if inI[y]:
                    continue
                if free1[y]:
                    if argI >= 0:
                        nd = (bestI[0] + w[y], bestI[1] + 1)
                        if nd < dist[y]:
                            dist[y], pred[y] = nd, argI
                            changed = True
                else:
                    for x in cyc[y]:
                        dx = dist[x]
                        if dx[0] != float("inf"):
                            nd = (dx[0] + w[y], dx[1] + 1)
                            if nd < dist[y]:
                                dist[y], pred[y] = nd, x
                                changed = True
        target, tb = -1, INFT
        for y in range(nE):
            if not inI[y] and sink[y] and dist[y] < tb:
                tb, target = dist[y], y
        if target < 0:
            raise InfeasibleError("no feasible depot forest")
        path = []
        y = target
        seen = set()
        while y >= 0:
            if y in seen:
                raise RuntimeError("cycle in exchange-graph predecessors")
            seen.add(y)
            path.append(y)
            y = pred[y]
        for e in path:
            inI[e] = not inI[e]
        size += 1
        rounds += 1
    if stats is not None:
        stats["augmentations"] = rounds
    chosen = [edge_key(*elems[e]) for e in range(nE) if inI[e]]
    forest = Forest.from_edges(vertices, chosen)
    depot_of = [-1] * forest.count
    for d in depots:
        depot_of[forest.comp[d]] = d
    if forest.count != len(depots) or -1 in depot_of:
        raise RuntimeError("matroid intersection returned a malformed forest")
    return DepotForest(forest, tuple(depot_of))


@dataclass(frozen=True)
class AuxiliaryGraph:
    origin: tuple[int, ...]  # aux vertex -> original vertex
    copy_index: tuple[int, ...]  # 0 for depots, 1..m(v) for copies
    depots: tuple[int, ...]  # aux ids of depots
    costs: CostMatrix
    copies: dict

    @property
    def size(self) -> int:
        return len(self.origin)


def build_auxiliary_graph(instance: Instance) -> AuxiliaryGraph:
    D = instance.depots
    origin: list[int] = []
    cidx: list[int] = []
    copies: dict[int, list[int]] = {}
    for d in D:
        copies[d] = [len(origin)]
        origin.append(d)
        cidx.append(0)
    for v in instance.cities:
        mv = min(len(D), instance.requests[v])
        copies[v] = []
        for i in range(mv):
            copies[v].append(len(origin))
            origin.append(v)
            cidx.append(i + 1)
    c = instance.costs
    rows = [
        [0 if (a != b and origin[a] == origin[b]) else c(origin[a], origin[b]) for b in range(len(origin))]
        for a in range(len(origin))
    ]
    return AuxiliaryGraph(
        tuple(origin), tuple(cidx), tuple(range(len(D))), CostMatrix(rows), copies
    )


@dataclass(frozen=True)
class SpanningMultigraph:
    """Image of the auxiliary forest: per-depot parts ``F_i`` on the original vertices."""

    F: Multigraph
    parts: tuple[tuple[int, tuple[int, ...], tuple[tuple[int, int], ...]], ...]  # (depot, vertices, edges)


def constrained_spanning_multigraph(instance: Instance, stats: dict | None = None) -> SpanningMultigraph:
    if instance.variant not in ("P5", "P6", "P7", "P8"):
        raise StructureError("depot variant required")
    D = instance.depots
    if len(D) > instance.total_requests:
        raise InfeasibleError("m > r(V̄)")
    aux = build_auxiliary_graph(instance)
    df = cerdeira_forest(aux.costs, range(aux.size), aux.depots, stats)
    o = aux.origin
    x: dict = {}
    by_comp: dict[int, list[tuple[int, int]]] = {}
    for a, b in df.edges:
        if o[a] == o[b]:
            continue  # copy-copy edge, zero cost, vanishes on identification
        e = edge_key(o[a], o[b])
        x[e] = x.get(e, 0) + 1
        by_comp.setdefault(df.forest.comp[a], []).append(e)
    parts = []
    for cid, dep_aux in enumerate(df.depot_of):
        verts = sorted({o[v] for v in df.forest.vertices if df.forest.comp[v] == cid})
        parts.append((o[dep_aux], tuple(verts), tuple(by_comp.get(cid, ()))))
    # keep the instance's depot order
    order = {d: i for i, d in enumerate(D)}
    parts.sort(key=lambda p: order[p[0]])
    return SpanningMultigraph(Multigraph(instance.n, x), tuple(parts))
