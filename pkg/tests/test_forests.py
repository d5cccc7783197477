import itertools

import pytest
from hypothesis import given, strategies as st

from fixtures import CERD, cerd
from mvmtsp.core import CostMatrix, InfeasibleError, Instance, Multigraph, components
from mvmtsp.forests import build_auxiliary_graph, cerdeira_forest, constrained_spanning_multigraph

D1, D2, A, B = 0, 1, 2, 3


def test_cerdeira_two_depots():
    F = cerdeira_forest(CERD, range(4), [D1, D2])
    assert F.cost(CERD) == 2
    parts = sorted(sorted(vs) for vs, _ in F.forest.parts())
    assert parts == [[D1, A], [D2, B]]


def test_cerdeira_forced_and_infeasible():
    c = CostMatrix([[2, 1], [1, 2]])
    assert list(cerdeira_forest(c, [0, 1], [0]).edges) == [(0, 1)]
    with pytest.raises(InfeasibleError):
        cerdeira_forest(CERD.submatrix([0, 1, 2]), range(3), [0, 1])


def _brute_depot_forest(costs, n, depots):
    dset = set(depots)
    cities = n - len(depots)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if not (u in dset and v in dset)]
    best = None
    for sub in itertools.combinations(pairs, cities):
        X = Multigraph(n, {e: 1 for e in sub})
        parts, unc = components(X)
        if unc or len(parts) != len(depots):
            continue
        if any(len(p & dset) != 1 for p in map(set, parts)):
            continue
        if X.total() != cities:
            continue
        c = X.cost(costs)
        best = c if best is None else min(best, c)
    return best


@st.composite
def depot_costs(draw):
    n = draw(st.integers(2, 6))
    k = draw(st.integers(1, n // 2))
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = draw(st.integers(1, 9))
    return CostMatrix(w), n, list(range(k))


@given(depot_costs())
def test_cerdeira_matches_brute_force(args):
    costs, n, depots = args
    F = cerdeira_forest(costs, range(n), depots)
    assert F.cost(costs) == _brute_depot_forest(costs, n, depots)
    comp_depots = sorted(F.depot_of)
    assert comp_depots == depots


def test_auxiliary_graph_counts():
    c = CostMatrix([[2] * 5 for _ in range(5)])
    inst = Instance(c, {2: 5, 3: 1, 4: 2}, (0, 1), 2, "P5")
    aux = build_auxiliary_graph(inst)
    assert [len(aux.copies[v]) for v in (2, 3, 4)] == [2, 1, 2] and aux.size == 7
    c1, c2 = aux.copies[2]
    assert aux.costs(c1, c2) == 0 and aux.costs(c1, aux.copies[3][0]) == c(2, 3)
    inst3 = Instance(CostMatrix([[2] * 5 for _ in range(5)]), {3: 1, 4: 1}, (0, 1, 2), 3, "P5")
    assert all(len(build_auxiliary_graph(inst3).copies[v]) == 1 for v in (3, 4))


def test_constrained_spanning_collapses_for_unit_requests():
    S = constrained_spanning_multigraph(cerd("P5"))
    F = cerdeira_forest(CERD, range(4), [D1, D2])
    assert S.F.cost(CERD) == F.cost(CERD) == 2
    assert [p[0] for p in S.parts] == [D1, D2]


def test_constrained_spanning_shared_city():
    c = CostMatrix([[2, 2, 1], [2, 2, 1], [1, 1, 2]])
    inst = Instance(c, {2: 2}, (0, 1), 2, "P5")
    S = constrained_spanning_multigraph(inst)
    assert S.F.to_dict() == {(0, 2): 1, (1, 2): 1} and S.F.cost(c) == 2
    parts, _ = components(S.F)
    assert len(parts) == 1


def test_constrained_spanning_gate():
    c = CostMatrix([[2, 2, 1], [2, 2, 1], [1, 1, 2]])
    with pytest.raises(InfeasibleError, match="r"):
        constrained_spanning_multigraph(Instance(c, {2: 1}, (0, 1), 2, "P5"))


@given(depot_costs(), st.lists(st.integers(1, 3), min_size=6, max_size=6))
def test_unit_request_city_touches_one_depot(args, rs):
    costs, n, depots = args
    if n - len(depots) < 1:
        return
    w = [list(r) for r in costs.c]
    for v in range(n):
        w[v][v] = 2 * min((w[v][u] for u in range(n) if u != v), default=1)
    inst = Instance(CostMatrix(w), {v: rs[v] for v in range(len(depots), n)}, tuple(depots), len(depots), "P5")
    if len(depots) > inst.total_requests:
        return
    S = constrained_spanning_multigraph(inst)
    for v in inst.cities:
        touching = sum(1 for d, verts, _ in S.parts if v in verts)
        assert 1 <= touching <= inst.requests[v]
