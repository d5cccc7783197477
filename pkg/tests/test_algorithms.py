import pytest
from hypothesis import given, settings, strategies as st

from fixtures import C4, TRI, c4, cerd, tri, unit
from mvmtsp.algorithms import (
    FACTORS,
    solve,
    solve_p1,
    solve_p2,
    solve_p3,
    solve_p5,
    solve_p6,
    solve_p7,
    sweep_reduction,
)
from mvmtsp.core import CostMatrix, InfeasibleError, Instance, StructureError
from mvmtsp.io import generate_instance
from mvmtsp.oracle import exact_opt, verify_solution


def _ok(inst, rep):
    assert verify_solution(inst, rep.solution) == []
    return rep.solution.total_cost


def test_p1_tri():
    assert _ok(tri(1), solve_p1(tri(1))) == 3
    rep = solve_p1(tri(3))
    assert _ok(tri(3), rep) == 6
    assert all(set(t.to_dict()) == {(v, v)} for v, t in enumerate(rep.solution.agent_tours))
    with pytest.raises(InfeasibleError, match=r"m > r\(V\)"):
        solve_p1(tri(4))


def test_p5_small():
    c = CostMatrix([[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, 2]])
    inst = Instance(c, {1: 1, 2: 1, 3: 1}, (0,), 1, "P5")
    assert _ok(inst, solve_p5(inst)) <= 3 * exact_opt(inst)[0]
    c2 = CostMatrix([[2, 2, 1], [2, 2, 1], [1, 1, 2]])
    inst2 = Instance(c2, {2: 2}, (0, 1), 2, "P5")
    rep = solve_p5(inst2)
    assert _ok(inst2, rep) <= 3 * exact_opt(inst2)[0]
    assert all(t.dotted_degree(2) >= 2 for t in rep.solution.agent_tours)


def test_p2_tri():
    inst = tri(2, "P2", (2, 1, 1))
    assert _ok(inst, solve_p2(inst)) <= 4 * exact_opt(inst)[0]
    with pytest.raises(InfeasibleError):
        solve_p2(tri(4, "P2"))
    inst3 = tri(3, "P2", (3, 1, 2))
    assert _ok(inst3, solve_p2(inst3)) == sum(r * TRI(v, v) for v, r in inst3.requests.items())


def test_p6_cerdeira_fixture():
    inst = cerd()
    assert _ok(inst, solve_p6(inst)) == 4 == exact_opt(inst)[0]
    with pytest.raises(InfeasibleError):
        solve_p6(Instance(CostMatrix([[2, 2, 1], [2, 2, 1], [1, 1, 2]]), {2: 1}, (0, 1), 2, "P6"))
    inst31 = cerd(r=(3, 1))
    rep = solve_p6(inst31)
    _ok(inst31, rep)
    loops = {e for t in rep.solution.agent_tours for e in t.to_dict() if e[0] == e[1]}
    assert loops <= {(2, 2)}


def test_p3_c4():
    assert _ok(c4(1), solve_p3(c4(1))) == 4
    cost = _ok(c4(3), solve_p3(c4(3)))
    assert cost <= 8 and exact_opt(c4(3))[0] == 4
    single = Instance(CostMatrix([[2]]), {0: 5}, (), 1, "P3")
    rep = solve_p3(single)
    assert rep.solution.agent_tours[0].to_dict() == {(0, 0): 5} and rep.solution.total_cost == 10


def test_p7_unit_and_single_depot():
    inst = unit(q=3, m=2, variant="P7")
    cost = _ok(inst, solve_p7(inst))
    assert exact_opt(inst)[0] == 4 and cost <= 8
    one = unit(q=3, m=1, variant="P7")
    rep = solve_p7(one)
    _ok(one, rep)
    assert rep.solution.agent_tours[0].dotted_degree(0) == 2


def test_p7_nearest_depot_tie_goes_to_lowest_index():
    from mvmtsp.algorithms import _meta_instance

    inst = unit(q=2, m=2, variant="P7")
    meta = _meta_instance(inst)
    nearest = meta[2]
    assert all(nearest[v] == 0 for v in inst.cities)


def test_sweep_c4_prefers_one_tour():
    rep = sweep_reduction(c4(3))
    assert rep.stats["ell"] == 1 and _ok(c4(3), rep) == 4
    one = tri(1, "P3")
    assert sweep_reduction(one).solution.total_cost == solve_p1(tri(1)).solution.total_cost


def test_facade_dispatch():
    assert solve(tri(1)).algorithm == "alg1"
    assert solve(c4(2)).algorithm == "alg5"
    assert solve(cerd()).algorithm == "alg4"
    with pytest.raises(StructureError):
        solve(tri(1), "alg5")
    for engine in ("exact", "local"):
        assert solve(c4(2, "P4"), bd_engine=engine).solution.total_cost >= 4


@settings(max_examples=40)
@given(st.sampled_from(["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"]),
       st.integers(2, 5), st.integers(1, 3), st.integers(0, 10**6))
def test_outputs_verify_and_respect_factor(variant, n, m, seed):
    if variant in ("P5", "P6", "P7", "P8"):
        k = min(m, n - 1)
        inst = generate_instance(n, k, k, 3, "closure", seed, variant)
    else:
        inst = generate_instance(n, m, 0, 3, "closure", seed, variant)
    try:
        opt, _ = exact_opt(inst)
    except InfeasibleError:
        with pytest.raises(InfeasibleError):
            solve(inst)
        return
    rep = solve(inst)
    cost = _ok(inst, rep)
    assert rep.lower_bound_used <= opt <= cost <= FACTORS[rep.algorithm] * opt
