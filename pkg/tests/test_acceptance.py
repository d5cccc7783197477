"""Acceptance criteria 1-8.

Each test appends one ``CRITERION k: PASS|FAIL ...`` line that the
terminal summary repeats at the end of the run.  Tolerances are pinned here
and nowhere else.
"""
from __future__ import annotations

import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from corpus import DEPOT, FREE, CorpusConfig, depot_family, free_family
from fixtures import FIG2_OPT, c4, cn_metric, fig2, tri, unit
from mvmtsp.algorithms import AUTO, FACTORS, solve, solve_p3, sweep_reduction
from mvmtsp.bounded_degree import DegreeSpec, bounded_degree_multigraph, contract_violations
from mvmtsp.core import CostMatrix, InfeasibleError, Instance
from mvmtsp.flows import TransportSpec, solve_transportation, tp_lower_bound
from mvmtsp.io import generate_instance
from mvmtsp.oracle import exact_opt, exact_opt_all, verify_solution
from naive import exact_degree_optimum, naive_tp

TIME_BUDGET_C1 = 600.0  # seconds, whole corpus
BIG_SECONDS = 5.0
UPDATE_CONST = 1  # reduce_degrees multiplicity updates <= UPDATE_CONST * n^3


def record(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def corpus_runs():
    """Oracle optimum and default algorithm report for every (instance, variant)."""
    t0 = time.perf_counter()
    rows = []
    for family, variants in ((free_family(), FREE), (depot_family(), DEPOT)):
        for inst in family:
            opts = exact_opt_all(inst, variants)
            for v in variants:
                I = inst.with_variant(v)
                try:
                    rep = solve(I)
                except InfeasibleError:
                    rep = None
                o = opts[v]
                rows.append((I, o.cost if o else None, rep))
    return rows, time.perf_counter() - t0


def test_criterion_1_factor_certification(corpus_runs):
    rows, seconds = corpus_runs
    bad = []
    per = {}
    for I, opt, rep in rows:
        alg = AUTO[I.variant]
        c = per.setdefault(I.variant, [0, 0.0])
        c[0] += 1
        if rep is None or opt is None:
            if (rep is None) != (opt is None):
                bad.append((I.variant, "feasibility disagrees", I))
            continue
        probs = verify_solution(I, rep.solution)
        if probs:
            bad.append((I.variant, probs, I))
        cost = rep.solution.total_cost
        if cost > FACTORS[alg] * opt:
            bad.append((I.variant, f"ratio {cost}/{opt} over {FACTORS[alg]}", I))
        if opt:
            c[1] = max(c[1], cost / opt)
    ok = not bad and seconds < TIME_BUDGET_C1 and all(per[v][0] == 200 for v in FREE + DEPOT)
    worst = " ".join(f"{v}:{per[v][1]:.3f}" for v in sorted(per))
    record(1, ok, f"{len(rows)} runs, {len(bad)} violations, {seconds:.1f}s; max ratios {worst}")
    assert not bad, bad[:3]
    assert seconds < TIME_BUDGET_C1


def test_criterion_2_lower_bound_chain(corpus_runs):
    rows, _ = corpus_runs
    over_opt, loops_vs_cmin, cmin_vs_tp, loops_vs_tp = [], 0, 0, 0
    seen = set()
    for I, opt, _ in rows:
        lb = tp_lower_bound(I)
        if opt is not None and lb > opt:
            over_opt.append((I.variant, lb, opt))
        key = id(I.costs), tuple(sorted(I.requests.items()))
        if key in seen:
            continue
        seen.add(key)
        c = I.costs
        loops = sum(r * c(v, v) for v, r in I.requests.items())
        cmin = sum(r * min(c(v, u) for u in range(I.n) if u != v) for v, r in I.requests.items())
        loops_vs_cmin += loops > 2 * cmin
        cmin_vs_tp += cmin > lb
        loops_vs_tp += loops > 2 * lb
    ok = not over_opt and not loops_vs_cmin and not cmin_vs_tp
    record(2, ok, f"tp>opt on {len(over_opt)}; of {len(seen)} instances, sum r*c(vv) > 2 sum r*cmin on "
                  f"{loops_vs_cmin}, sum r*cmin > tp on {cmin_vs_tp}, sum r*c(vv) > 2 tp on {loops_vs_tp}")
    assert not over_opt
    assert loops_vs_cmin == 0
    assert loops_vs_tp == 0
    assert cmin_vs_tp == 0, "middle link fails when a loop is cheaper than c_min; see ledger"


def test_criterion_3_fixtures(corpus_runs):
    rows, _ = corpus_runs
    fails = []
    for m in (1, 2, 3, 4):
        got = exact_opt(c4(m, "P3"))[0]
        if got != 4:
            fails.append(f"C4 m={m} P3={got}")
    for q, m in ((3, 2), (3, 3), (4, 2)):
        p8 = exact_opt(unit(q, m, "P8"))[0]
        p6 = exact_opt(unit(q, m, "P6"))[0]
        if p8 != q + 1 or p6 != q + m:
            fails.append(f"UNIT q={q} m={m} P8={p8} P6={p6}")
        p5 = exact_opt(unit(q, m, "P5"))[0]
        p7 = exact_opt(unit(q, m, "P7"))[0]
        if not (p5 > p7 and p6 > p8):
            fails.append(f"UNIT separation q={q} m={m}")
    for v, want in FIG2_OPT.items():
        got = exact_opt(fig2(v))[0]
        if got != want:
            fails.append(f"FIG2 {v}={got}")
    if not (FIG2_OPT["P5"] < FIG2_OPT["P6"] and FIG2_OPT["P1"] < FIG2_OPT["P2"]):
        fails.append("FIG2 separation")
    # cycle metric: strict for every (n, m) except m = n/2, where n/2 digons
    # on unit edges cost exactly n; those ties are counted, not hidden
    strict, ties = 0, []
    for n in (4, 5, 6):
        for m in (2, 3):
            inst = Instance(cn_metric(n), {v: 1 for v in range(n)}, (), m, "P1")
            o = exact_opt_all(inst, FREE)
            if o["P3"].cost != n or o["P4"].cost != n:
                fails.append(f"C{n} m={m} P3/P4 != n")
            if o["P1"].cost > n and o["P2"].cost > n:
                strict += 1
            elif 2 * m == n and o["P1"].cost == o["P2"].cost == n:
                ties.append(f"C{n}/m={m}")
            else:
                fails.append(f"C{n} m={m} separation")
    by = {}
    for I, opt, _ in rows:
        by.setdefault(id(I.costs), {})[I.variant] = opt
    eq = sum(1 for d in by.values() for a, b in (("P3", "P4"), ("P7", "P8")) if a in d and d[a] != d[b])
    if eq:
        fails.append(f"{eq} corpus equalities broken")
    record(3, not fails, f"{len(by)} corpus instances for equalities; cycle-metric strict on {strict}, "
                         f"digon ties at m=n/2 {ties}; failures: {fails or 'none'}")
    assert not fails


def test_criterion_4_sweep():
    fails = []
    for inst in free_family():
        m = inst.agents
        p3 = exact_opt(inst.with_variant("P3"))[0]
        vals = []
        for ell in range(1, m + 1):
            try:
                vals.append(exact_opt(inst.with_variant("P1", agents=ell))[0])
            except InfeasibleError:
                pass
        if min(vals) != p3:
            fails.append(("min", inst))
        rep = sweep_reduction(inst.with_variant("P3"))
        if rep.solution.total_cost > 4 * p3 or verify_solution(inst.with_variant("P3"), rep.solution):
            fails.append(("sweep", inst))
    record(4, not fails, f"200 instances, {len(fails)} failures")
    assert not fails


def test_criterion_5_big_requests():
    cases = [("euclidean", 100, 10**18), ("closure", 101, 10**18), ("closure", 102, 10**18),
             ("euclidean", 103, 10**100)]
    n, m = 20, 3
    worst, fails = 0.0, []
    for metric, seed, r in cases:
        base = generate_instance(n, m, 0, 3, metric, seed, "P3")
        I = Instance(base.costs, {v: r for v in range(n)}, (), m, "P3")
        t0 = time.perf_counter()
        rep = solve_p3(I)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        deg = [0] * n
        for T in rep.solution.agent_tours:
            for v, d in enumerate(T.dotted_degrees()):
                deg[v] += d
        if deg != [2 * r] * n:
            fails.append(f"{metric}/{seed}: degrees")
        if verify_solution(I, rep.solution):
            fails.append(f"{metric}/{seed}: verifier")
        if rep.stats.get("updates", 0) > UPDATE_CONST * n**3:
            fails.append(f"{metric}/{seed}: {rep.stats['updates']} updates")
        if dt >= BIG_SECONDS:
            fails.append(f"{metric}/{seed}: {dt:.2f}s")
    record(5, not fails, f"{len(cases)} runs at n=20 m=3, worst {worst:.2f}s; failures: {fails or 'none'}")
    assert not fails


def _bd_corpus(size=100, seed=77):
    rng = random.Random(seed)
    out = []
    for i in range(size):
        n = rng.randint(2, 6)
        rmax = 2 if n == 6 else 3  # brute force at n=6, r=3 is seconds per instance
        I = generate_instance(n, rng.randint(1, 3), 0, rmax, "closure" if i % 2 else "euclidean",
                              rng.randrange(2**31), "P3", 30)
        rho = {v: 2 * r for v, r in I.requests.items()}
        out.append((I.costs, DegreeSpec(rho, I.total_requests, I.agents)))
    return out


def test_criterion_6_bounded_degree_contract():
    cases = _bd_corpus()
    broken, over, match = 0, 0, 0
    for costs, spec in cases:
        X = bounded_degree_multigraph(costs, spec, "exact")
        broken += bool(contract_violations(costs, spec, X))
        over += X.cost(costs) > exact_degree_optimum(costs, spec.rho, spec.max_components)
        Y = bounded_degree_multigraph(costs, spec, "local")
        broken += bool(contract_violations(costs, spec, Y))
        match += Y.cost(costs) == X.cost(costs)
    default = bounded_degree_multigraph.__defaults__[0]
    gate = match == len(cases) or default != "local"
    ok = not broken and not over and gate
    record(6, ok, f"{len(cases)} instances, contract breaks {broken}, above brute force {over}, "
                  f"local=exact on {match}/{len(cases)}, default engine {default}")
    assert not broken and not over and gate


def test_criterion_7_flows():
    rng = random.Random(5)
    wrong = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        I = generate_instance(n, 1, 0, 3, "closure", rng.randrange(2**31), "P1", 20)
        X = solve_transportation(TransportSpec(I.costs, I.requests))
        wrong += X.cost(I.costs) != naive_tp(I.costs, I.requests)
    mono = 0
    for _ in range(500):
        n = rng.randint(1, 6)
        I = generate_instance(n, 1, 0, 5, "closure", rng.randrange(2**31), "P1", 20)
        r2 = {v: r + rng.choice((0, 0, 1, 2, 5)) for v, r in I.requests.items()}
        a = solve_transportation(TransportSpec(I.costs, I.requests)).cost(I.costs)
        b = solve_transportation(TransportSpec(I.costs, r2)).cost(I.costs)
        mono += a > b
    record(7, not wrong and not mono, f"200 TP brute-force checks wrong {wrong}; 500 monotone pairs broken {mono}")
    assert not wrong and not mono


def test_criterion_8_gates():
    cases = [
        ("m > r(V)", tri(4, "P1")),
        ("m > |V|", tri(4, "P2", (2, 2, 2))),
        ("m > |cities|", Instance(CostMatrix([[2] * 5 for _ in range(5)]), {3: 2, 4: 2}, (0, 1, 2), 3, "P6")),
        ("m > r(cities)", Instance(CostMatrix([[2] * 4 for _ in range(4)]), {3: 2}, (0, 1, 2), 3, "P5")),
    ]
    fails = []
    for name, I in cases:
        try:
            solve(I)
            fails.append(f"{name}: solver answered")
        except InfeasibleError:
            pass
        try:
            exact_opt(I)
            fails.append(f"{name}: oracle found a solution")
        except InfeasibleError:
            pass
    # one step inside each gate the oracle and solver both succeed
    inside = [tri(3, "P1"), tri(3, "P2", (2, 2, 2)),
              Instance(CostMatrix([[2] * 4 for _ in range(4)]), {2: 2, 3: 2}, (0, 1), 2, "P6"),
              Instance(CostMatrix([[2] * 4 for _ in range(4)]), {2: 1, 3: 1}, (0, 1), 2, "P5")]
    for I in inside:
        try:
            exact_opt(I)
            if verify_solution(I, solve(I).solution):
                fails.append(f"{I.variant} inside gate: invalid")
        except InfeasibleError:
            fails.append(f"{I.variant} inside gate: refused")
    record(8, not fails, f"{len(cases)} gates; failures: {fails or 'none'}")
    assert not fails
