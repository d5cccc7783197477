"""Command line: ``mvmtsp solve|verify|oracle|gen|bench``.

Exit codes: 0 success, 1 malformed input, failed verification or an oracle
request beyond the enumeration guard, 2 proven-infeasible instance.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .algorithms import ALGORITHMS, solve
from .bounded_degree import ENGINES
from .core import DEPOT_VARIANTS, VARIANTS, InfeasibleError, MVMTSPError, ScaleGuardError, StructureError
from .io import dumps_instance, dumps_solution, generate_instance, loads_instance, loads_solution
from .oracle import exact_opt, verify_solution

OK, BAD_INPUT, INFEASIBLE = 0, 1, 2


def threads() -> int:
    """Worker cap from ``MVMTSP_THREADS`` (default 1)."""
    raw = os.environ.get("MVMTSP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise StructureError(f"MVMTSP_THREADS must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise StructureError(f"{path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _err(msg: str) -> None:
    print(f"mvmtsp: {msg}", file=sys.stderr)


def cmd_solve(a) -> int:
    inst = loads_instance(_read(a.instance), a.instance)
    rep = solve(inst, a.algorithm, a.bd_engine)
    meta = {
        "algorithm": rep.algorithm,
        "factor": rep.claimed_factor,
        "tp_lower_bound": str(rep.lower_bound_used),
        "wall_ms": round(rep.wall_time * 1000, 3),
        "bd_engine": a.bd_engine,
        "stats": {k: (str(v) if isinstance(v, int) else v) for k, v in rep.stats.items()},
    }
    _write(a.out, dumps_solution(inst, rep.solution, meta))
    if a.out not in (None, "-"):
        print(f"{inst.variant} {rep.algorithm} cost={rep.solution.total_cost} "
              f"lb={rep.lower_bound_used} factor={rep.claimed_factor}")
    return OK


def cmd_verify(a) -> int:
    inst = loads_instance(_read(a.instance), a.instance)
    sol = loads_solution(inst, _read(a.solution), a.solution)
    problems = verify_solution(inst, sol)
    for p in problems:
        print(p)
    if problems:
        return BAD_INPUT
    print(f"ok {inst.variant} cost={sol.total_cost}")
    return OK


def cmd_oracle(a) -> int:
    inst = loads_instance(_read(a.instance), a.instance)
    cost, sol = exact_opt(inst)
    if a.out:
        _write(a.out, dumps_solution(inst, sol, {"algorithm": "oracle"}))
    print(cost)
    return OK


def cmd_gen(a) -> int:
    inst = generate_instance(
        a.n, a.m, a.depots, int(a.rmax), a.metric, a.seed, a.variant, a.cmax
    )
    _write(a.out, dumps_instance(inst))
    return OK


def _bench_one(job):
    name, text, alg_names, engine, with_oracle = job
    out = []
    try:
        inst = loads_instance(text, name)
    except MVMTSPError as e:
        return [{"instance": name, "status": "bad_input", "error": str(e)}]
    opt = None
    if with_oracle:
        try:
            opt, _ = exact_opt(inst)
        except ScaleGuardError:
            opt = "n/a"
        except InfeasibleError:
            opt = None
    for alg in alg_names:
        rec = {"instance": name, "variant": inst.variant, "n": inst.n, "agents": inst.agents,
               "algorithm": alg}
        t0 = time.perf_counter()
        try:
            rep = solve(inst, alg, engine)
        except InfeasibleError as e:
            rec.update(status="infeasible", reason=e.reason, oracle_agrees=opt is None)
            out.append(rec)
            continue
        except StructureError as e:
            rec.update(status="skipped", reason=str(e))
            out.append(rec)
            continue
        problems = verify_solution(inst, rep.solution)
        cost = rep.solution.total_cost
        rec.update(
            status="ok" if not problems else "invalid",
            algorithm=rep.algorithm,
            cost=str(cost),
            tp_lower_bound=str(rep.lower_bound_used),
            claimed_factor=rep.claimed_factor,
            seconds=round(time.perf_counter() - t0, 6),
        )
        if problems:
            rec["problems"] = problems
        if opt == "n/a":
            rec["ratio"] = "n/a"
        elif isinstance(opt, int):
            rec["opt"] = str(opt)
            rec["ratio"] = (cost / opt) if opt else (1.0 if cost == 0 else float("inf"))
            rec["within_factor"] = cost <= rep.claimed_factor * opt
        out.append(rec)
    return out


def _summary(records):
    groups: dict = {}
    for r in records:
        if r.get("status") != "ok":
            continue
        groups.setdefault(f"{r['variant']}/{r['algorithm']}", []).append(r)
    out = {}
    for key, rs in sorted(groups.items()):
        ratios = [r["ratio"] for r in rs if isinstance(r.get("ratio"), float)]
        out[key] = {
            "count": len(rs),
            "max_seconds": max(r["seconds"] for r in rs),
            "mean_ratio": sum(ratios) / len(ratios) if ratios else "n/a",
            "max_ratio": max(ratios) if ratios else "n/a",
            "claimed_factor": rs[0]["claimed_factor"],
            "factor_violations": sum(1 for r in rs if r.get("within_factor") is False),
        }
    return out


def trial_instances(variants, trials: int, seed: int = 0):
    """Seeded desk-scale instances, ``trials`` per variant, all within oracle scale."""
    import random

    rng = random.Random(seed)
    out = []
    for var in variants:
        for t in range(trials):
            n = rng.randint(3, 6)
            if var in DEPOT_VARIANTS:
                k = rng.randint(1, min(3, n - 1))
                inst = generate_instance(n, k, k, 3, "closure", rng.randrange(2**31), var)
            else:
                m = rng.randint(1, 3)
                inst = generate_instance(n, m, 0, 3, "closure", rng.randrange(2**31), var)
            out.append((f"{var}-{t:04d}", dumps_instance(inst)))
    return out


def cmd_bench(a) -> int:
    variants = [v.strip() for v in a.variants.split(",")] if a.variants else list(VARIANTS)
    bad = [v for v in variants if v not in VARIANTS]
    if bad:
        raise StructureError(f"unknown variants {bad}")
    named: list[tuple[str, str]] = []
    if a.corpus:
        if not Path(a.corpus).is_dir():
            raise StructureError(f"{a.corpus}: not a directory")
        named += [(str(p), p.read_text()) for p in sorted(Path(a.corpus).glob("*.json"))]
    if a.trials:
        named += trial_instances(variants, a.trials, a.seed)
    algs = a.algorithm or ["auto"]
    jobs = [(name, text, algs, a.bd_engine, not a.no_oracle) for name, text in named]
    workers = threads()
    t0 = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_bench_one, jobs))
    else:
        chunks = [_bench_one(j) for j in jobs]
    records = [r for c in chunks for r in c if r.get("variant", variants[0]) in variants]
    report = {
        "corpus": a.corpus,
        "instances": len(named),
        "threads": workers,
        "bd_engine": a.bd_engine,
        "wall_seconds": round(time.perf_counter() - t0, 6),
        "summary": _summary(records),
        "invalid": sum(1 for r in records if r.get("status") == "invalid"),
        "records": records,
    }
    _write(a.out, json.dumps(report, indent=1) + "\n")
    return BAD_INPUT if report["invalid"] else OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvmtsp", description="many-visits multiple TSP toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="run an approximation algorithm")
    s.add_argument("instance")
    s.add_argument("--algorithm", default="auto", choices=("auto",) + ALGORITHMS)
    s.add_argument("--bd-engine", default="exact", choices=ENGINES)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="exact optimum for tiny instances")
    o.add_argument("instance")
    o.add_argument("--out")
    o.set_defaults(fn=cmd_oracle)

    g = sub.add_parser("gen", help="generate a random metric instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--depots", type=int, default=0)
    g.add_argument("--rmax", default="3", help="max request, decimal (may be huge)")
    g.add_argument("--metric", default="closure", choices=("closure", "euclidean"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--variant", choices=VARIANTS)
    g.add_argument("--cmax", type=int, default=100)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    b = sub.add_parser("bench", help="run algorithms over a corpus directory")
    b.add_argument("--corpus", help="directory of instance files")
    b.add_argument("--variants", help="comma-separated variant filter, default all")
    b.add_argument("--trials", type=int, default=0, help="generated instances per variant")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algorithm", action="append", choices=("auto",) + ALGORITHMS)
    b.add_argument("--bd-engine", default="exact", choices=ENGINES)
    b.add_argument("--no-oracle", action="store_true", help="skip the exact-optimum ratio column")
    b.add_argument("--out")
    b.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    try:
        return a.fn(a)
    except InfeasibleError as e:
        _err(f"infeasible: {e.reason}")
        return INFEASIBLE
    except ScaleGuardError as e:
        _err(str(e))
        return BAD_INPUT
    except (StructureError, ValueError) as e:
        _err(str(e))
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
