"""Timing of the empty-tours algorithm on n = 20 with huge requests.

    python3 scripts/big_requests.py [--seeds 10] [--exp 18 100]
"""
import argparse
import time

from mvmtsp.algorithms import solve_p3
from mvmtsp.core import Instance
from mvmtsp.io import generate_instance
from mvmtsp.oracle import verify_solution

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=20)
ap.add_argument("--m", type=int, default=3)
ap.add_argument("--seeds", type=int, default=10)
ap.add_argument("--exp", type=int, nargs="+", default=[18, 100])
args = ap.parse_args()

print("metric     seed  r        seconds  updates  cost/r")
for e in args.exp:
    worst = 0.0
    for metric in ("euclidean", "closure"):
        for s in range(args.seeds):
            b = generate_instance(args.n, args.m, 0, 3, metric, 100 + s, "P3")
            I = Instance(b.costs, {v: 10**e for v in range(args.n)}, (), args.m, "P3")
            t0 = time.perf_counter()
            rep = solve_p3(I)
            dt = time.perf_counter() - t0
            assert not verify_solution(I, rep.solution)
            worst = max(worst, dt)
            print(f"{metric:<10} {100 + s:<5} 1e{e:<6} {dt:7.2f}  {rep.stats.get('updates', 0):7d}  "
                  f"{rep.solution.total_cost / 10**e:.3f}")
    print(f"worst at 1e{e}: {worst:.2f}s")
