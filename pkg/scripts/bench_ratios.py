"""Approximation ratios against the oracle on seeded desk-scale instances.

Thin wrapper over ``mvmtsp bench``; honours MVMTSP_THREADS.

    python3 scripts/bench_ratios.py [--trials 50] [--out report.json]
"""
import argparse
import json
import sys

from mvmtsp.cli import main

ap = argparse.ArgumentParser()
ap.add_argument("--trials", type=int, default=50)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--out", default="bench_report.json")
args = ap.parse_args()

code = main(["bench", "--trials", str(args.trials), "--seed", str(args.seed), "--out", args.out])
rep = json.load(open(args.out))
print(f"{'variant/alg':<12} {'count':>5} {'mean':>7} {'max':>7} {'factor':>6} {'max s':>7}")
for key, s in rep["summary"].items():
    fmt = lambda x: f"{x:7.3f}" if isinstance(x, float) else f"{x:>7}"
    print(f"{key:<12} {s['count']:>5} {fmt(s['mean_ratio'])} {fmt(s['max_ratio'])} "
          f"{s['claimed_factor']:>6} {s['max_seconds']:7.3f}")
print(f"invalid solutions: {rep['invalid']}, wall {rep['wall_seconds']:.1f}s")
sys.exit(code)
