"""Seeded search for a small instance where shared cities pay off.

Looks for OPT(P5) < OPT(P6) and, with the depots read as request-1 cities,
OPT(P1) < OPT(P2).  The first hit is the frozen fixture in tests/fixtures.py.

    python3 scripts/find_overlap_fixture.py [--seeds 400]
"""
import argparse

from mvmtsp.core import Instance
from mvmtsp.io import generate_instance
from mvmtsp.oracle import exact_opt_all

ap = argparse.ArgumentParser()
ap.add_argument("--seeds", type=int, default=400)
args = ap.parse_args()

for seed in range(args.seeds):
    I = generate_instance(4, 2, 2, 2, "euclidean", seed, "P5", cmax=20)
    r = exact_opt_all(I, ["P5", "P6"])
    if not (r["P5"] and r["P6"] and r["P5"].cost < r["P6"].cost):
        continue
    req = dict(I.requests)
    req.update({d: 1 for d in I.depots})
    u = exact_opt_all(Instance(I.costs, req, (), 2, "P1"), ["P1", "P2"])
    if u["P1"] and u["P2"] and u["P1"].cost < u["P2"].cost:
        print(f"seed {seed}: costs {I.costs.c} depots {I.depots} requests {I.requests}")
        print(f"P5={r['P5'].cost} P6={r['P6'].cost} P1={u['P1'].cost} P2={u['P2'].cost}")
        break
else:
    print("no separating instance in range")
