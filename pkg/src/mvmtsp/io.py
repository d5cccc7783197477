"""JSON instance/solution files and the seeded metric instance generator.

Big integers (requests, multiplicities, totals) travel as decimal strings.
"""
from __future__ import annotations

import json
import math
import random
from typing import Any

from .core import DEPOT_VARIANTS, CostMatrix, Instance, Multigraph, Solution, StructureError, validate_metric

VERSION = 1


class ParseError(StructureError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _big(value, where: str) -> int:
    if isinstance(value, bool):
        raise ParseError(where, "expected a decimal integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        return int(value)
    raise ParseError(where, f"expected a decimal integer, got {value!r}")


def _loads(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}:{e.lineno}:{e.colno}", e.msg) from None


def instance_to_dict(inst: Instance) -> dict:
    names = list(inst.names) if inst.names else [str(v) for v in range(inst.n)]
    return {
        "version": VERSION,
        "vertices": names,
        "costs": [list(r) for r in inst.costs.c],
        "requests": {names[v]: str(r) for v, r in sorted(inst.requests.items())},
        "depots": [names[d] for d in inst.depots],
        "agents": inst.agents,
        "variant": inst.variant,
    }


def instance_from_dict(d: dict, source: str = "instance") -> Instance:
    if not isinstance(d, dict):
        raise ParseError(source, "top level must be an object")
    for key in ("vertices", "costs", "requests", "agents", "variant"):
        if key not in d:
            raise ParseError(f"{source}.{key}", "missing field")
    if d.get("version", VERSION) != VERSION:
        raise ParseError(f"{source}.version", f"unsupported version {d['version']!r}")
    names = d["vertices"]
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise ParseError(f"{source}.vertices", "expected a list of names")
    if len(set(names)) != len(names):
        raise ParseError(f"{source}.vertices", "duplicate vertex name")
    pos = {x: i for i, x in enumerate(names)}
    rows = d["costs"]
    if not isinstance(rows, list) or len(rows) != len(names):
        raise ParseError(f"{source}.costs", f"expected {len(names)} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ParseError(f"{source}.costs[{i}]", "expected a list")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise ParseError(f"{source}.costs[{i}][{j}]", f"expected an integer, got {x!r}")
    try:
        costs = CostMatrix(rows)
    except StructureError as e:
        raise ParseError(f"{source}.costs", str(e)) from None
    req = d["requests"]
    if not isinstance(req, dict):
        raise ParseError(f"{source}.requests", "expected an object")
    requests = {}
    for k, v in req.items():
        if k not in pos:
            raise ParseError(f"{source}.requests.{k}", "unknown vertex")
        requests[pos[k]] = _big(v, f"{source}.requests.{k}")
    depots = []
    for i, x in enumerate(d.get("depots", [])):
        if x not in pos:
            raise ParseError(f"{source}.depots[{i}]", f"unknown vertex {x!r}")
        depots.append(pos[x])
    if set(depots) & set(requests):
        raise ParseError(f"{source}.requests", "depots carry no request")
    agents = d["agents"]
    if isinstance(agents, bool) or not isinstance(agents, int):
        raise ParseError(f"{source}.agents", "expected an integer")
    try:
        return Instance(costs, requests, tuple(depots), agents, d["variant"], tuple(names))
    except StructureError as e:
        raise ParseError(source, str(e)) from None


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def loads_instance(text: str, source: str = "instance") -> Instance:
    return instance_from_dict(_loads(text, source), source)


def solution_to_dict(inst: Instance, sol: Solution, metadata: dict | None = None) -> dict:
    name = inst.name
    return {
        "variant": sol.variant,
        "total_cost": str(sol.total_cost),
        "agents": [
            {"edges": [[name(u), name(v), str(k)] for (u, v), k in T.items()]}
            for T in sol.agent_tours
        ],
        "metadata": dict(metadata or {}),
    }


def solution_from_dict(inst: Instance, d: dict, source: str = "solution") -> Solution:
    if not isinstance(d, dict):
        raise ParseError(source, "top level must be an object")
    names = list(inst.names) if inst.names else [str(v) for v in range(inst.n)]
    pos = {x: i for i, x in enumerate(names)}
    tours = []
    for i, a in enumerate(d.get("agents", [])):
        x = {}
        for j, e in enumerate(a.get("edges", [])):
            where = f"{source}.agents[{i}].edges[{j}]"
            if not isinstance(e, list) or len(e) != 3:
                raise ParseError(where, "expected [u, v, multiplicity]")
            u, v, k = e
            if u not in pos or v not in pos:
                raise ParseError(where, "unknown vertex")
            key = (min(pos[u], pos[v]), max(pos[u], pos[v]))
            x[key] = x.get(key, 0) + _big(k, where)
        try:
            tours.append(Multigraph(inst.n, x))
        except StructureError as e:
            raise ParseError(f"{source}.agents[{i}]", str(e)) from None
    total = _big(d.get("total_cost", "-1"), f"{source}.total_cost")
    return Solution(tuple(tours), d.get("variant", inst.variant), total)


def dumps_solution(inst: Instance, sol: Solution, metadata: dict | None = None) -> str:
    return json.dumps(solution_to_dict(inst, sol, metadata), indent=1) + "\n"


def loads_solution(inst: Instance, text: str, source: str = "solution") -> Solution:
    return solution_from_dict(inst, _loads(text, source), source)


# ------------------------------------------------------------ generator


def _closure(c: list[list[int]]) -> None:
    n = len(c)
    for k in range(n):
        ck = c[k]
        for i in range(n):
            cik = c[i][k]
            ci = c[i]
            for j in range(n):
                if cik + ck[j] < ci[j]:
                    ci[j] = cik + ck[j]


def generate_instance(
    n: int,
    m: int = 1,
    depots: int = 0,
    rmax: int = 3,
    metric: str = "closure",
    seed: int = 0,
    variant: str | None = None,
    cmax: int = 100,
) -> Instance:
    """Random metric instance; identical arguments give identical instances."""
    if n < 1:
        raise StructureError("n must be positive")
    if depots < 0 or (depots and depots >= n):
        raise StructureError("need 0 <= depots < n")
    if rmax < 1:
        raise StructureError("rmax must be >= 1")
    if variant is None:
        variant = "P5" if depots else "P1"
    if (variant in DEPOT_VARIANTS) != bool(depots):
        raise StructureError(f"variant {variant} conflicts with --depots {depots}")
    if depots and m != depots:
        m = depots
    rng = random.Random(seed)
    if metric == "closure":
        c = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                c[i][j] = c[j][i] = rng.randint(1, cmax)
    elif metric == "euclidean":
        pts = [(rng.randint(0, cmax), rng.randint(0, cmax)) for _ in range(n)]
        c = [[math.ceil(math.dist(p, q)) if p != q else 0 for q in pts] for p in pts]
        for i in range(n):
            for j in range(n):
                if i != j and c[i][j] == 0:
                    c[i][j] = 1
    else:
        raise StructureError(f"unknown metric {metric!r}")
    _closure(c)
    for v in range(n):
        cmin = min((c[v][u] for u in range(n) if u != v), default=0)
        c[v][v] = rng.randint(0, 2 * cmin) if n > 1 else rng.randint(0, cmax)
    dep = tuple(sorted(rng.sample(range(n), depots))) if depots else ()
    requests = {v: rng.randint(1, rmax) for v in range(n) if v not in dep}
    names = tuple(f"v{v}" for v in range(n))
    inst = Instance(CostMatrix(c), requests, dep, m, variant, names)
    if validate_metric(inst.costs):
        raise RuntimeError("generator produced a non-metric matrix")
    return inst
