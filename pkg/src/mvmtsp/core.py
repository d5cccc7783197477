"""Domain types shared by every solver: costs, instances, compact multigraphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

VARIANTS = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8")
DEPOT_VARIANTS = frozenset({"P5", "P6", "P7", "P8"})
EMPTY_ALLOWED = frozenset({"P3", "P4", "P7", "P8"})
DISJOINT = frozenset({"P2", "P4", "P6", "P8"})

MAX_COST = 2**32


class MVMTSPError(Exception):
    """Base class for all library errors."""


class StructureError(MVMTSPError, ValueError):
    """Malformed input: wrong shapes, asymmetric matrices, bad keys."""


class InfeasibleError(MVMTSPError):
    """The instance admits no feasible solution (the algorithms answer NO)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ScaleGuardError(MVMTSPError):
    """Instance too large for an exhaustive routine."""


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


class CostMatrix:
    """Symmetric non-negative integer costs; ``c[v][v]`` is the self-loop cost."""

    __slots__ = ("n", "c", "cmin")

    def __init__(self, rows: Sequence[Sequence[int]]):
        n = len(rows)
        if n == 0:
            raise StructureError("cost matrix must have at least one vertex")
        c = []
        for i, row in enumerate(rows):
            if len(row) != n:
                raise StructureError(f"row {i} has length {len(row)}, expected {n}")
            out = []
            for j, x in enumerate(row):
                if isinstance(x, bool) or int(x) != x:
                    raise StructureError(f"cost[{i}][{j}] = {x!r} is not an integer")
                x = int(x)
                if x < 0 or x > MAX_COST:
                    raise StructureError(f"cost[{i}][{j}] = {x} outside [0, 2^32]")
                out.append(x)
            c.append(tuple(out))
        for i in range(n):
            for j in range(i + 1, n):
                if c[i][j] != c[j][i]:
                    raise StructureError(f"cost matrix asymmetric at ({i}, {j})")
        self.n = n
        self.c = tuple(c)
        self.cmin = tuple(
            min((c[v][u] for u in range(n) if u != v), default=None) for v in range(n)
        )

    def __call__(self, u: int, v: int) -> int:
        return self.c[u][v]

    def __eq__(self, other):
        return isinstance(other, CostMatrix) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"CostMatrix({[list(r) for r in self.c]})"

    def submatrix(self, vertices: Sequence[int]) -> "CostMatrix":
        return CostMatrix([[self.c[u][v] for v in vertices] for u in vertices])


def validate_metric(costs) -> list[tuple]:
    """Return every violated triangle inequality and self-loop bound.

    Accepts a :class:`CostMatrix` or a raw square matrix; structural problems
    raise :class:`StructureError` instead of being reported as violations.
    """
    if not isinstance(costs, CostMatrix):
        costs = CostMatrix(costs)
    c, n = costs.c, costs.n
    violations = []
    for u in range(n):
        for w in range(u + 1, n):
            for v in range(n):
                if v in (u, w):
                    continue
                if c[u][w] > c[u][v] + c[v][w]:
                    violations.append(("triangle", u, v, w))
    if n >= 2:
        for v in range(n):
            if c[v][v] > 2 * costs.cmin[v]:
                violations.append(("self_loop", v))
    return violations


class Multigraph:
    """Sparse map from canonical vertex pairs to positive multiplicities.

    Instances are treated as immutable; every operation returns a new object.
    ``universe`` is the number of vertices of the underlying complete graph.
    """

    __slots__ = ("universe", "_x")

    def __init__(self, universe: int, edges: Mapping[tuple[int, int], int] | Iterable = ()):
        self.universe = universe
        x: dict[tuple[int, int], int] = {}
        items = edges.items() if isinstance(edges, Mapping) else edges
        for (u, v), k in items:
            if not (0 <= u < universe and 0 <= v < universe):
                raise StructureError(f"edge ({u}, {v}) outside universe of size {universe}")
            k = int(k)
            if k < 0:
                raise StructureError(f"negative multiplicity on ({u}, {v})")
            if k:
                key = edge_key(u, v)
                x[key] = x.get(key, 0) + k
        self._x = x

    @classmethod
    def _raw(cls, universe: int, x: dict) -> "Multigraph":
        mg = cls.__new__(cls)
        mg.universe = universe
        mg._x = {k: v for k, v in x.items() if v}
        return mg

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._x))

    def items(self):
        return sorted(self._x.items())

    def to_dict(self) -> dict[tuple[int, int], int]:
        return dict(self._x)

    def __len__(self):
        return len(self._x)

    def __bool__(self):
        return bool(self._x)

    def __getitem__(self, key):
        return self._x.get(edge_key(*key), 0)

    def mult(self, u: int, v: int) -> int:
        return self._x.get(edge_key(u, v), 0)

    def __eq__(self, other):
        return (
            isinstance(other, Multigraph)
            and self.universe == other.universe
            and self._x == other._x
        )

    def __hash__(self):
        return hash((self.universe, frozenset(self._x.items())))

    def __repr__(self):
        body = ", ".join(f"{u}-{v}:{k}" for (u, v), k in self.items())
        return f"Multigraph({self.universe}, {{{body}}})"

    def total(self) -> int:
        """Total number of edges counted with multiplicity."""
        return sum(self._x.values())

    def degree(self, v: int) -> int:
        return sum(k for (a, b), k in self._x.items() if a != b and v in (a, b))

    def dotted_degree(self, v: int) -> int:
        return self.degree(v) + 2 * self._x.get((v, v), 0)

    def dotted_degrees(self) -> list[int]:
        deg = [0] * self.universe
        for (a, b), k in self._x.items():
            deg[a] += k
            deg[b] += k
        return deg

    def vertices(self) -> set[int]:
        out = set()
        for a, b in self._x:
            out.add(a)
            out.add(b)
        return out

    def cost(self, costs: CostMatrix) -> int:
        c = costs.c
        return sum(k * c[a][b] for (a, b), k in self._x.items())

    def scaled(self, factor: int) -> "Multigraph":
        return Multigraph._raw(self.universe, {e: k * factor for e, k in self._x.items()})

    def restrict(self, vertices) -> "Multigraph":
        vs = set(vertices)
        return Multigraph._raw(
            self.universe, {e: k for e, k in self._x.items() if e[0] in vs and e[1] in vs}
        )

    def __add__(self, other: "Multigraph") -> "Multigraph":
        return mg_sum(self, other)

    def __sub__(self, other: "Multigraph") -> "Multigraph":
        if self.universe != other.universe:
            raise StructureError("universe mismatch")
        x = dict(self._x)
        for e, k in other._x.items():
            left = x.get(e, 0) - k
            if left < 0:
                raise StructureError(f"cannot remove {k} copies of {e}")
            x[e] = left
        return Multigraph._raw(self.universe, x)


def mg_sum(X: Multigraph, Y: Multigraph) -> Multigraph:
    if X.universe != Y.universe:
        raise StructureError(f"universe mismatch: {X.universe} vs {Y.universe}")
    x = dict(X._x)
    for e, k in Y._x.items():
        x[e] = x.get(e, 0) + k
    return Multigraph._raw(X.universe, x)


def components(X: Multigraph, universe: Iterable[int] | None = None):
    """Connected components of the support of ``X``.

    Returns ``(parts, uncovered)`` where ``parts`` is a list of sorted vertex
    lists ordered by smallest vertex, and ``uncovered`` lists the vertices of
    ``universe`` touched by no edge. Each self-loop covers its vertex.
    """
    if universe is None:
        universe = range(X.universe)
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in X._x:
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in parent:
        groups.setdefault(find(v), []).append(v)
    parts = sorted(sorted(g) for g in groups.values())
    uncovered = sorted(v for v in universe if v not in parent)
    return parts, uncovered


def is_connected(X: Multigraph) -> bool:
    parts, _ = components(X)
    return len(parts) <= 1


@dataclass(frozen=True)
class Instance:
    costs: CostMatrix
    requests: Mapping[int, int]
    depots: tuple[int, ...] = ()
    agents: int = 1
    variant: str = "P1"
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise StructureError(f"unknown variant {self.variant!r}")
        n = self.costs.n
        object.__setattr__(self, "depots", tuple(self.depots))
        object.__setattr__(self, "requests", {int(k): int(v) for k, v in self.requests.items()})
        if self.agents < 1:
            raise StructureError("agent count must be positive")
        if len(set(self.depots)) != len(self.depots):
            raise StructureError("duplicate depot")
        for d in self.depots:
            if not 0 <= d < n:
                raise StructureError(f"depot {d} outside vertex range")
        if self.variant in DEPOT_VARIANTS:
            if not self.depots:
                raise StructureError(f"{self.variant} requires a non-empty depot set")
            if self.agents != len(self.depots):
                raise StructureError("agent count must equal the number of depots")
        elif self.depots:
            raise StructureError(f"{self.variant} takes no depots")
        cities = set(range(n)) - set(self.depots)
        if set(self.requests) != cities:
            extra = set(self.requests) - cities
            if extra & set(self.depots):
                raise StructureError("depots carry no request")
            raise StructureError("requests must be given for exactly the non-depot vertices")
        for v, r in self.requests.items():
            if r < 1:
                raise StructureError(f"request of vertex {v} must be >= 1")
        if self.names is not None and len(self.names) != n:
            raise StructureError("names length mismatch")

    @property
    def n(self) -> int:
        return self.costs.n

    @property
    def cities(self) -> list[int]:
        ds = set(self.depots)
        return [v for v in range(self.n) if v not in ds]

    @property
    def total_requests(self) -> int:
        return sum(self.requests.values())

    def with_variant(self, variant: str, agents: int | None = None, depots=None) -> "Instance":
        return Instance(
            self.costs,
            self.requests,
            self.depots if depots is None else tuple(depots),
            self.agents if agents is None else agents,
            variant,
            self.names,
        )

    def name(self, v: int) -> str:
        return self.names[v] if self.names else str(v)


@dataclass(frozen=True)
class Solution:
    agent_tours: tuple[Multigraph, ...]
    variant: str
    total_cost: int = field(default=-1)

    @classmethod
    def build(cls, tours: Sequence[Multigraph], variant: str, costs: CostMatrix) -> "Solution":
        tours = tuple(tours)
        return cls(tours, variant, sum(t.cost(costs) for t in tours))

    def aggregate(self) -> Multigraph:
        if not self.agent_tours:
            raise StructureError("solution without agents")
        out = self.agent_tours[0]
        for t in self.agent_tours[1:]:
            out = mg_sum(out, t)
        return out
