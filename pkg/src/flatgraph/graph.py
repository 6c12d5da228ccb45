"""Finite simple graphs, minor operations and the named pattern graphs.

Vertices are always the dense integers ``0..n-1``.  Edges are stored as
sorted pairs ``(u, v)`` with ``u < v``.  Graphs are immutable; every
operation returns a new graph.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph operations."""


class MissingEdgeError(GraphError):
    pass


class NonAdjacentPairError(GraphError):
    pass


class UnknownPatternError(GraphError):
    pass


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"negative vertex count {self.n}")
        clean = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {e} has an endpoint outside 0..{self.n - 1}")
            clean.add(norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "Graph":
        pairs = [tuple(e) for e in edges]
        for e in pairs:
            if len(e) != 2:
                raise GraphError(f"edge {e} is not a pair")
        seen = set()
        for u, v in pairs:
            key = norm_edge(u, v)
            if key in seen:
                raise GraphError(f"parallel edge {key}")
            seen.add(key)
        return cls(n, frozenset(seen))

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree_sequence(self) -> list[int]:
        return sorted(len(nb) for nb in self.adjacency())

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    def add_edge(self, e: Iterable[int]) -> "Graph":
        u, v = e
        return Graph(self.n, self.edges | {norm_edge(u, v)})

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "Graph":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = data["n"]
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"graph JSON needs 'n' and 'edges': {exc}") from exc
        if not isinstance(n, int) or isinstance(n, bool):
            raise GraphError("'n' must be an integer")
        return cls.from_edges(n, edges)

    def relabel(self, perm: Mapping[int, int] | list[int]) -> "Graph":
        return Graph(self.n, frozenset(norm_edge(perm[u], perm[v]) for u, v in self.edges))

    def canonical_form(self) -> tuple:
        return canonical_form(self)

    def is_isomorphic(self, other: "Graph") -> bool:
        if self.n != other.n or self.m != other.m:
            return False
        if self.degree_sequence() != other.degree_sequence():
            return False
        return canonical_form(self) == canonical_form(other)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"


@dataclass(frozen=True)
class MinorModel:
    """Branch sets certifying that a pattern graph is a minor of a host."""

    branch_sets: Mapping[int, frozenset[int]]

    def validate(self, host: Graph, pattern: Graph) -> None:
        """Raise ``GraphError`` unless this is a model of ``pattern`` in ``host``."""
        if set(self.branch_sets) != set(pattern.vertices):
            raise GraphError("branch sets must be indexed by the pattern vertices")
        used: set[int] = set()
        owner: dict[int, int] = {}
        adj = host.adjacency()
        for pv, bs in self.branch_sets.items():
            if not bs:
                raise GraphError(f"empty branch set for pattern vertex {pv}")
            if used & bs:
                raise GraphError("branch sets overlap")
            if any(not 0 <= x < host.n for x in bs):
                raise GraphError("branch set mentions a vertex outside the host")
            used |= bs
            for x in bs:
                owner[x] = pv
            if not _connected_within(adj, bs):
                raise GraphError(f"branch set of pattern vertex {pv} is disconnected")
        touching = set()
        for u, v in host.edges:
            a, b = owner.get(u), owner.get(v)
            if a is not None and b is not None and a != b:
                touching.add(norm_edge(a, b))
        missing = pattern.edges - touching
        if missing:
            raise GraphError(f"pattern edges {sorted(missing)} have no host edge")

    def is_valid(self, host: Graph, pattern: Graph) -> bool:
        try:
            self.validate(host, pattern)
        except GraphError:
            return False
        return True

    def to_json(self) -> dict:
        return {str(k): sorted(v) for k, v in sorted(self.branch_sets.items())}


def _connected_within(adj: list[set[int]], subset: Iterable[int]) -> bool:
    subset = set(subset)
    if not subset:
        return False
    start = next(iter(subset))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in subset and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == subset


def delete_edge(g: Graph, e: Iterable[int]) -> Graph:
    u, v = e
    key = norm_edge(u, v)
    if key not in g.edges:
        raise MissingEdgeError(f"edge {key} is not in the graph")
    return Graph(g.n, g.edges - {key})


def delete_vertex(g: Graph, v: int) -> Graph:
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} is not in the graph")
    shift = lambda x: x if x < v else x - 1  # noqa: E731
    edges = frozenset(norm_edge(shift(a), shift(b)) for a, b in g.edges if v not in (a, b))
    return Graph(g.n - 1, edges)


def contract_edge(g: Graph, e: Iterable[int]) -> Graph:
    """Merge the endpoints of ``e``; the merged vertex keeps the smaller id."""
    u, v = e
    keep, gone = norm_edge(u, v)
    if (keep, gone) not in g.edges:
        raise MissingEdgeError(f"edge {(keep, gone)} is not in the graph")
    shift = lambda x: x if x < gone else x - 1  # noqa: E731
    edges = set()
    for a, b in g.edges:
        a = keep if a == gone else a
        b = keep if b == gone else b
        if a != b:
            edges.add(norm_edge(shift(a), shift(b)))
    return Graph(g.n - 1, frozenset(edges))


def is_forest(g: Graph) -> bool:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def connected_components(g: Graph) -> list[list[int]]:
    adj = g.adjacency()
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [s], [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def zero_extension(g: Graph, v1: int, v2: int) -> Graph:
    """Add a fresh vertex ``g.n`` joined to the adjacent pair ``v1, v2``."""
    if not g.has_edge(v1, v2):
        raise NonAdjacentPairError(f"{v1} and {v2} are not adjacent")
    new = g.n
    return Graph(g.n + 1, g.edges | {(v1, new), (v2, new)})


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a simple cycle needs at least 3 vertices")
    return Graph(n, frozenset(norm_edge(i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def complete_multipartite(*sizes: int) -> Graph:
    labels = [k for k, s in enumerate(sizes) for _ in range(s)]
    n = len(labels)
    return Graph(n, frozenset((i, j) for i, j in itertools.combinations(range(n), 2) if labels[i] != labels[j]))


# rim 0-1-2-3-0, hub 4
W4 = Graph(5, frozenset([(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)]))
# K4 on {0,1,2,3} and K4 on {0,1,4,5}, shared edge 01 removed
K4EK4 = Graph(6, frozenset([(0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
                            (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)]))


def pattern_graph(name: str, n: int | None = None) -> Graph:
    """Return a named graph: K3, K4, K5, K222, W4, K4eK4, or Kn / Cn with ``n``.

    Parametric names may also carry the size inline (``"K7"``, ``"C5"``).
    """
    key = name.strip()
    fixed = {
        "K3": lambda: complete_graph(3),
        "K4": lambda: complete_graph(4),
        "K5": lambda: complete_graph(5),
        "K222": lambda: complete_multipartite(2, 2, 2),
        "W4": lambda: W4,
        "K4eK4": lambda: K4EK4,
    }
    if key in fixed and n is None:
        return fixed[key]()
    family, _, size = key.partition("(")
    if size:
        size = size.rstrip(")")
    elif key[:1] in ("K", "C") and key[1:].isdigit():
        family, size = key[0], key[1:]
    if family in ("Kn", "K", "Cn", "C"):
        if n is None:
            if not size:
                raise UnknownPatternError(f"{name} needs a size")
            n = int(size)
        if n < 1:
            raise GraphError("pattern size must be at least 1")
        return complete_graph(n) if family.startswith("K") else cycle_graph(n)
    raise UnknownPatternError(f"unknown pattern graph {name!r}")


def _refine(g: Graph) -> list[list[int]]:
    """Ordered cells of an equitable-ish partition by iterated degree refinement."""
    adj = g.adjacency()
    colour = [len(adj[v]) for v in range(g.n)]
    while True:
        sig = [(colour[v], tuple(sorted(colour[w] for w in adj[v]))) for v in range(g.n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[sig[v]] for v in range(g.n)]
        if len(set(new)) == len(set(colour)):
            colour = new
            break
        colour = new
    cells: dict[int, list[int]] = {}
    for v in range(g.n):
        cells.setdefault(colour[v], []).append(v)
    return [cells[c] for c in sorted(cells)]


def canonical_form(g: Graph) -> tuple:
    """Isomorphism-invariant key via refinement plus backtracking over cells.

    Exponential in the cell sizes; intended for graphs with at most ~10 vertices.
    """
    cells = _refine(g)
    best = None
    adj = g.adjacency()
    order: list[int] = []
    pos: dict[int, int] = {}

    def edges_so_far() -> tuple:
        return tuple(sorted(norm_edge(pos[u], pos[v])
                            for u in order for v in adj[u] if v in pos and pos[v] < pos[u]))

    def rec(ci: int, remaining: list[int]):
        nonlocal best
        if ci == len(cells):
            key = edges_so_far()
            if best is None or key < best:
                best = key
            return
        if not remaining:
            rec(ci + 1, list(cells[ci + 1]) if ci + 1 < len(cells) else [])
            return
        for v in list(remaining):
            pos[v] = len(order)
            order.append(v)
            rest = [w for w in remaining if w != v]
            rec(ci, rest)
            order.pop()
            del pos[v]

    if g.n == 0:
        return (0, ())
    rec(0, list(cells[0]))
    sizes = tuple(len(c) for c in cells)
    return (g.n, sizes, best)
