"""Minor containment: branch-set search, K4-minor-freeness, forbidden families."""

from __future__ import annotations

from typing import Iterator, Sequence

from .graph import (
    Graph,
    MinorModel,
    canonical_form,
    contract_edge,
    delete_edge,
    delete_vertex,
)

DEFAULT_BUDGET = 10**7


class MinorBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"minor search exceeded its budget of {budget} nodes")
        self.budget = budget


class _Reduced:
    """Mutable working copy of a host graph; each vertex carries a bag of host ids."""

    def __init__(self, g: Graph):
        self.adj = {v: set(nb) for v, nb in enumerate(g.adjacency())}
        self.bag = {v: {v} for v in range(g.n)}

    def remove(self, v: int) -> None:
        for w in self.adj.pop(v):
            self.adj[w].discard(v)
        del self.bag[v]

    def absorb(self, v: int, into: int) -> None:
        """Contract edge ``v into``; ``into`` keeps its id and takes v's bag."""
        for w in self.adj[v]:
            if w != into:
                self.adj[w].add(into)
                self.adj[into].add(w)
        self.bag[into] |= self.bag[v]
        self.remove(v)

    def reduce(self, min_pattern_degree: int) -> None:
        # leaves are useless for patterns of min degree >= 2, and degree-2
        # vertices can be suppressed for patterns of min degree >= 3
        if min_pattern_degree < 1:
            return
        changed = True
        while changed:
            changed = False
            for v in sorted(self.adj):
                if v not in self.adj:
                    continue
                d = len(self.adj[v])
                if d == 0 or (d == 1 and min_pattern_degree >= 2):
                    self.remove(v)
                    changed = True
                elif d == 2 and min_pattern_degree >= 3:
                    a = min(self.adj[v])
                    self.absorb(v, a)
                    changed = True


def _connected_sets(adj: dict[int, set[int]], allowed: set[int], root: int,
                    max_size: int) -> Iterator[frozenset[int]]:
    """Every connected subset of ``allowed`` containing ``root``, each exactly once."""

    def grow(current: frozenset[int], frontier: list[int], excluded: frozenset[int]):
        yield current
        if len(current) >= max_size:
            return
        for i, v in enumerate(frontier):
            blocked = excluded | frozenset(frontier[:i])
            nxt = current | {v}
            ext = [w for w in frontier[i + 1:]]
            for w in sorted(adj[v]):
                if w in allowed and w not in nxt and w not in blocked and w not in ext:
                    ext.append(w)
            yield from grow(nxt, ext, blocked)

    start = [w for w in sorted(adj[root]) if w in allowed]
    yield from grow(frozenset([root]), start, frozenset())


def _components(adj: dict[int, set[int]], vertices: set[int]) -> list[set[int]]:
    left = set(vertices)
    out = []
    while left:
        s = left.pop()
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in left:
                    left.discard(y)
                    comp.add(y)
                    stack.append(y)
        out.append(comp)
    return out


class _BranchSearch:
    def __init__(self, adj: dict[int, set[int]], h: Graph, budget: int):
        self.adj = adj
        self.budget = budget
        self.nodes = 0
        hadj = h.adjacency()
        self.hadj = hadj
        self.order = sorted(h.vertices, key=lambda x: (-len(hadj[x]), x))
        self.rank = {pv: i for i, pv in enumerate(self.order)}
        self.host_order = sorted(adj, key=lambda x: (-len(adj[x]), x))
        self.host_rank = {v: i for i, v in enumerate(self.host_order)}
        self.assign: dict[int, frozenset[int]] = {}

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise MinorBudgetExceeded(self.budget)

    def touches(self, s: frozenset[int], t: frozenset[int]) -> bool:
        return any(self.adj[x] & t for x in s)

    def feasible(self, free: set[int], level: int) -> bool:
        """Every unplaced pattern vertex needs a free component touching its placed neighbours."""
        remaining = len(self.order) - level
        if len(free) < remaining:
            return False
        comps = None
        for pv in self.order[level:]:
            placed = [self.assign[q] for q in self.hadj[pv] if q in self.assign]
            if not placed:
                continue
            if comps is None:
                comps = _components(self.adj, free)
            if not any(all(self.touches(c, b) for b in placed) for c in map(frozenset, comps)):
                return False
        return True

    def run(self) -> bool:
        return self.rec(0, set(self.adj))

    def rec(self, level: int, free: set[int]) -> bool:
        self.tick()
        k = len(self.order)
        if level == k:
            return True
        pv = self.order[level]
        earlier = [self.assign[q] for q in self.hadj[pv] if q in self.assign]
        later = sum(1 for q in self.hadj[pv] if q not in self.assign)
        if level == k - 1:
            for comp in _components(self.adj, free):
                comp = frozenset(comp)
                if all(self.touches(comp, b) for b in earlier):
                    self.assign[pv] = comp
                    return True
            return False
        max_size = len(free) - (k - level - 1)
        for root in self.host_order:
            if root not in free:
                continue
            allowed = {v for v in free if self.host_rank[v] >= self.host_rank[root]}
            for s in _connected_sets(self.adj, allowed, root, max_size):
                self.tick()
                if not all(self.touches(s, b) for b in earlier):
                    continue
                rest = free - s
                if later:
                    outside = set().union(*(self.adj[x] for x in s)) & rest
                    if len(outside) < later:
                        continue
                self.assign[pv] = s
                if self.feasible(rest, level + 1) and self.rec(level + 1, rest):
                    return True
                del self.assign[pv]
        return False


def has_minor(g: Graph, h: Graph, budget: int = DEFAULT_BUDGET) -> tuple[bool, MinorModel | None]:
    """Decide whether ``h`` is a minor of ``g``; on success also return a model.

    Raises ``MinorBudgetExceeded`` when the search visits more than ``budget``
    nodes.
    """
    if h.n == 0:
        raise ValueError("pattern graph must be nonempty")
    if h.n > g.n or h.m > g.m:
        return False, None
    hdeg = [len(nb) for nb in h.adjacency()]
    red = _Reduced(g)
    red.reduce(min(hdeg))
    if len(red.adj) < h.n or sum(len(nb) for nb in red.adj.values()) // 2 < h.m:
        return False, None
    search = _BranchSearch(red.adj, h, budget)
    if not search.run():
        return False, None
    model = MinorModel({pv: frozenset().union(*(red.bag[x] for x in bs))
                        for pv, bs in search.assign.items()})
    model.validate(g, h)
    return True, model


def is_k4_minor_free(g: Graph) -> bool:
    """Series-parallel reduction: the graph is K4-minor-free iff it reduces to nothing.

    Vertices of degree at most one are deleted and degree-two vertices are
    suppressed with parallel edges merged on the spot; any simple graph of
    minimum degree three has a K4 minor, so a nonempty residue certifies one.
    """
    adj = {v: set(nb) for v, nb in enumerate(g.adjacency())}
    stack = list(adj)
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        nb = adj[v]
        if len(nb) > 2:
            continue
        for w in nb:
            adj[w].discard(v)
        if len(nb) == 2:
            a, b = nb
            adj[a].add(b)
            adj[b].add(a)
        del adj[v]
        stack.extend(nb)
    return not adj


def forbidden_minor_check(g: Graph, family: Sequence[Graph], budget: int = DEFAULT_BUDGET
                          ) -> tuple[Graph, MinorModel] | None:
    if not family:
        raise ValueError("forbidden family must be nonempty")
    for h in family:
        found, model = has_minor(g, h, budget)
        if found:
            return h, model
    return None


def has_minor_oracle(g: Graph, h: Graph) -> bool:
    """Reference check by exhaustive deletion/contraction with isomorphism memo.

    Exponential; meant for hosts with at most about seven vertices.
    """
    target = canonical_form(h)
    seen: set[tuple] = set()

    def contains_spanning(x: Graph) -> bool:
        # x and h have equally many vertices: is h a spanning subgraph of x?
        if x.m == h.m:
            return canonical_form(x) == target
        return any(visit(delete_edge(x, e)) for e in x.sorted_edges())

    def visit(x: Graph) -> bool:
        if x.n < h.n or x.m < h.m:
            return False
        key = canonical_form(x)
        if key in seen:
            return False
        seen.add(key)
        if x.n == h.n:
            return contains_spanning(x)
        if any(visit(delete_vertex(x, v)) for v in x.vertices):
            return True
        return any(visit(contract_edge(x, e)) for e in x.sorted_edges())

    return visit(g)

