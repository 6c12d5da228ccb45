"""Rigidity matrices in lp^d, independence testing and forest partitions."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Edge, Graph
from .spaces import INF, SpaceDescriptor, SpaceError

RANK_RTOL = 1e-9
RESAMPLE_CAP = 100
REFINE_STEPS = 40


class NondifferentiableError(ValueError):
    def __init__(self, message: str, edge: Edge | None = None):
        super().__init__(message)
        self.edge = edge


def norm_gradient(p: float, z) -> np.ndarray:
    """Derivative of the lp norm at ``z``, a norming functional of dual norm 1."""
    return _gradients(p, np.asarray(z, dtype=float)[None, :])[0]


def _gradients(p: float, diffs: np.ndarray) -> np.ndarray:
    """Row-wise norm gradients; raises with the offending row index in ``edge``."""
    mags = np.abs(diffs)
    top = mags.max(axis=1)
    bad = np.flatnonzero(top == 0)
    if bad.size:
        raise NondifferentiableError("the norm is not differentiable at 0", int(bad[0]))
    if p == 1:
        bad = np.flatnonzero((diffs == 0).any(axis=1))
        if bad.size:
            raise NondifferentiableError("l1 norm is not differentiable with a zero coordinate", int(bad[0]))
        return np.sign(diffs)
    if p == INF:
        hits = mags == top[:, None]
        bad = np.flatnonzero(hits.sum(axis=1) > 1)
        if bad.size:
            raise NondifferentiableError("linf norm is not differentiable at a tied maximum", int(bad[0]))
        return np.where(hits, np.sign(diffs), 0.0)
    w = mags / top[:, None]
    nrm = np.sum(w ** p, axis=1) ** (1.0 / p)
    return np.sign(diffs) * (w / nrm[:, None]) ** (p - 1)


def rigidity_matrix(g: Graph, space: SpaceDescriptor, r) -> np.ndarray:
    """Jacobian of the measurement map: rows are edges, columns ``v * d + k``."""
    if not space.finite:
        raise SpaceError("rigidity matrices need a finite-dimensional space")
    r = np.asarray(r, dtype=float)
    d = int(space.dim)
    if r.shape != (g.n, d):
        raise SpaceError(f"realization of shape {r.shape}, expected {(g.n, d)}")
    edges = g.sorted_edges()
    mat = np.zeros((g.m, g.n, d))
    if not edges:
        return mat.reshape(0, g.n * d)
    us, vs = np.array(edges).T
    try:
        phi = _gradients(space.p, r[us] - r[vs])
    except NondifferentiableError as exc:
        e = edges[exc.edge]
        raise NondifferentiableError(f"edge {e}: {exc}", e) from exc
    rows = np.arange(g.m)
    mat[rows, us] = phi
    mat[rows, vs] = -phi
    return mat.reshape(g.m, g.n * d)


def numeric_rank(mat: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


@dataclass
class IndependenceResult:
    independent: bool
    witness: np.ndarray | None
    trials: int
    best_rank: int

    @property
    def certified(self) -> bool:
        return self.independent


def random_differentiable_realization(g: Graph, space: SpaceDescriptor, rng: np.random.Generator,
                                      cap: int = RESAMPLE_CAP) -> np.ndarray | None:
    d = int(space.dim)
    for _ in range(cap):
        r = rng.uniform(-1.0, 1.0, size=(g.n, d))
        if _rank_or_none(g, space, r) is not None:
            return r
    return None


def _rank_or_none(g: Graph, space: SpaceDescriptor, r: np.ndarray, tol: float = RANK_RTOL) -> int | None:
    try:
        return numeric_rank(rigidity_matrix(g, space, r), tol)
    except NondifferentiableError:
        return None


def _trial(g: Graph, space: SpaceDescriptor, ss: np.random.SeedSequence, tol: float,
           refine_steps: int) -> tuple[np.ndarray | None, int]:
    d = int(space.dim)
    rng = np.random.default_rng(ss)
    r = random_differentiable_realization(g, space, rng)
    if r is None:
        return None, -1
    rank = _rank_or_none(g, space, r, tol)
    for _ in range(refine_steps):
        if rank == g.m:
            break
        cand = r.copy()
        cand[rng.integers(g.n)] = rng.uniform(-1.0, 1.0, size=d)
        k = _rank_or_none(g, space, cand, tol)
        if k is not None and k >= rank:
            r, rank = cand, k
    return r, rank


def independence_search(g: Graph, space: SpaceDescriptor, trials: int = 50,
                        tol: float = RANK_RTOL, seed: int = 0,
                        refine_steps: int = REFINE_STEPS, threads: int = 1) -> IndependenceResult:
    """Look for a realization whose rigidity matrix has rank |E|.

    Each trial starts from coordinates drawn uniformly from [-1, 1] (own
    random stream spawned from ``seed``) and then makes up to
    ``refine_steps`` moves, each redrawing one vertex uniformly and keeping
    the move unless the rank drops.  A positive answer carries its witness.
    With ``threads > 1`` trials run concurrently; the reported trial is still
    the first successful one in seed order, so results do not depend on it.
    """
    if not space.finite:
        raise SpaceError("independence testing needs a finite-dimensional space")
    if trials < 1:
        raise ValueError("trials must be positive")
    if threads < 1:
        raise ValueError("threads must be positive")
    d = int(space.dim)
    if g.m == 0:
        return IndependenceResult(True, np.zeros((g.n, d)), 0, 0)
    streams = np.random.SeedSequence(seed).spawn(trials)

    def run(ss):
        return _trial(g, space, ss, tol, refine_steps)

    if threads == 1:
        results = (run(ss) for ss in streams)
    else:
        pool = ThreadPoolExecutor(threads)
        results = pool.map(run, streams)
    best = -1
    try:
        for t, (r, rank) in enumerate(results, start=1):
            best = max(best, rank)
            if rank == g.m:
                return IndependenceResult(True, r, t, rank)
    finally:
        if threads > 1:
            pool.shutdown(cancel_futures=True)
    return IndependenceResult(False, None, trials, best)


def is_independent_numeric(g: Graph, space: SpaceDescriptor, trials: int = 50,
                           tol: float = RANK_RTOL, seed: int = 0) -> bool:
    return independence_search(g, space, trials, tol, seed).independent


def graded_independence_check(g: Graph, space: SpaceDescriptor, r, ordering: Sequence[int],
                              tol: float = RANK_RTOL) -> bool:
    """True iff each vertex's functionals towards earlier neighbours are independent."""
    if sorted(ordering) != list(g.vertices):
        raise ValueError("ordering must be a permutation of the vertices")
    r = np.asarray(r, dtype=float)
    adj = g.adjacency()
    placed: set[int] = set()
    for vj in ordering:
        back = [vi for vi in adj[vj] if vi in placed]
        placed.add(vj)
        if not back:
            continue
        rows = []
        for vi in back:
            try:
                rows.append(norm_gradient(space.p, r[vj] - r[vi]))
            except NondifferentiableError as exc:
                raise NondifferentiableError(f"edge {(vj, vi)}: {exc}", (vj, vi)) from exc
        if numeric_rank(np.array(rows), tol) < len(rows):
            return False
    return True


def _forest_path(adj: dict[int, set[int]], edge_of: dict, s: int, t: int) -> list | None:
    """Edges on the path from s to t in a forest, or None if disconnected."""
    prev = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if t not in prev:
        return None
    path = []
    while prev[t] is not None:
        path.append(edge_of[frozenset((t, prev[t]))])
        t = prev[t]
    return path


def forest_partition(g: Graph, d: int) -> list[list[Edge]] | None:
    """Split the edges into ``d`` forests by matroid-union augmentation, if possible."""
    if d < 1:
        raise ValueError("d must be at least 1")
    adj = [{v: set() for v in g.vertices} for _ in range(d)]
    edge_of = {frozenset(e): e for e in g.edges}
    home: dict[Edge, int] = {}

    def put(e: Edge, i: int):
        u, v = e
        adj[i][u].add(v)
        adj[i][v].add(u)
        home[e] = i

    def take(e: Edge):
        u, v = e
        i = home.pop(e)
        adj[i][u].discard(v)
        adj[i][v].discard(u)

    for e in g.sorted_edges():
        parent: dict[Edge, tuple[Edge, int] | None] = {e: None}
        queue = deque([e])
        done = False
        while queue and not done:
            x = queue.popleft()
            for i in range(d):
                if home.get(x) == i:
                    continue
                path = _forest_path(adj[i], edge_of, *x)
                if path is None:
                    # x fits in forest i; shift edges back along the exchange chain
                    cur, target = x, i
                    while True:
                        if cur in home:
                            take(cur)
                        put(cur, target)
                        link = parent[cur]
                        if link is None:
                            break
                        cur, target = link
                    done = True
                    break
                for f in path:
                    if f not in parent:
                        parent[f] = (x, i)
                        queue.append(f)
        if not done:
            return None
    parts: list[list[Edge]] = [[] for _ in range(d)]
    for e, i in home.items():
        parts[i].append(e)
    return [sorted(p) for p in parts]
