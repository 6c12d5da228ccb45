"""Numerical search for realizations with prescribed edge lengths in lp^d.

Results here are evidence only: a small residual exhibits one realization,
a large residual after many restarts suggests (never proves) that none
exists.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .graph import Edge, Graph
from .spaces import INF, SpaceDescriptor, SpaceError, measurement_map

SMOOTH_L1 = 1.02
SMOOTH_LINF = 40.0


@dataclass(frozen=True)
class SolveConfig:
    restarts: int = 20
    max_iters: int = 3000
    tol: float = 1e-9
    seed: int = 0
    smoothing: float | None = None
    polish_rounds: int = 25
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.smoothing is not None and not 1 < self.smoothing < INF:
            raise ValueError("smoothing exponent must lie in (1, inf)")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    def surrogate(self, p: float) -> float:
        if p == 1:
            return self.smoothing or SMOOTH_L1
        if p == INF:
            return self.smoothing or SMOOTH_LINF
        return p


def _lengths(diffs: np.ndarray, p: float) -> np.ndarray:
    mags = np.abs(diffs)
    if p == INF:
        return mags.max(axis=1)
    if p == 1:
        return mags.sum(axis=1)
    top = mags.max(axis=1)
    safe = np.where(top > 0, top, 1.0)
    return top * np.sum((mags / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def residual(g: Graph, p: float, x: np.ndarray, target: np.ndarray) -> float:
    """Sum of squared edge-length errors at exponent ``p``."""
    if g.m == 0:
        return 0.0
    us, vs = np.array(g.sorted_edges()).T
    err = _lengths(x[us] - x[vs], p) - target
    return float(err @ err)


class _Problem:
    def __init__(self, g: Graph, dim: int, target: np.ndarray, q: float):
        self.n, self.d = g.n, dim
        self.us, self.vs = (np.array(g.sorted_edges()).T if g.m else (np.zeros(0, int), np.zeros(0, int)))
        self.target = target
        self.q = q

    def fun(self, flat: np.ndarray) -> tuple[float, np.ndarray]:
        x = flat.reshape(self.n, self.d)
        diffs = x[self.us] - x[self.vs]
        mags = np.abs(diffs)
        top = mags.max(axis=1)
        safe = np.where(top > 0, top, 1.0)
        w = mags / safe[:, None]
        s = np.sum(w ** self.q, axis=1)
        lengths = top * s ** (1.0 / self.q)
        err = lengths - self.target
        # d|z|_q / dz = sign(z) (|z| / |z|_q)^(q-1), zero at z = 0
        ratio = np.where(top[:, None] > 0, w / np.where(s > 0, s, 1.0)[:, None] ** (1.0 / self.q), 0.0)
        grad_norm = np.sign(diffs) * ratio ** (self.q - 1)
        coef = (2.0 * err)[:, None] * grad_norm
        grad = np.zeros_like(x)
        np.add.at(grad, self.us, coef)
        np.add.at(grad, self.vs, -coef)
        return float(err @ err), grad.ravel()


def _polish(g: Graph, p: float, x: np.ndarray, target: np.ndarray, rounds: int) -> np.ndarray:
    """Newton-like steps for the piecewise-linear l1 / linf lengths.

    With the sign (l1) or argmax (linf) pattern frozen, every edge length is
    linear in the coordinates, so the minimum-norm correction solving all
    length equations is a least-squares problem.
    """
    n, d = x.shape
    us, vs = np.array(g.sorted_edges()).T
    best, best_res = x, residual(g, p, x, target)
    cur = x
    for _ in range(rounds):
        if best_res == 0:
            break
        diffs = cur[us] - cur[vs]
        coeff = np.zeros((g.m, d))
        if p == INF:
            k = np.argmax(np.abs(diffs), axis=1)
            coeff[np.arange(g.m), k] = np.sign(diffs[np.arange(g.m), k])
        else:
            coeff = np.sign(diffs)
        mat = np.zeros((g.m, n, d))
        rows = np.arange(g.m)
        mat[rows, us] = coeff
        mat[rows, vs] = -coeff
        mat = mat.reshape(g.m, n * d)
        rhs = target - mat @ cur.ravel()
        step, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        cur = cur + step.reshape(n, d)
        res = residual(g, p, cur, target)
        if res < best_res:
            best, best_res = cur, res
        else:
            break
    return best


AMBIGUITY = 0.1
MAX_PATTERNS = 64


def _edge_patterns(p: float, diff: np.ndarray, length: float) -> list:
    """Candidate linear pieces of one edge's length near ``diff``.

    linf: (coordinate, sign) pairs whose magnitude is within AMBIGUITY of the
    maximum; l1: sign vectors, branching on coordinates close to zero.
    """
    mags = np.abs(diff)
    scale = max(float(mags.max()), length, 1e-300)
    if p == INF:
        out = []
        for k in np.argsort(-mags):
            if mags[k] < (1 - AMBIGUITY) * mags.max() and out:
                break
            signs = (1.0, -1.0) if mags[k] < AMBIGUITY * scale else (1.0 if diff[k] >= 0 else -1.0,)
            out += [(int(k), sk) for sk in signs]
        return out
    choices = [(1.0, -1.0) if mags[k] < AMBIGUITY * scale else (1.0 if diff[k] > 0 else -1.0,)
               for k in range(len(diff))]
    return [np.array(c) for c in itertools.product(*choices)]


def _project_pattern(g: Graph, p: float, x: np.ndarray, target: np.ndarray, pattern) -> np.ndarray | None:
    n, d = x.shape
    nv = n * d
    eq_rows, eq_rhs, ub_rows, ub_rhs = [], [], [], []

    def coef(u, v, k, sign):
        row = np.zeros(2 * nv)
        row[u * d + k] += sign
        row[v * d + k] -= sign
        return row

    for i, ((u, v), piece) in enumerate(zip(g.sorted_edges(), pattern)):
        if p == INF:
            k, sk = piece
            eq_rows.append(coef(u, v, k, sk))
            eq_rhs.append(target[i])
            for j in range(d):
                if j != k:
                    ub_rows += [coef(u, v, j, 1.0), coef(u, v, j, -1.0)]
                    ub_rhs += [target[i], target[i]]
        else:
            eq_rows.append(sum(coef(u, v, k, piece[k]) for k in range(d)))
            eq_rhs.append(target[i])
            for k in range(d):
                ub_rows.append(coef(u, v, k, -piece[k]))
                ub_rhs.append(0.0)
    # t >= |z - x| so the objective is the l1 distance moved
    flat = x.ravel()
    for c in range(nv):
        for sign in (1.0, -1.0):
            row = np.zeros(2 * nv)
            row[c] = sign
            row[nv + c] = -1.0
            ub_rows.append(row)
            ub_rhs.append(sign * flat[c])
    cost = np.concatenate([np.zeros(nv), np.ones(nv)])
    bounds = [(None, None)] * nv + [(0, None)] * nv
    out = linprog(cost, A_ub=np.array(ub_rows), b_ub=np.array(ub_rhs), A_eq=np.array(eq_rows),
                  b_eq=np.array(eq_rhs), bounds=bounds, method="highs")
    if out.status != 0:
        return None
    return out.x[:nv].reshape(n, d)


def _project(g: Graph, p: float, x: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Realization with the exact target lengths on a linear piece next to ``x``.

    With the linf argmax / l1 sign pattern frozen every constraint is linear,
    so each candidate pattern is a linear program (minimising the l1 move).
    Edges whose pattern is ambiguous at ``x`` branch; the first feasible
    pattern wins, at most MAX_PATTERNS are tried.
    """
    us, vs = np.array(g.sorted_edges()).T
    diffs = x[us] - x[vs]
    per_edge = [_edge_patterns(p, diffs[i], target[i]) for i in range(g.m)]
    for count, pattern in enumerate(itertools.product(*per_edge)):
        if count >= MAX_PATTERNS:
            break
        y = _project_pattern(g, p, x, target, pattern)
        if y is not None:
            return y
    return None


def _target_vector(g: Graph, target: Mapping[Edge, float]) -> np.ndarray:
    out = []
    for u, v in g.sorted_edges():
        val = target.get((u, v), target.get((v, u)))
        if val is None:
            raise KeyError(f"no target length for edge {(u, v)}")
        if val < 0:
            raise ValueError(f"negative target length on edge {(u, v)}")
        out.append(float(val))
    return np.array(out)


def _one_restart(g: Graph, space: SpaceDescriptor, target: np.ndarray, cfg: SolveConfig,
                 ss: np.random.SeedSequence, start: np.ndarray | None) -> tuple[np.ndarray, float]:
    d = int(space.dim)
    rng = np.random.default_rng(ss)
    scale = float(target.max()) if target.size and target.max() > 0 else 1.0
    x0 = start if start is not None else rng.uniform(-scale, scale, size=(g.n, d))
    if g.m == 0:
        return x0, 0.0
    q = cfg.surrogate(space.p)
    prob = _Problem(g, d, target, q)
    opts = {"maxiter": cfg.max_iters, "ftol": 1e-300, "gtol": 1e-300, "maxcor": 30}
    out = minimize(prob.fun, x0.ravel(), jac=True, method="L-BFGS-B", options=opts)
    x = out.x.reshape(g.n, d)
    res = residual(g, space.p, x, target)
    if space.p in (1, INF):
        x = _polish(g, space.p, x, target, cfg.polish_rounds)
        res = residual(g, space.p, x, target)
        if res >= cfg.tol:
            y = _project(g, space.p, x, target)
            if y is not None and residual(g, space.p, y, target) < res:
                x, res = y, residual(g, space.p, y, target)
    return x, res


def solve_realization(g: Graph, space: SpaceDescriptor, target: Mapping[Edge, float],
                      cfg: SolveConfig = SolveConfig(), start=None) -> tuple[np.ndarray, float]:
    """Best realization found for ``target`` and its residual at the true exponent.

    The first restart (in seed order) whose residual is below ``cfg.tol`` wins;
    failing that, the smallest residual over all restarts.  ``start`` seeds
    the first restart instead of a random draw.
    """
    if not space.finite:
        raise SpaceError("the solver needs a finite-dimensional space")
    tvec = _target_vector(g, target)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    starts = [np.asarray(start, dtype=float) if (start is not None and i == 0) else None
              for i in range(cfg.restarts)]

    def run(i: int):
        return _one_restart(g, space, tvec, cfg, streams[i], starts[i])

    best = None
    if cfg.threads == 1:
        for i in range(cfg.restarts):
            x, res = run(i)
            if best is None or res < best[1]:
                best = (x, res)
            if res < cfg.tol:
                return x, res
        return best
    with ThreadPoolExecutor(cfg.threads) as pool:
        results = list(pool.map(run, range(cfg.restarts)))
    for x, res in results:
        if res < cfg.tol:
            return x, res
    return min(results, key=lambda t: t[1])


def flatten_witness(g: Graph, x: SpaceDescriptor, y: SpaceDescriptor, q,
                    cfg: SolveConfig = SolveConfig(), start=None):
    """Measure ``q`` in ``y`` and try to reproduce those lengths in ``x``."""
    target = measurement_map(g, y, q)
    real, res = solve_realization(g, x, target, cfg, start)
    return target, real, res


def p_sweep(g: Graph, x: SpaceDescriptor, grid: Sequence[float], cfg: SolveConfig = SolveConfig(),
            samples: int = 3,
            sampler: Callable[[float, int, np.random.Generator], np.ndarray] | None = None
            ) -> list[tuple[float, float]]:
    """Worst residual, per exponent, of flattening random lp^D realizations into ``x``.

    ``D`` is ``C(n, 2)``, enough for every lp target to be representative.
    ``sampler(p, D, rng)`` replaces the default uniform draw on [-1, 1].
    """
    if not x.finite:
        raise SpaceError("sweeps need a finite-dimensional target space")
    dim = max(1, math.comb(g.n, 2))
    out = []
    for i, p in enumerate(grid):
        if p < 1:
            raise ValueError(f"exponent {p} below 1")
        y = SpaceDescriptor(p, dim)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, i]))
        worst = 0.0
        for _ in range(samples):
            q = sampler(p, dim, rng) if sampler else rng.uniform(-1.0, 1.0, size=(g.n, dim))
            _, _, res = flatten_witness(g, x, y, q, cfg)
            worst = max(worst, res)
        out.append((float(p), worst))
    return out
