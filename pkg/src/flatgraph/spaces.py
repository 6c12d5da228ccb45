"""lp spaces: descriptors, norms, the measurement map and related constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import Edge, Graph

INF = math.inf


class SpaceError(ValueError):
    pass


class DimensionMismatchError(SpaceError):
    pass


class NotAMetricError(ValueError):
    def __init__(self, message: str, triple: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.triple = triple


class ConvergenceError(RuntimeError):
    pass


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class SpaceDescriptor:
    """The space lp^dim; ``p`` and ``dim`` may be ``math.inf``."""

    p: float
    dim: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise SpaceError(f"exponent must be >= 1, got {self.p}")
        dim = self.dim
        if dim != INF:
            if int(dim) != dim or dim < 1:
                raise SpaceError(f"dimension must be a positive integer or inf, got {self.dim}")
            dim = int(dim)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def parse(cls, text: str) -> "SpaceDescriptor":
        """Parse ``lp:<p>:<dim>``, e.g. ``lp:2:3`` or ``lp:inf:inf``."""
        parts = text.strip().split(":")
        if len(parts) != 3 or parts[0] != "lp":
            raise SpaceError(f"expected lp:<p>:<dim>, got {text!r}")
        try:
            p = INF if parts[1] == "inf" else float(parts[1])
            dim = INF if parts[2] == "inf" else int(parts[2])
        except ValueError as exc:
            raise SpaceError(f"bad space descriptor {text!r}") from exc
        return cls(p, dim)

    def __str__(self) -> str:
        return f"lp:{_fmt(self.p)}:{_fmt(self.dim)}"

    @property
    def finite(self) -> bool:
        return self.dim != INF

    @property
    def is_strictly_convex(self) -> bool:
        return (1 < self.p < INF) or self.dim == 1

    @property
    def is_isometric_linf2(self) -> bool:
        return self.dim == 2 and self.p in (1.0, INF)

    @property
    def is_isometric_l22(self) -> bool:
        return self.dim == 2 and self.p == 2.0

    def canonical(self) -> "SpaceDescriptor":
        """Representative of the isometry class (l1^2 ~ linf^2, all lines alike)."""
        if self.dim == 1:
            return SpaceDescriptor(2, 1)
        if self.is_isometric_linf2:
            return SpaceDescriptor(INF, 2)
        return self

    def isometric_to(self, other: "SpaceDescriptor") -> bool:
        return self.canonical() == other.canonical()


def lp_norm(p: float, v: Sequence) -> float:
    """The lp norm of ``v``.  Exact for Fraction/int entries when p is 1 or inf."""
    if p == INF:
        return max((abs(x) for x in v), default=0)
    if p == 1:
        return sum(abs(x) for x in v)
    arr = np.abs(np.asarray(v, dtype=float))
    if arr.size == 0:
        return 0.0
    if p == 2:
        return float(np.sqrt(np.dot(arr, arr)))
    top = arr.max()
    if top == 0:
        return 0.0
    # scaled to avoid overflow for large p
    return float(top * np.sum((arr / top) ** p) ** (1.0 / p))


def dual_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1)


def measurement_map(g: Graph, space: SpaceDescriptor, r) -> dict[Edge, float]:
    """Edge lengths ``|r_u - r_v|_p`` of the realization ``r`` (rows indexed by vertex)."""
    if not space.finite:
        raise DimensionMismatchError("measurement needs a finite-dimensional space")
    rows = _rows(r)
    if len(rows) != g.n:
        raise DimensionMismatchError(f"realization has {len(rows)} points, graph has {g.n} vertices")
    for row in rows:
        if len(row) != space.dim:
            raise DimensionMismatchError(f"point of length {len(row)} in a {space.dim}-dimensional space")
    return {(u, v): lp_norm(space.p, [a - b for a, b in zip(rows[u], rows[v])])
            for u, v in g.sorted_edges()}


def _rows(r) -> list[list]:
    if isinstance(r, np.ndarray) and r.dtype != object:
        return [list(row) for row in r.tolist()]
    return [list(row) for row in r]


def _as_exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} exactly")


def check_metric(d) -> list[list[Fraction]]:
    """Validate a finite metric given as a square matrix; return exact entries."""
    rows = [[_as_exact(x) for x in row] for row in d]
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise NotAMetricError(f"row {i} has length {len(row)}, expected {n}")
    for i in range(n):
        if rows[i][i] != 0:
            raise NotAMetricError(f"nonzero diagonal entry at {i}")
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                raise NotAMetricError(f"asymmetric entries at ({i}, {j})")
            if rows[i][j] < 0:
                raise NotAMetricError(f"negative distance at ({i}, {j})")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if rows[i][j] > rows[i][k] + rows[k][j]:
                    raise NotAMetricError(
                        f"triangle inequality fails for ({i}, {j}, {k}): "
                        f"d{i}{j}={rows[i][j]} > d{i}{k}+d{k}{j}={rows[i][k] + rows[k][j]}",
                        (i, j, k))
    return rows


def frechet_embed(d) -> list[list[Fraction]]:
    """Isometric embedding of a finite metric into linf^n: point i is row i of ``d``."""
    return [list(row) for row in check_metric(d)]


def equilateral_known(space: SpaceDescriptor, k: int):
    """A unit equilateral set of size ``k`` in ``space`` if one is known, else None.

    Exact (Fraction) coordinates are returned wherever the construction allows.
    """
    if not space.finite:
        raise SpaceError("equilateral sets are built in finite dimension only")
    d, p = int(space.dim), space.p
    zero = Fraction(0)

    def pad(pts):
        return [list(pt) + [zero] * (d - len(pt)) for pt in pts]

    if k < 1:
        return None
    if k == 1:
        return pad([[]])
    if k == 2:
        return pad([[zero], [Fraction(1)]])
    if d >= 2 and p == INF and k <= 2 ** d:
        corners = [[Fraction((i >> j) & 1) for j in range(d)] for i in range(k)]
        return corners
    if d >= 2 and p == 1 and k == 4:
        h = Fraction(1, 2)
        return pad([[zero, zero], [h, h], [h, -h], [Fraction(1), zero]])
    if p == 2 and k <= d + 1:
        return pad(_unit_simplex(k).tolist())
    if d >= 2 and k == 3:
        h = Fraction(1, 2)
        if p == 1:
            return pad([[zero, zero], [Fraction(1), zero], [h, h]])
        y = (1.0 - 2.0 ** (-p)) ** (1.0 / p)
        return pad([[0.0, 0.0], [1.0, 0.0], [0.5, y]])
    return None


def _unit_simplex(k: int) -> np.ndarray:
    """k points in R^(k-1) with all pairwise Euclidean distances 1."""
    pts = np.eye(k) / math.sqrt(2.0)
    centred = pts - pts.mean(axis=0)
    # orthonormal basis of the (k-1)-dimensional affine hull
    _, _, vt = np.linalg.svd(centred)
    out = centred @ vt[: k - 1].T
    return out - out[0]


def unit_circle_point(p: float, t: float) -> np.ndarray:
    v = np.array([math.cos(t), math.sin(t)])
    return v / lp_norm(p, v)


def norlander_range(p: float, eps: float, samples: int = 720, tol: float = 1e-12) -> tuple[float, float]:
    """Observed (min, max) of |a+b|_p over unit pairs with |a-b|_p = eps in lp^2.

    ``a`` runs over ``samples`` equally spaced angles; the partner ``b`` is
    found by bisection on the angular offset, using that the chord length
    grows monotonically from 0 to 2 as the offset goes from 0 to pi.
    """
    if not 0 < eps < 2:
        raise ValueError("eps must lie in (0, 2)")
    if samples < 2:
        raise ValueError("need at least two samples")
    lo, hi = INF, -INF
    for i in range(samples):
        t = 2 * math.pi * i / samples
        a = unit_circle_point(p, t)
        s_lo, s_hi = 0.0, math.pi
        b = a
        gap = INF
        for _ in range(200):
            s = 0.5 * (s_lo + s_hi)
            b = unit_circle_point(p, t + s)
            chord = lp_norm(p, a - b)
            gap = chord - eps
            if abs(gap) <= tol:
                break
            if gap < 0:
                s_lo = s
            else:
                s_hi = s
        if abs(gap) > 10 * tol:
            raise ConvergenceError(f"bisection missed eps={eps} by {gap:.3g} at angle {t:.6f}")
        val = lp_norm(p, a + b)
        lo, hi = min(lo, val), max(hi, val)
    return lo, hi
