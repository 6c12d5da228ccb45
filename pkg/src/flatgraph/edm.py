"""Exact Euclidean distance matrix checks and the two shipped certificates."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .graph import Edge, Graph, K4EK4, W4, UnknownPatternError


class MatrixError(ValueError):
    pass


class NotAnEDMError(ValueError):
    pass


def _exact(x) -> Fraction:
    if isinstance(x, bool):
        raise MatrixError("booleans are not matrix entries")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise MatrixError(f"cannot parse {x!r} as an exact number") from exc
    if isinstance(x, float):
        return Fraction(x)
    raise MatrixError(f"unsupported entry {x!r}")


class ExactMatrix:
    """Square symmetric matrix of Fractions."""

    def __init__(self, entries: Sequence[Sequence]):
        rows = [[_exact(x) for x in row] for row in entries]
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise MatrixError(f"row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise MatrixError(f"matrix is not symmetric at ({i}, {j})")
        self.rows = rows

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"ExactMatrix({[[str(x) for x in r] for r in self.rows]})"

    def scaled(self, c) -> "ExactMatrix":
        c = _exact(c)
        return ExactMatrix([[c * x for x in row] for row in self.rows])

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.rows])

    def to_json(self) -> dict:
        def enc(x: Fraction):
            return x.numerator if x.denominator == 1 else str(x)
        return {"n": self.n, "entries": [[enc(x) for x in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "ExactMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n, entries = data["n"], data["entries"]
        except (KeyError, TypeError) as exc:
            raise MatrixError(f"matrix JSON needs 'n' and 'entries': {exc}") from exc
        mat = cls(entries)
        if mat.n != n:
            raise MatrixError(f"declared order {n} but got {mat.n} rows")
        return mat


def schoenberg_transform(m: ExactMatrix) -> ExactMatrix:
    """A[i][j] = M[i][n] + M[j][n] - M[i][j], using the last point as base."""
    if m.n < 2:
        raise MatrixError("need at least two points")
    for i in range(m.n):
        if m[i, i] != 0:
            raise MatrixError(f"nonzero diagonal entry at {i}")
    b = m.n - 1
    return ExactMatrix([[m[i, b] + m[j, b] - m[i, j] for j in range(b)] for i in range(b)])


def is_psd_exact(a: ExactMatrix) -> bool:
    """Exact PSD test by symmetric-pivoted LDL^T elimination over the rationals."""
    work = [row[:] for row in a.rows]
    idx = list(range(a.n))
    while idx:
        if any(work[i][i] < 0 for i in idx):
            return False
        pivot = next((i for i in idx if work[i][i] > 0), None)
        if pivot is None:
            # all remaining diagonal entries vanish: PSD forces the rest to be zero
            return all(work[i][j] == 0 for i in idx for j in idx)
        idx.remove(pivot)
        d = work[pivot][pivot]
        col = {i: work[i][pivot] for i in idx}
        for i in idx:
            if col[i] == 0:
                continue
            f = col[i] / d
            row = work[i]
            for j in idx:
                if col[j]:
                    row[j] -= f * col[j]
    return True


def is_edm(m: ExactMatrix) -> bool:
    for i in range(m.n):
        for j in range(m.n):
            if m[i, j] < 0:
                return False
    if m.n == 1:
        return m[0, 0] == 0
    return is_psd_exact(schoenberg_transform(m))


def edm_realize(m: ExactMatrix, tol: float = 1e-9) -> np.ndarray:
    """Points in R^(n-1) whose squared distances reproduce ``m``; the last point is 0."""
    if not is_edm(m):
        raise NotAnEDMError("matrix is not a Euclidean distance matrix")
    n = m.n
    if n == 1:
        return np.zeros((1, 0))
    gram = schoenberg_transform(m).to_float() / 2.0
    vals, vecs = np.linalg.eigh(gram)
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() < -tol * scale:
        raise NotAnEDMError(f"Gram matrix eigenvalue {vals.min():.3g} below tolerance")
    coords = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return np.vstack([coords, np.zeros((1, n - 1))])


class Certificate(NamedTuple):
    graph: Graph
    matrix: ExactMatrix
    lengths: dict[Edge, int]

    def completed_entries(self) -> list[Edge]:
        """Vertex pairs whose entries were filled in (not graph edges)."""
        n = self.matrix.n
        return [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in self.graph.edges]


_W4_MATRIX = [
    [0, 324, 245, 576, 40000],
    [324, 0, 289, 294, 40000],
    [245, 289, 0, 400, 40000],
    [576, 294, 400, 0, 40000],
    [40000, 40000, 40000, 40000, 0],
]
_W4_LENGTHS = {(0, 4): 200, (1, 4): 200, (2, 4): 200, (3, 4): 200,
               (0, 1): 18, (0, 3): 24, (1, 2): 17, (2, 3): 20}

_K4EK4_MATRIX = [
    [0, 3003, 5041, 5929, 5476, 2116],
    [3003, 0, 2809, 7744, 6241, 1296],
    [5041, 2809, 0, 6084, 4765, 2595],
    [5929, 7744, 6084, 0, 6545, 4655],
    [5476, 6241, 4765, 6545, 0, 6241],
    [2116, 1296, 2595, 4655, 6241, 0],
]
_K4EK4_LENGTHS = {(2, 3): 78, (1, 2): 53, (0, 2): 71, (1, 3): 88, (0, 3): 77,
                  (1, 4): 79, (1, 5): 36, (0, 4): 74, (0, 5): 46, (4, 5): 79}


def certificate(name: str) -> Certificate:
    """The completed distance matrix and assigned edge lengths for W4 or K4eK4."""
    if name == "W4":
        return Certificate(W4, ExactMatrix(_W4_MATRIX), dict(_W4_LENGTHS))
    if name == "K4eK4":
        return Certificate(K4EK4, ExactMatrix(_K4EK4_MATRIX), dict(_K4EK4_LENGTHS))
    raise UnknownPatternError(f"no certificate named {name!r}")
