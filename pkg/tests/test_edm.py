import random
from fractions import Fraction

import numpy as np
import pytest

from flatgraph.edm import (ExactMatrix, MatrixError, NotAnEDMError, certificate, edm_realize, is_edm,
                           is_psd_exact, schoenberg_transform)
from flatgraph.graph import UnknownPatternError, pattern_graph


def squared_distances(pts) -> list[list[Fraction]]:
    n = len(pts)
    return [[sum((a - b) ** 2 for a, b in zip(pts[i], pts[j])) for j in range(n)] for i in range(n)]


def eig_oracle(m: ExactMatrix) -> bool:
    """Floating-point EDM test: nonnegative entries and a PSD Schoenberg matrix."""
    f = m.to_float()
    if (f < 0).any():
        return False
    b = f.shape[0] - 1
    a = f[:b, [b]] + f[[b], :b] - f[:b, :b]
    vals = np.linalg.eigvalsh(a)
    return bool(vals.min() >= -1e-8 * max(1.0, np.abs(vals).max()))


def test_matrix_json_and_validation():
    m = ExactMatrix.from_json({"n": 2, "entries": [[0, "3/4"], ["0.75", 0]]})
    assert m[0, 1] == Fraction(3, 4)
    assert ExactMatrix.from_json(m.to_json()) == m
    with pytest.raises(MatrixError):
        ExactMatrix([[0, 1], [2, 0]])
    with pytest.raises(MatrixError):
        ExactMatrix([[0, 1, 2], [1, 0]])
    with pytest.raises(MatrixError):
        ExactMatrix.from_json({"n": 3, "entries": [[0]]})


def test_schoenberg_examples():
    assert schoenberg_transform(ExactMatrix([[0, 4], [4, 0]])) == ExactMatrix([[8]])
    ones = ExactMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert schoenberg_transform(ones) == ExactMatrix([[2, 1], [1, 2]])
    a = schoenberg_transform(certificate("W4").matrix)
    assert a.n == 4 and a[0, 0] == 80000
    with pytest.raises(MatrixError):
        schoenberg_transform(ExactMatrix([[1, 2], [2, 0]]))


def test_psd_examples():
    assert is_psd_exact(ExactMatrix([[1, 0], [0, 1]]))
    assert not is_psd_exact(ExactMatrix([[1, 2], [2, 1]]))
    assert is_psd_exact(ExactMatrix([[2, 1], [1, 2]]))
    assert is_psd_exact(ExactMatrix([[0, 0], [0, 3]]))
    assert not is_psd_exact(ExactMatrix([[0, 1], [1, 3]]))
    assert is_psd_exact(ExactMatrix([[1, 1], [1, 1]]))


def test_edm_examples():
    assert is_edm(certificate("W4").matrix)
    assert is_edm(certificate("K4eK4").matrix)
    bad = ExactMatrix([[0, 25, 1], [25, 0, 1], [1, 1, 0]])
    assert not is_edm(bad) and not eig_oracle(bad)


def test_edm_agrees_with_eigen_oracle():
    rng = random.Random(2026)
    agree = decided_no = 0
    for _ in range(200):
        n = rng.randint(2, 6)
        d = rng.randint(1, 4)
        pts = [[Fraction(rng.randint(-9, 9)) for _ in range(d)] for _ in range(n)]
        m = squared_distances(pts)
        if rng.random() < 0.6:
            i, j = rng.sample(range(n), 2)
            delta = Fraction(rng.randint(-30, 30), rng.randint(1, 4))
            m[i][j] += delta
            m[j][i] += delta
        mat = ExactMatrix(m)
        assert is_edm(mat) == eig_oracle(mat)
        agree += 1
        decided_no += not is_edm(mat)
    assert agree == 200 and decided_no > 20


def test_scaling_invariance():
    rng = random.Random(4)
    for name in ("W4", "K4eK4"):
        m = certificate(name).matrix
        for c in (Fraction(1, 7), Fraction(3), Fraction(22, 5)):
            assert is_edm(m.scaled(c))
    for _ in range(30):
        n = rng.randint(3, 5)
        m = ExactMatrix(squared_distances([[Fraction(rng.randint(-5, 5))] for _ in range(n)]))
        # a perturbed copy that is usually not an EDM
        m2 = ExactMatrix([[x + (1 if (i, j) in ((0, 1), (1, 0)) else 0) for j, x in enumerate(row)]
                          for i, row in enumerate(m.rows)])
        for mm in (m, m2):
            assert is_edm(mm.scaled(Fraction(rng.randint(1, 9), rng.randint(1, 9)))) == is_edm(mm)


def test_realize_examples():
    pts = edm_realize(ExactMatrix([[0, 4], [4, 0]]))
    assert np.allclose(pts[1], 0) and abs(np.linalg.norm(pts[0]) - 2) < 1e-12
    tri = edm_realize(ExactMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]]))
    dists = [np.linalg.norm(tri[i] - tri[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    assert np.allclose(dists, 1, atol=1e-9)
    with pytest.raises(NotAnEDMError):
        edm_realize(ExactMatrix([[0, 25, 1], [25, 0, 1], [1, 1, 0]]))


def test_realize_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        pts = rng.integers(-20, 20, size=(n, int(rng.integers(1, 5))))
        m = ExactMatrix(squared_distances([[Fraction(int(x)) for x in p] for p in pts]))
        rec = edm_realize(m)
        got = ((rec[:, None, :] - rec[None, :, :]) ** 2).sum(-1)
        want = m.to_float()
        assert np.abs(got - want).max() <= 1e-7 * max(1.0, want.max())


def test_certificate_entries():
    w = certificate("W4")
    assert w.matrix[0, 4] == 40000 and w.graph == pattern_graph("W4")
    k = certificate("K4eK4")
    assert k.matrix[0, 1] == 3003 and k.graph == pattern_graph("K4eK4")
    for cert in (w, k):
        for (u, v), length in cert.lengths.items():
            assert cert.matrix[u, v] == length ** 2
        assert set(cert.lengths) == cert.graph.edges
        assert set(cert.completed_entries()).isdisjoint(cert.graph.edges)
    with pytest.raises(UnknownPatternError):
        certificate("K5")
