import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatgraph.graph import Graph, complete_graph
from flatgraph.spaces import (INF, DimensionMismatchError, NotAMetricError, SpaceDescriptor, SpaceError,
                              dual_exponent, equilateral_known, frechet_embed, lp_norm, measurement_map,
                              norlander_range)
from oracles import dense_pair_sweep

K2 = complete_graph(2)
K3 = complete_graph(3)


def test_descriptor_parse_and_predicates():
    s = SpaceDescriptor.parse("lp:inf:2")
    assert s == SpaceDescriptor(INF, 2) and str(s) == "lp:inf:2"
    assert str(SpaceDescriptor.parse("lp:1.5:inf")) == "lp:1.5:inf"
    assert SpaceDescriptor(1, 2).is_isometric_linf2 and SpaceDescriptor(INF, 2).is_isometric_linf2
    assert not SpaceDescriptor(INF, 3).is_isometric_linf2
    assert SpaceDescriptor(2, 2).is_isometric_l22
    assert SpaceDescriptor(3, 5).is_strictly_convex
    assert SpaceDescriptor(INF, 1).is_strictly_convex  # lines are vacuously strictly convex
    assert not SpaceDescriptor(1, 3).is_strictly_convex
    assert SpaceDescriptor(1, 2).isometric_to(SpaceDescriptor(INF, 2))
    for bad in ("lp:0.5:2", "lp:2:0", "l2:2:2", "lp:2:x"):
        with pytest.raises(SpaceError):
            SpaceDescriptor.parse(bad)


def test_lp_norm_examples():
    assert lp_norm(2, [3, 4]) == pytest.approx(5)
    assert lp_norm(INF, [3, -7, 2]) == 7
    assert lp_norm(1, [1, 1, 1]) == 3
    assert lp_norm(1, [Fraction(1, 3), Fraction(-1, 6)]) == Fraction(1, 2)
    assert dual_exponent(2) == 2 and dual_exponent(1) == INF and dual_exponent(INF) == 1


def test_measurement_examples():
    assert measurement_map(K2, SpaceDescriptor(2, 2), [[0, 0], [1, 0]]) == {(0, 1): 1}
    pts = [[0, 0], [1, 0], [0, 1]]
    assert list(measurement_map(K3, SpaceDescriptor(INF, 2), pts).values()) == [1, 1, 1]
    l1 = measurement_map(K3, SpaceDescriptor(1, 2), pts)
    assert (l1[(0, 1)], l1[(0, 2)], l1[(1, 2)]) == (1, 1, 2)
    with pytest.raises(DimensionMismatchError):
        measurement_map(K2, SpaceDescriptor(2, 3), [[0, 0], [1, 0]])
    with pytest.raises(DimensionMismatchError):
        measurement_map(K3, SpaceDescriptor(2, 2), [[0, 0], [1, 0]])


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([1.0, 1.5, 2.0, 3.0, INF]), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_measurement_isometry_invariance(p, d, seed):
    rng = np.random.default_rng(seed)
    g = complete_graph(5)
    r = rng.normal(size=(5, d))
    sp = SpaceDescriptor(p, d)
    base = measurement_map(g, sp, r)
    shifted = measurement_map(g, sp, r + rng.normal(size=d))
    perm = measurement_map(g, sp, r[:, rng.permutation(d)])
    flipped = measurement_map(g, sp, r * rng.choice([-1, 1], size=d))
    for e in base:
        assert shifted[e] == pytest.approx(base[e], rel=1e-12, abs=1e-12)
        assert perm[e] == pytest.approx(base[e], rel=1e-12)
        assert flipped[e] == pytest.approx(base[e], rel=1e-12)


def test_frechet_examples():
    pts = frechet_embed([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert pts == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert set(measurement_map(K3, SpaceDescriptor(INF, 3), pts).values()) == {1}
    assert frechet_embed([[0, 5], [5, 0]]) == [[0, 5], [5, 0]]
    with pytest.raises(NotAMetricError) as info:
        frechet_embed([[0, 5, 1], [5, 0, 1], [1, 1, 0]])
    assert info.value.triple is not None and set(info.value.triple) == {0, 1, 2}


def random_rational_metric(rng: random.Random, n: int) -> list[list[Fraction]]:
    """Shortest-path closure of random positive rational weights: always a metric."""
    d = [[Fraction(0) if i == j else Fraction(rng.randint(1, 40), rng.randint(1, 9)) for j in range(n)]
         for i in range(n)]
    for i in range(n):
        for j in range(i):
            d[i][j] = d[j][i]
    for k, i, j in itertools.product(range(n), repeat=3):
        if d[i][k] + d[k][j] < d[i][j]:
            d[i][j] = d[i][k] + d[k][j]
    return d


def test_frechet_exact_on_random_rational_metrics():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randint(2, 8)
        d = random_rational_metric(rng, n)
        pts = frechet_embed(d)
        lengths = measurement_map(complete_graph(n), SpaceDescriptor(INF, n), pts)
        for (u, v), val in lengths.items():
            assert isinstance(val, Fraction) and val == d[u][v]


@pytest.mark.parametrize("space,k", [(SpaceDescriptor(INF, 2), 4), (SpaceDescriptor(INF, 3), 8),
                                     (SpaceDescriptor(1, 2), 4), (SpaceDescriptor(2, 2), 3),
                                     (SpaceDescriptor(2, 4), 5), (SpaceDescriptor(1.5, 2), 3),
                                     (SpaceDescriptor(1, 2), 3), (SpaceDescriptor(3, 2), 3)])
def test_equilateral_sets_verify(space, k):
    pts = equilateral_known(space, k)
    assert pts is not None and len(pts) == k
    vals = measurement_map(complete_graph(k), space, pts).values()
    if all(isinstance(x, Fraction) for row in pts for x in row):
        assert all(v == 1 for v in vals)
    else:
        assert all(abs(v - 1) < 1e-12 for v in vals)


def test_equilateral_exact_cases_are_exact():
    assert equilateral_known(SpaceDescriptor(INF, 2), 4) == [[0, 0], [1, 0], [0, 1], [1, 1]]
    assert all(isinstance(x, Fraction) for row in equilateral_known(SpaceDescriptor(1, 2), 4) for x in row)


def test_equilateral_unknown_cases():
    assert equilateral_known(SpaceDescriptor(2, 2), 4) is None
    assert equilateral_known(SpaceDescriptor(INF, 2), 5) is None
    assert equilateral_known(SpaceDescriptor(3, 2), 4) is None


def test_norlander_examples():
    lo, hi = norlander_range(2, 1.0)
    assert abs(lo - math.sqrt(3)) < 1e-9 and abs(hi - math.sqrt(3)) < 1e-9
    lo, hi = norlander_range(1.5, 1.0)
    assert lo <= math.sqrt(3) <= hi
    lo, hi = norlander_range(INF, 1.0)
    assert lo < hi
    with pytest.raises(ValueError):
        norlander_range(2, 2.0)


def test_norlander_linf_matches_dense_sweep():
    lo, hi = norlander_range(INF, 1.0)
    olo, ohi = dense_pair_sweep(INF, 1.0)
    # the oracle only sees grid pairs near eps, so agreement is loose
    assert abs(lo - olo) < 0.02 and abs(hi - ohi) < 0.02
    assert ohi - olo > 0.5


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
@pytest.mark.parametrize("eps", [0.5, 1.0, 1.3])
def test_norlander_brackets(p, eps):
    lo, hi = norlander_range(p, eps)
    ref = math.sqrt(4 - eps ** 2)
    assert lo <= ref + 1e-6
    assert ref <= hi + 1e-6
