import math

import numpy as np
import pytest

from flatgraph.edm import certificate, edm_realize
from flatgraph.graph import complete_graph, cycle_graph
from flatgraph.solver import SolveConfig, flatten_witness, p_sweep, residual, solve_realization
from flatgraph.spaces import INF, SpaceDescriptor, measurement_map
from oracles import collinear_triangle_min, k4_equilateral_plane_min, linf_plane_min_residual

K3 = complete_graph(3)
UNIT3 = {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}


def test_config_validation():
    for bad in (dict(restarts=0), dict(tol=0), dict(smoothing=1.0), dict(smoothing=INF), dict(threads=0)):
        with pytest.raises(ValueError):
            SolveConfig(**bad)
    assert SolveConfig().surrogate(1) == 1.02 and SolveConfig().surrogate(INF) == 40
    assert SolveConfig(smoothing=30).surrogate(INF) == 30 and SolveConfig().surrogate(3) == 3


def test_equilateral_triangle_in_plane():
    x, res = solve_realization(K3, SpaceDescriptor(2, 2), UNIT3)
    assert res < 1e-9
    assert residual(K3, 2, x, np.ones(3)) == res


def test_triangle_on_a_line_fails():
    oracle = collinear_triangle_min()
    assert oracle > 0.05
    _, res = solve_realization(K3, SpaceDescriptor(2, 1), UNIT3, SolveConfig(restarts=50))
    assert res > 0.05
    assert res >= oracle - 1e-3  # the grid minimum is within one grid step of the true one


def test_w4_lengths_in_l2_from_edm_start():
    cert = certificate("W4")
    start = edm_realize(cert.matrix)
    _, res = solve_realization(cert.graph, SpaceDescriptor(2, 4), cert.lengths, start=start)
    assert res < 1e-6


def test_flatten_witness_examples():
    rng = np.random.default_rng(0)
    q = rng.normal(size=(3, 3))
    target, _, res = flatten_witness(K3, SpaceDescriptor(2, 2), SpaceDescriptor(2, 3), q)
    assert res < 1e-8 and len(target) == 3
    k2 = complete_graph(2)
    _, real, res = flatten_witness(k2, SpaceDescriptor(INF, 1), SpaceDescriptor(1.5, 4), rng.normal(size=(2, 4)))
    assert res < 1e-20


def test_w4_certificate_does_not_flatten_into_linf_plane():
    cert = certificate("W4")
    q = edm_realize(cert.matrix)
    target, _, res = flatten_witness(cert.graph, SpaceDescriptor(INF, 2), SpaceDescriptor(2, 4), q,
                                     SolveConfig(restarts=100))
    assert res > 0.1
    for e, val in cert.lengths.items():
        assert abs(target[e] - val) < 1e-6 * val


def test_qp_oracle_lower_bound_for_w4():
    cert = certificate("W4")
    best = linf_plane_min_residual(cert.graph, cert.lengths, anchor=4)
    assert best > 0.1
    _, res = solve_realization(cert.graph, SpaceDescriptor(INF, 2), cert.lengths, SolveConfig(restarts=100))
    assert res >= best - 1e-6


def test_k4eK4_certificate_stays_away_from_linf_plane():
    cert = certificate("K4eK4")
    _, res = solve_realization(cert.graph, SpaceDescriptor(INF, 2), cert.lengths, SolveConfig(restarts=50))
    assert res > 1e-3


def test_sweeps():
    rows = p_sweep(K3, SpaceDescriptor(2, 2), [1, 1.5, 2], SolveConfig(restarts=5))
    assert [p for p, _ in rows] == [1, 1.5, 2] and all(r < 1e-6 for _, r in rows)
    assert p_sweep(K3, SpaceDescriptor(2, 2), []) == []


def test_equilateral_k4_not_in_euclidean_plane():
    oracle = k4_equilateral_plane_min()
    assert oracle > 0.1
    g = complete_graph(4)

    def equilateral(p, dim, rng):
        pts = np.zeros((4, dim))
        pts[:, :4] = np.eye(4) / 2 ** (1 / p)
        return pts

    rows = p_sweep(g, SpaceDescriptor(2, 2), [2], SolveConfig(restarts=10), samples=1, sampler=equilateral)
    assert rows[0][1] > 0.1
    assert rows[0][1] >= oracle - 1e-6


def test_determinism_and_threads():
    g = cycle_graph(5)
    target = {e: 1.0 + 0.1 * i for i, e in enumerate(g.sorted_edges())}
    sp = SpaceDescriptor(INF, 2)
    a = solve_realization(g, sp, target, SolveConfig(restarts=8, seed=3))
    b = solve_realization(g, sp, target, SolveConfig(restarts=8, seed=3))
    c = solve_realization(g, sp, target, SolveConfig(restarts=8, seed=3, threads=4))
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]
    assert np.array_equal(a[0], c[0]) and a[1] == c[1]


def test_scale_consistency():
    # a target that is not realizable, so the residual is a genuine positive minimum
    sp = SpaceDescriptor(2, 1)
    cfg = SolveConfig(restarts=30)
    _, r1 = solve_realization(K3, sp, UNIT3, cfg)
    _, r2 = solve_realization(K3, sp, {e: 2 * v for e, v in UNIT3.items()}, cfg)
    assert math.sqrt(r2) == pytest.approx(2 * math.sqrt(r1), rel=0.1)


def test_targets_from_measurement():
    rng = np.random.default_rng(9)
    g = complete_graph(4)
    for p in (1.0, 1.5, 3.0, INF):
        q = rng.uniform(-1, 1, size=(4, 6))
        y = SpaceDescriptor(p, 6)
        target, real, res = flatten_witness(g, SpaceDescriptor(p, 6), y, q, SolveConfig(restarts=10))
        assert res < 1e-6
        got = measurement_map(g, SpaceDescriptor(p, 6), real)
        assert all(abs(got[e] - target[e]) < 1e-3 for e in target)
