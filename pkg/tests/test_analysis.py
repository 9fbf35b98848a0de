import math

import numpy as np
import pytest

from qtraj import analysis
from qtraj.basis import Constant, Scenario, build_basis, phi2_zeros
from qtraj.constants import ELECTRON_MASS, HBAR, PLANCK_H
from qtraj.dynamics import Microstate, allowed_flow_microstate, integrate_trajectory

EPS = 10.0
P10 = math.sqrt(2 * ELECTRON_MASS * EPS)
DX10 = math.pi * HBAR / P10
DT10 = math.pi * HBAR / (2 * EPS)


def test_find_nodes_constant(free10):
    sc, pair = free10
    nodes = analysis.find_nodes(sc, pair, (0.0, 10.0))
    xs = np.array([n.x for n in nodes])
    assert all(n.kind == analysis.PHI2_ZERO for n in nodes)
    np.testing.assert_allclose(np.diff(xs), DX10, rtol=1e-10)
    for n in nodes:
        assert abs(pair.phi2(n.x)) <= 1e-10


def test_find_nodes_harmonic(ground10, excited30):
    sc, pair = ground10
    xm = sc.turning_points()[1]
    nodes = analysis.find_nodes(sc, pair, (-1.0, 1.0))
    assert [n.kind for n in nodes] == [analysis.TURNING_POINT] * 2
    assert [n.x for n in nodes] == pytest.approx([-xm, xm])
    sc1, pair1 = excited30
    nodes = analysis.find_nodes(sc1, pair1, (-1.5, 1.5))
    assert [n.kind for n in nodes] == [analysis.TURNING_POINT, analysis.PHI2_ZERO,
                                       analysis.TURNING_POINT]
    assert nodes[1].x == pytest.approx(0.0, abs=1e-12)


def test_find_nodes_linear_reports_turning_point_once(linear10):
    sc, pair = linear10
    xt = sc.turning_points()[0]
    nodes = analysis.find_nodes(sc, pair, (xt - 3.0, xt + 1.0))
    near = [n for n in nodes if abs(n.x - xt) < 1e-6]
    assert len(near) == 1 and near[0].kind == analysis.TURNING_POINT


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (10.0, 0.0), (3.0, 2.0), (0.5, 1.5)])
def test_node_times_match_grid(free10, a, b):
    sc, pair = free10
    x0 = HBAR / P10 * math.atan(b)
    tr = integrate_trajectory(sc, pair, allowed_flow_microstate(Microstate(a, b)), x0, 0.0,
                              5.25 * DT10)
    tn = analysis.node_times(tr)
    grid = (np.arange(5) + 0.5) * DT10
    np.testing.assert_allclose(tn, grid, rtol=1e-8)


def test_mean_momentum_constant(free10):
    sc, pair = free10
    zs = phi2_zeros(pair, 0.0, 5.0)
    for b in (0.0, 5.0):
        p = analysis.mean_conjugate_momentum(pair, Microstate(3.0, b), (zs[0], zs[1]))
        assert p == pytest.approx(P10, rel=1e-12)
    p0 = analysis.mean_conjugate_momentum(pair, Microstate(3.0, 0.0), (zs[0], zs[1]))
    p5 = analysis.mean_conjugate_momentum(pair, Microstate(3.0, 5.0), (zs[0], zs[1]))
    assert p5 == pytest.approx(p0, rel=1e-12)


def test_mean_momentum_linear(linear10):
    sc, pair = linear10
    xt = sc.turning_points()[0]
    zs = phi2_zeros(pair, xt - 20.0, xt - 0.5)
    assert len(zs) >= 3
    for x0, x1 in zip(zs[:-1], zs[1:]):
        p = analysis.mean_conjugate_momentum(pair, Microstate(0.7, -0.4), (x0, x1))
        assert p * (x1 - x0) == pytest.approx(math.pi * sc.hbar, rel=1e-10)


def test_mean_momentum_rejects_bad_interval(free10):
    sc, pair = free10
    zs = phi2_zeros(pair, 0.0, 5.0)
    with pytest.raises(ValueError):
        analysis.mean_conjugate_momentum(pair, Microstate(1.0), (zs[0], zs[2]))
    with pytest.raises(ValueError):
        analysis.mean_conjugate_momentum(pair, Microstate(1.0), (zs[0] + 0.1, zs[1]))


def test_de_broglie_report(free10):
    sc, pair = free10
    zs = phi2_zeros(pair, 0.0, 5.0)
    rep = analysis.de_broglie_report(pair, Microstate(2.0, 1.0), (zs[0], zs[1]), delta_t=DT10)
    assert rep.wavelength * 1e-10 == pytest.approx(3.8783e-10, rel=1e-4)
    assert rep.wavelength * rep.p == pytest.approx(PLANCK_H, rel=1e-14)
    assert rep.delta_x == pytest.approx(rep.wavelength / 2, rel=1e-14)
    assert rep.p == pytest.approx(ELECTRON_MASS * math.sqrt(2 * EPS / ELECTRON_MASS), rel=1e-12)
    assert rep.mean_velocity == pytest.approx(math.sqrt(2 * EPS / ELECTRON_MASS), rel=1e-10)


def test_ermakov_examples(free10):
    sc, pair = free10
    x = np.linspace(-2, 2, 50)
    ms = Microstate(3.0, 2.0)
    st = analysis.PhysicalState(1.0, 1.0)
    vals = analysis.ermakov_invariant(x, pair, ms, st)
    assert np.ptp(vals) / np.mean(vals) <= 1e-9
    ref = analysis.ermakov_closed_form(pair, ms, st)
    np.testing.assert_allclose(vals, ref, rtol=1e-9)
    st0 = analysis.PhysicalState(0.0, 1.0)
    assert analysis.ermakov_closed_form(pair, ms, st0) == pytest.approx(
        sc.hbar * pair.W * 3.0 / math.sqrt(2 * sc.mass), rel=1e-14)


def test_physical_state_validation(free10):
    with pytest.raises(ValueError):
        analysis.PhysicalState(0.0, 0.0)
    with pytest.raises(TypeError):
        analysis.PhysicalState(1j, 1.0)
    sc, pair = free10
    with pytest.raises(ValueError):
        analysis.ermakov_invariant(0.1, pair, Microstate(1.0, branch=-1),
                                   analysis.PhysicalState(1.0, 0.0))


def test_classical_limit_classical_microstate():
    sc = Scenario(Constant(0.0), 10.0)
    rows = analysis.classical_limit_study(sc, Microstate(1.0, 0.0), [1.0, 0.5])
    assert all(r.deviation <= 1e-8 for r in rows)


def test_classical_limit_rejects_bad_scale():
    sc = Scenario(Constant(0.0), 10.0)
    with pytest.raises(ValueError):
        analysis.classical_limit_study(sc, Microstate(10.0), [2.0])


def test_classical_limit_harmonic_window_rescales(ground10):
    sc, _ = ground10
    half = sc.with_hbar_scale(0.5)
    assert half.turning_points()[1] == pytest.approx(0.5 * sc.turning_points()[1], rel=1e-14)
