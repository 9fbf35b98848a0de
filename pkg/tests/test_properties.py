import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from qtraj import analysis, specfun
from qtraj.basis import (Constant, Scenario, TransformParams, build_basis,
                         consistency_residual, invert_microstate_map, map_microstate,
                         transform_basis)
from qtraj.checks import allowed_samples, standard_scenarios
from qtraj.dynamics import (Microstate, conjugate_momentum, constant_allowed_analytic,
                            qshje_residual, velocity_field)
from qtraj.tunneling import BarrierSpec, dwell_time, dwell_time_derivative

SCENARIOS = standard_scenarios()
PAIRS = {k: build_basis(sc) for k, sc in SCENARIOS.items()}

a_vals = st.floats(0.05, 20.0)
b_vals = st.floats(-5.0, 5.0)
coef = st.floats(-3.0, 3.0)
keys = st.sampled_from(sorted(SCENARIOS))
FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def transforms():
    return st.tuples(coef, coef, coef, coef).filter(
        lambda t: abs(t[0] * t[3] - t[1] * t[2]) > 0.2).map(lambda t: TransformParams(*t))


@FAST
@given(st.floats(-40.0, 12.0))
def test_airy_wronskian_everywhere(y):
    ai, bi, aip, bip = specfun.airy_pair(y)
    assert abs(math.pi * (ai * bip - aip * bi) - 1) < 1e-10


@FAST
@given(st.floats(-1e6, 1e6))
def test_dawson_odd(u):
    assert specfun.dawson(-u) == -specfun.dawson(u)


@FAST
@given(keys, a_vals, b_vals, st.sampled_from([1, -1]))
def test_velocity_momentum_product(key, a, b, br):
    sc, pair = SCENARIOS[key], PAIRS[key]
    ms = Microstate(a, b, branch=br).normalized(pair.W_x)
    x = allowed_samples(sc, 25) + 1e-3
    prod = velocity_field(x, sc, pair, ms) * conjugate_momentum(x, pair, ms)
    kin = 2 * (sc.energy - sc.V(x))
    np.testing.assert_allclose(prod, kin, rtol=1e-9, atol=1e-9 * sc.energy)


@FAST
@given(keys, a_vals, b_vals)
def test_momentum_never_vanishes(key, a, b):
    sc, pair = SCENARIOS[key], PAIRS[key]
    p = conjugate_momentum(allowed_samples(sc, 101), pair, Microstate(a, b).normalized(pair.W_x))
    assert np.all(np.isfinite(p)) and np.all(np.abs(p) > 0)
    assert np.all(np.sign(p) == np.sign(p[0]))


@FAST
@given(keys, st.floats(0.2, 5.0), st.floats(-2.0, 2.0))
def test_qshje_holds(key, a, b):
    sc, pair = SCENARIOS[key], PAIRS[key]
    x = allowed_samples(sc, 40) + 1.234e-3
    assert np.max(qshje_residual(x, pair, Microstate(a, b))) <= 1e-8


@FAST
@given(transforms(), st.floats(0.2, 5.0), b_vals)
def test_microstate_map_consistency(p, at, bt):
    a, b = map_microstate(p, at, bt)
    scale = 1 + abs((1 + b * b) / a)
    assert abs(consistency_residual(p, a, b, at, bt)) <= 1e-10 * scale


@FAST
@given(transforms(), st.floats(0.2, 5.0), st.floats(-2.0, 2.0))
def test_microstate_round_trip(p, at, bt):
    a, b = map_microstate(p, at, bt)
    assume(abs(a) < 1e6)
    rt, rb = invert_microstate_map(p, a, b)
    assert math.isclose(rt, at, rel_tol=1e-8, abs_tol=1e-9)
    assert math.isclose(rb, bt, rel_tol=1e-8, abs_tol=1e-9)


@FAST
@given(keys, transforms(), st.floats(0.2, 5.0), st.floats(-2.0, 2.0))
def test_velocity_basis_independent(key, p, at, bt):
    sc, pair = SCENARIOS[key], PAIRS[key]
    new = transform_basis(pair, p)
    a, b = map_microstate(p, at, bt)
    x = allowed_samples(sc, 30) + 2.1e-3
    v_new = velocity_field(x, sc, new, Microstate(at, bt).normalized(new.W_x))
    v_old = velocity_field(x, sc, pair, Microstate(a, b).normalized(pair.W_x))
    np.testing.assert_allclose(v_new, v_old, rtol=1e-9)


@FAST
@given(transforms())
def test_wronskian_scales_with_det(p):
    pair = PAIRS["harmonic_ground"]
    new = transform_basis(pair, p)
    x = np.linspace(-0.5, 0.5, 11)
    np.testing.assert_allclose(new.wronskian(x), p.det * pair.wronskian(x), rtol=1e-10)


@FAST
@given(keys, st.floats(0.2, 5.0), st.floats(-2.0, 2.0), coef, coef)
def test_ermakov_constant(key, a, b, al, be):
    assume(abs(al) + abs(be) > 0.1)
    sc, pair = SCENARIOS[key], PAIRS[key]
    ms = Microstate(a, b)
    state = analysis.PhysicalState(al, be)
    vals = analysis.ermakov_invariant(allowed_samples(sc, 30), pair, ms, state)
    ref = analysis.ermakov_closed_form(pair, ms, state)
    np.testing.assert_allclose(vals, ref, rtol=1e-9)


@FAST
@given(st.floats(0.5, 50.0), a_vals, b_vals)
def test_constant_node_positions_independent_of_microstate(eps, a, b):
    sc = Scenario(Constant(0.0), eps)
    n = np.arange(4)
    tn = math.pi * sc.hbar * (n + 0.5) / (2 * eps)
    x = constant_allowed_analytic(tn, eps, Microstate(a, b))
    p = math.sqrt(2 * sc.mass * eps)
    np.testing.assert_allclose(x, math.pi * sc.hbar * (n + 0.5) / p, rtol=1e-12)


@FAST
@given(st.floats(0.5, 40.0), st.floats(0.1, 30.0), st.floats(1e-3, 10.0), st.floats(0.1, 5.0),
       st.floats(-3.0, 3.0), st.floats(0.0, 50.0))
def test_dwell_time_properties(e, gap, q, a, b, shift):
    s = BarrierSpec(V0=e + gap, q=q, E=e, a=a, b=b)
    s2 = BarrierSpec(V0=e + gap + shift, q=q, E=e + shift, a=a, b=b)
    x = np.linspace(0, q, 17)
    t = dwell_time(s, x)
    assert t[0] == 0.0
    # non-decreasing up to rounding once T has saturated
    assert np.all(np.diff(t) >= -4 * np.finfo(float).eps * np.max(t))
    assert np.all(dwell_time_derivative(s, x) > 0)
    np.testing.assert_allclose(dwell_time(s2, x), t, rtol=1e-9, atol=1e-300)
