"""Self-consistency suite behind ``qtraj check``.

Every check returns a :class:`CheckResult` holding the worst observed value
and the tolerance it is held to.
"""

from dataclasses import dataclass
import math
import time
from typing import Callable, List, Optional

import numpy as np

from . import analysis, tunneling
from .basis import (Constant, HarmonicExcited1, HarmonicGround, Linear, Scenario,
                    TransformParams, build_basis, map_microstate, schrodinger_residual,
                    transform_basis)
from .constants import HBAR, force_si_to_internal
from .dynamics import (IntegrationOptions, Microstate, allowed_flow_microstate, fiqnl_residual,
                       integrate_trajectory, qshje_residual, velocity_field)

G_FIG2 = force_si_to_internal(1e-9)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float = 0.0


def standard_scenarios():
    """One scenario per potential, at the energies used throughout."""
    return {
        "constant": Scenario(Constant(0.0), 10.0),
        "linear": Scenario(Linear(G_FIG2), 10.0),
        "harmonic_ground": Scenario(HarmonicGround(), 10.0),
        "harmonic_excited1": Scenario(HarmonicExcited1(), 30.0),
    }


STANDARD_MICROSTATES = {
    "constant": [(1.0, 0.0), (10.0, 0.0), (3.0, 2.0), (0.5, 1.5)],
    "linear": [(1.0, 0.0), (0.5, 1.0), (3.0, -2.0)],
    "harmonic_ground": [(0.8, 1.0), (0.8, 0.0), (6.0, 2.0)],
    "harmonic_excited1": [(0.8, 1.0), (2.0, -1.0), (10.0, 0.5)],
}


def allowed_samples(scenario: Scenario, n, margin=0.05):
    """``n`` points strictly inside the classically allowed region."""
    tps = scenario.turning_points()
    if len(tps) == 2:
        lo, hi = tps[0] * (1 - margin), tps[1] * (1 - margin)
    elif len(tps) == 1:
        lo, hi = tps[0] - 30.0, tps[0] - margin * 10.0
    else:
        lo, hi = -5.0, 5.0
    return np.linspace(lo, hi, n)


def residual_points(scenario, pair, ms, n):
    """Allowed-region samples with nodes of ``phi2`` and ``x = 0`` nudged off."""
    xs = allowed_samples(scenario, n)
    return xs + 1e-3 * (xs[1] - xs[0]) * math.pi


def _timed(name, fn: Callable[[], float], tol) -> CheckResult:
    t0 = time.perf_counter()
    try:
        val = float(fn())
        ok = bool(val <= tol)
    except Exception:  # any failure inside a check counts as a fail
        val, ok = math.inf, False
    return CheckResult(name, ok, val, tol, time.perf_counter() - t0)


def check_wronskians():
    worst = 0.0
    for sc in standard_scenarios().values():
        pair = build_basis(sc)
        w = pair.wronskian(allowed_samples(sc, 200))
        worst = max(worst, float(np.max(np.abs(w / pair.W_x - 1))))
    return worst


def check_schrodinger():
    worst = 0.0
    for sc in standard_scenarios().values():
        pair = build_basis(sc)
        r1, r2 = schrodinger_residual(pair, sc, allowed_samples(sc, 200))
        worst = max(worst, float(np.max(r1)), float(np.max(r2)))
    return worst


def check_qshje(n=250):
    worst = 0.0
    for key, sc in standard_scenarios().items():
        pair = build_basis(sc)
        for a, b in STANDARD_MICROSTATES[key]:
            xs = residual_points(sc, pair, None, n)
            worst = max(worst, float(np.max(qshje_residual(xs, pair, Microstate(a, b)))))
    return worst


def check_fiqnl(n=250):
    worst = 0.0
    for key, sc in standard_scenarios().items():
        pair = build_basis(sc)
        for a, b in STANDARD_MICROSTATES[key]:
            xs = residual_points(sc, pair, None, n)
            worst = max(worst, float(np.max(fiqnl_residual(xs, sc, pair, Microstate(a, b)))))
    return worst


def check_node_invariance(opts=None):
    """Spread of node times across the constant-potential family."""
    sc = standard_scenarios()["constant"]
    pair = build_basis(sc)
    eps = sc.energy
    dt = math.pi * sc.hbar / (2 * eps)
    p = math.sqrt(2 * sc.mass * eps)
    lists = []
    for a, b in STANDARD_MICROSTATES["constant"]:
        ms = Microstate(a, b)
        x0 = sc.hbar / p * math.atan(b)
        tr = integrate_trajectory(sc, pair, allowed_flow_microstate(ms), x0, 0.0, 5.25 * dt, opts)
        lists.append(analysis.node_times(tr))
    if any(len(v) != 5 for v in lists):
        return math.inf
    grid = (np.arange(5) + 0.5) * dt
    return max(float(np.max(np.abs(v - grid))) / dt for v in lists)


def check_ermakov():
    worst = 0.0
    state = analysis.PhysicalState(1.0, 0.7)
    for key, sc in standard_scenarios().items():
        pair = build_basis(sc)
        for a, b in STANDARD_MICROSTATES[key]:
            ms = Microstate(a, b).normalized(pair.W_x)
            ms = Microstate(ms.a, ms.b)
            vals = analysis.ermakov_invariant(allowed_samples(sc, 60), pair, ms, state)
            ref = analysis.ermakov_closed_form(pair, ms, state)
            worst = max(worst, float(np.max(np.abs(vals - ref)) / abs(ref)))
    return worst


def check_basis_change():
    """Velocity fields in a transformed pair against the original."""
    rng = np.random.default_rng(12345)
    worst = 0.0
    for key, sc in standard_scenarios().items():
        pair = build_basis(sc)
        xs = residual_points(sc, pair, None, 200)
        for _ in range(3):
            while True:
                mu, nu, al, be = rng.uniform(-2, 2, 4)
                if abs(mu * be - nu * al) > 0.3:
                    break
            tp = TransformParams(mu, nu, al, be)
            new = transform_basis(pair, tp)
            at, bt = rng.uniform(0.5, 3.0), rng.uniform(-2, 2)
            a, b = map_microstate(tp, at, bt)
            v_new = velocity_field(xs, sc, new, Microstate(at, bt).normalized(new.W_x))
            v_old = velocity_field(xs, sc, pair, Microstate(a, b).normalized(pair.W_x))
            worst = max(worst, float(np.max(np.abs(v_new - v_old) / np.abs(v_old))))
    return worst


def check_barrier_limits():
    thick = tunneling.BarrierSpec(V0=20.0, q=20.0, E=10.0)
    t_inf = HBAR * math.pi / (8 * 10.0)
    e1 = abs(tunneling.dwell_time(thick, thick.q) / t_inf - 1)
    rho = thick.rho
    thin = tunneling.BarrierSpec(V0=20.0, q=1e-3 / rho, E=10.0)
    e2 = abs(tunneling.dwell_time(thin, thin.q) / tunneling.thin_limit(thin) - 1)
    rep = tunneling.monotonicity_report(
        lambda x: tunneling.floyd_dwell_time(thick, x), (0.0, thick.q),
        lambda x: tunneling.floyd_dwell_time_derivative(thick, x))
    e3 = 0.0 if not rep.monotone else math.inf
    return max(e1, e2, e3)


def check_turning_points(opts: Optional[IntegrationOptions] = None):
    """Branch flips must sit on the classical turning points."""
    worst = 0.0
    for key in ("harmonic_ground", "linear"):
        sc = standard_scenarios()[key]
        pair = build_basis(sc)
        tps = np.array(sc.turning_points())
        if key == "linear":
            x0, ms, t_end = tps[0] - 8.0, Microstate(3.0, -2.0), 6.0
        else:
            x0, ms, t_end = 0.0, Microstate(1 / tps[1], 0.0), 1.5
        tr = integrate_trajectory(sc, pair, ms, x0, 0.0, t_end, opts)
        flips = tr.events_of("branch_flip")
        if not flips:
            return math.inf
        for e in flips:
            worst = max(worst, float(np.min(np.abs(tps - e.x)) / np.max(np.abs(tps))))
    return worst


def run_suite(epsilon_turn=None) -> List[CheckResult]:
    opts = IntegrationOptions()
    if epsilon_turn is not None:
        opts.epsilon_turn = epsilon_turn
    return [
        _timed("wronskian_constant", check_wronskians, 1e-10),
        _timed("schrodinger_residual", check_schrodinger, 1e-6),
        _timed("qshje_residual", check_qshje, 1e-8),
        _timed("fiqnl_residual", check_fiqnl, 1e-7),
        _timed("node_invariance", lambda: check_node_invariance(opts), 1e-6),
        _timed("ermakov_constancy", check_ermakov, 1e-9),
        _timed("basis_change_equivalence", check_basis_change, 1e-9),
        _timed("barrier_limits", check_barrier_limits, 1e-2),
        _timed("turning_point_location", lambda: check_turning_points(opts), 1e-6),
    ]

