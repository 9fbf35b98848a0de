"""Quantum law of motion: action, momentum, velocity field and trajectories.

With a pair ``(phi1, phi2)`` of Wronskian ``W`` and constants ``(a, b)``::

    S0 = hbar arctan(a phi1/phi2 + b) + hbar l
    P  = dS0/dx = +- hbar a W / (phi2^2 + (a phi1 + b phi2)^2)
    dx/dt = 2 (E - V) / P

The branch sign is +1 for motion in the +x direction in an allowed region
(with ``a W > 0``) and flips at every turning point, including when the
particle continues into a forbidden region.
"""

from dataclasses import dataclass, field, replace
import math
from typing import List, Optional

import numpy as np

from . import _kernels as K
from .basis import BasisPair, Constant, Linear, Scenario, phi2_zeros
from .constants import ELECTRON_MASS, HBAR


class PoleError(ArithmeticError):
    """Closed-form trajectory evaluated exactly at a velocity divergence."""


@dataclass(frozen=True)
class Microstate:
    """Non-classical constants ``(a, b)``, inert phase ``l`` and branch sign.

    ``l`` only shifts the action by ``hbar l``; it never enters the momentum
    or the motion.
    """

    a: float
    b: float = 0.0
    l: float = 0.0
    branch: int = 1

    def __post_init__(self):
        if self.a == 0 or not math.isfinite(self.a):
            raise ValueError("microstate constant a must be finite and non-zero")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")

    def normalized(self, W):
        """Equivalent microstate with ``a W > 0``.

        ``S0 -> -S0`` maps ``(a, b)`` to ``(-a, -b)``; flipping the branch
        as well leaves the velocity field unchanged.
        """
        if self.a * W > 0:
            return self
        return Microstate(-self.a, -self.b, -self.l, -self.branch)


def _eval(fn, pair, ms, x, rows=None):
    arr = np.asarray(x, dtype=float)
    out = fn(pair.kind, pair.params, float(ms.a), float(ms.b), float(ms.branch),
             np.ascontiguousarray(arr.ravel()))
    if rows is None:
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
    if arr.ndim == 0:
        return tuple(float(out[i, 0]) for i in range(rows))
    return tuple(out[i].reshape(arr.shape) for i in range(rows))


def conjugate_momentum(x, pair: BasisPair, ms: Microstate):
    """``P(x) = branch * hbar a W / (phi2^2 + (a phi1 + b phi2)^2)``."""
    return _eval(K.momentum_derivs_array, pair, ms, x, rows=3)[0]


def momentum_derivatives(x, pair: BasisPair, ms: Microstate):
    """``(P, P', P'')`` from analytic basis derivatives."""
    return _eval(K.momentum_derivs_array, pair, ms, x, rows=3)


def velocity_field(x, scenario: Scenario, pair: BasisPair, ms: Microstate):
    """``dx/dt = branch * 2 (E - V) (phi2^2 + (a phi1 + b phi2)^2) / (hbar a W)``.

    ``scenario`` must be the one ``pair`` was built for.
    """
    if scenario is not pair.scenario and scenario != pair.scenario:
        raise ValueError("scenario does not match the basis pair")
    return _eval(K.velocity_array, pair, ms, x)


def velocity_derivatives(x, pair: BasisPair, ms: Microstate):
    """``(f, f', f'')`` of the velocity field."""
    return _eval(K.velocity_derivs_array, pair, ms, x, rows=3)


def _phase(pair, ms, x):
    p1, p2, _, _ = pair.values(x)
    return p1, p2


def reduced_action(x, pair: BasisPair, ms: Microstate, x_ref=0.0):
    """``S0(x) = hbar arctan(a phi1/phi2 + b) + hbar l`` made continuous.

    The arctangent jumps by ``pi`` at every zero of ``phi2``; the jump is
    undone by adding ``sigma pi hbar`` per zero crossed between ``x_ref`` and
    ``x`` (``sigma`` = sign of ``P``). On the branch containing ``x_ref`` the
    plain formula holds. At a zero of ``phi2`` the value is the limit from the
    left.
    """
    hbar = pair.scenario.hbar
    sigma = 1.0 if ms.a * pair.W_x * ms.branch > 0 else -1.0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lo = min(float(xs.min()), x_ref)
    hi = max(float(xs.max()), x_ref)
    zeros = np.array(phi2_zeros(pair, lo, hi)) if hi > lo else np.array([])
    span = max(abs(lo), abs(hi), 1.0)

    def branch_angle(pt):
        if zeros.size and np.min(np.abs(zeros - pt)) <= 1e-12 * span:
            return sigma * math.pi / 2.0, float(zeros[np.argmin(np.abs(zeros - pt))])
        p1, p2 = _phase(pair, ms, pt)
        if p2 == 0.0:
            return sigma * math.pi / 2.0, pt
        return math.atan(ms.a * p1 / p2 + ms.b) * ms.branch, pt

    _, x_ref_eff = branch_angle(x_ref)
    out = np.empty(xs.size)
    for i, pt in enumerate(xs):
        th, pt_eff = branch_angle(pt)
        if pt_eff >= x_ref_eff:
            n = np.count_nonzero((zeros >= x_ref_eff) & (zeros < pt_eff))
        else:
            n = -np.count_nonzero((zeros >= pt_eff) & (zeros < x_ref_eff))
        out[i] = hbar * (th + sigma * math.pi * n + ms.l * ms.branch)
    res = out.reshape(np.shape(x))
    return float(res) if res.ndim == 0 else res


def qshje_residual(x, pair: BasisPair, ms: Microstate):
    """Stationary quantum Hamilton-Jacobi residual divided by ``|E|``::

        P^2/2m + V - E - hbar^2/4m [3/2 (P'/P)^2 - P''/P]
    """
    sc = pair.scenario
    p, p1, p2 = momentum_derivatives(x, pair, ms)
    lhs = p * p / (2 * sc.mass) + sc.V(x) - sc.energy
    rhs = sc.hbar**2 / (4 * sc.mass) * (1.5 * (p1 / p) ** 2 - p2 / p)
    return np.abs(lhs - rhs) / abs(sc.energy)


def fiqnl_residual(x, scenario: Scenario, pair: BasisPair, ms: Microstate,
                   velocity_scale=1.0):
    """Residual of the third-order first integral of the quantum Newton law.

    Time derivatives come from the autonomous chain rule
    ``xdot = f, xddot = f f', xdddot = f (f'^2 + f f'')``. The result is
    normalised by ``(E - V)^4 + E^4``. ``velocity_scale`` multiplies ``f``
    (used to probe that non-solutions are rejected).

    Raises
    ------
    ZeroDivisionError
        At a turning point, where ``f = 0``.
    """
    sc = scenario
    f, f1, f2 = velocity_derivatives(x, pair, ms)
    f, f1, f2 = velocity_scale * f, velocity_scale * f1, velocity_scale * f2
    if np.any(f == 0.0):
        raise ZeroDivisionError("FIQNL residual is indeterminate where the velocity vanishes")
    xd = f
    ratio2 = f1  # xddot / xdot
    ratio3 = f1 * f1 + f * f2  # xdddot / xdot
    xdd = f * f1
    kin = sc.energy - sc.V(x)
    _, v1, v2 = _potential_derivs(pair, x)
    hb2 = sc.hbar**2
    res = (kin**4 - sc.mass * xd**2 / 2 * kin**3
           + hb2 / 8 * (1.5 * ratio2**2 - ratio3) * kin**2
           - hb2 / 8 * (xd**2 * v2 + xdd * v1) * kin
           - 3 * hb2 / 16 * (xd * v1) ** 2)
    return np.abs(res) / (kin**4 + sc.energy**4)


def _potential_derivs(pair, x):
    arr = np.asarray(x, dtype=float)
    flat = arr.ravel()
    out = np.array([K.potential(pair.kind, pair.params, float(v)) for v in flat]).T
    if arr.ndim == 0:
        return tuple(float(o[0]) for o in out)
    return tuple(o.reshape(arr.shape) for o in out)


# ---------------------------------------------------------------- trajectories

@dataclass(frozen=True)
class Event:
    t: float
    x: float
    kind: str  # node | branch_flip | divergence_cutoff | region_change


@dataclass
class IntegrationOptions:
    """Integrator settings, in internal units (eV, A, fs).

    ``epsilon_turn`` sets the turning-point band ``|E - V| <= eps |E|`` in
    which the branch flips. ``v_max`` (default ``1e4 sqrt(2|eps|/m)``) stops
    runaway forbidden-region motion. ``enter_barrier`` lets the particle keep
    its direction through a turning point into the forbidden region.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    epsilon_turn: float = 1e-9
    v_max: Optional[float] = None
    enter_barrier: bool = False
    max_steps: int = 200_000
    max_events: int = 20_000


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    branch: np.ndarray
    events: List[Event]
    status: str  # completed | diverged | stalled_at_turning_point | left_domain
    microstate: Microstate
    options: IntegrationOptions
    x_start: float = 0.0
    # dense-output segments: start time, step, start x, stage slopes, valid end
    _seg_t: np.ndarray = field(default=None, repr=False)
    _seg_h: np.ndarray = field(default=None, repr=False)
    _seg_x: np.ndarray = field(default=None, repr=False)
    _seg_k: np.ndarray = field(default=None, repr=False)
    _seg_end: np.ndarray = field(default=None, repr=False)

    @property
    def t_end(self):
        return float(self.t[-1])

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    def __call__(self, t):
        """Dense-output position at time(s) ``t`` within the integrated span."""
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(tt < self.t[0] - 1e-12 * max(1.0, abs(self.t[0]))) or np.any(
            tt > self.t[-1] + 1e-12 * max(1.0, abs(self.t[-1]))
        ):
            raise ValueError("time outside the integrated interval")
        idx = np.searchsorted(self._seg_end, tt, side="left")
        idx = np.clip(idx, 0, len(self._seg_t) - 1)
        out = np.empty(tt.size)
        for i, (ti, j) in enumerate(zip(tt, idx)):
            h = self._seg_h[j]
            theta = (ti - self._seg_t[j]) / h if h > 0 else 0.0
            out[i] = K.dense_eval(self._seg_x[j], h, self._seg_k[j], theta)
        return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))

    def sample(self, n):
        """``n`` uniformly spaced dense-output samples merged with event points."""
        grid = np.linspace(self.t[0], self.t[-1], n)
        ev = [e.t for e in self.events]
        tt = np.unique(np.concatenate([grid, ev, [self.t[0], self.t[-1]]]))
        return tt, self(tt)

    def branch_at(self, t):
        """Branch sign in force at time(s) ``t``; an event time keeps the
        sign it was reached with."""
        idx = np.searchsorted(self.t, np.asarray(t, dtype=float), side="left")
        return self.branch[np.clip(idx, 0, len(self.t) - 1)]

    def state_samples(self, pair: BasisPair, n):
        """``(t, x, v, branch)`` on the grid of :meth:`sample`."""
        tt, xx = self.sample(n)
        br = self.branch_at(tt)
        ms = self.microstate
        vv = np.array([K.velocity(pair.kind, pair.params, ms.a, ms.b, float(s), x)
                       for s, x in zip(br, xx)])
        return tt, xx, vv, br


def default_v_max(scenario: Scenario, x0):
    if isinstance(scenario.potential, Constant):
        eps = abs(scenario.energy - scenario.potential.v0)
    else:
        eps = abs(scenario.energy)
    return 1e4 * math.sqrt(2.0 * eps / scenario.mass)


def _bisect(g, lo, hi, iters=200):
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= min(lo, hi) or mid >= max(lo, hi):
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _band_edge(pair, x_in, x_out, band):
    """Point between x_in (inside the band) and x_out where |E - V| = band."""
    sc = pair.scenario
    return _bisect(lambda x: abs(sc.energy - sc.V(x)) - band, x_in, x_out)


def _mirror_across_turning_point(pair, x):
    """Point on the far side of the nearest turning point with E - V negated."""
    sc = pair.scenario
    target = 2 * sc.energy - sc.V(x)
    tps = sc.turning_points()
    tp = min(tps, key=lambda p: abs(p - x))
    far = tp + (tp - x)
    # widen until the bracket contains the target level
    while (sc.V(far) - target) * (sc.V(tp) - target) > 0:
        far = tp + 2 * (far - tp)
    return _bisect(lambda y: sc.V(y) - target, tp, far)


def _start_point(pair, ms, x0, band):
    """Move a start point lying in the turning band to its edge.

    Returns ``(x, branch, flipped)``; the branch is flipped if the chosen edge
    would send the particle straight back into the band.
    """
    sc = pair.scenario
    if abs(sc.energy - sc.V(x0)) > band or not sc.turning_points():
        return x0, ms.branch, False
    tp = min(sc.turning_points(), key=lambda p: abs(p - x0))
    scale = max(abs(tp), 1e-3)
    # the allowed side is where E - V > 0
    probe = scale * 1e-3
    side = -1.0 if sc.energy - sc.V(tp - probe) > 0 else 1.0
    far = tp + side * probe
    while abs(sc.energy - sc.V(far)) <= band:
        far = tp + 2 * (far - tp)
    x = _band_edge(pair, tp, far, band)
    v = K.velocity(pair.kind, pair.params, ms.a, ms.b, float(ms.branch), x)
    if v * side < 0:
        return x, -ms.branch, True
    return x, ms.branch, False


def integrate_trajectory(scenario: Scenario, pair: BasisPair, ms: Microstate,
                         x0, t0, t_end, opts: Optional[IntegrationOptions] = None
                         ) -> Trajectory:
    """Integrate ``dx/dt = f(x)`` with adaptive Dormand-Prince 5(4) steps.

    Events, each localised on the dense output:

    * ``node`` when ``phi2`` changes sign;
    * ``branch_flip`` when ``|E - V| <= epsilon_turn |E|``; integration
      continues with the opposite branch sign (and, with ``enter_barrier``,
      from the mirror point in the forbidden region, logged as
      ``region_change``);
    * ``divergence_cutoff`` when ``|v| >= v_max``; the run ends ``diverged``.

    A start point inside the turning band is moved to the band edge on the
    allowed side. Step-size underflow ends the run
    ``stalled_at_turning_point``; reaching the edge of the region where the
    basis is representable (Airy table, exponent budget) ends it
    ``left_domain``.
    """
    if scenario is not pair.scenario and scenario != pair.scenario:
        raise ValueError("scenario does not match the basis pair")
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    opts = opts or IntegrationOptions()
    if not K.in_domain(pair.kind, pair.params, float(x0)):
        raise ValueError(f"x0={x0} lies outside the domain where the basis is representable")
    ms = ms.normalized(pair.W_x)
    sc = pair.scenario
    kind, prm = pair.kind, pair.params
    a, b = float(ms.a), float(ms.b)
    band = opts.epsilon_turn * abs(sc.energy)
    v_max = opts.v_max if opts.v_max is not None else default_v_max(sc, x0)
    t_scale = sc.hbar / max(abs(sc.energy), 1e-300)

    events: List[Event] = []
    x, sign, flipped = _start_point(pair, ms, float(x0), band)
    x_start = x
    if flipped:
        events.append(Event(float(t0), x, "branch_flip"))
    t = float(t0)
    h = 1e-3 * t_scale
    ts, xs, signs = [np.array([t])], [np.array([x])], [np.array([float(sign)])]
    seg_t, seg_h, seg_x, seg_k, seg_end = [], [], [], [], []
    status = "completed"
    skip_node = False

    while True:
        n, st, sx, sk, code, h_next = K.dopri_segment(
            kind, prm, a, b, float(sign), x, t, float(t_end), h, opts.rtol, opts.atol,
            opts.epsilon_turn, v_max, opts.max_steps, t_scale, skip_node)
        if n:
            seg_t.append(st[:n])
            seg_h.append(np.diff(st[: n + 1]))
            seg_x.append(sx[:n])
            seg_k.append(sk[:n].copy())
            seg_end.append(st[1: n + 1].copy())
        if code == K.STOP_END or code == K.STOP_MAX_STEPS:
            ts.append(st[1: n + 1])
            xs.append(sx[1: n + 1])
            signs.append(np.full(n, float(sign)))
            if code == K.STOP_MAX_STEPS:
                status = "stalled_at_turning_point"
            break
        if code == K.STOP_UNDERFLOW or code == K.STOP_DOMAIN:
            ts.append(st[1: n + 1])
            xs.append(sx[1: n + 1])
            signs.append(np.full(n, float(sign)))
            status = "stalled_at_turning_point" if code == K.STOP_UNDERFLOW else "left_domain"
            break

        # event inside the last accepted step [st[n-1], st[n]]
        t_lo, x_lo = st[n - 1], sx[n - 1]
        t_hi, x_hi = st[n], sx[n]
        kk = sk[n - 1]
        hstep = t_hi - t_lo

        def dense(tq):
            return K.dense_eval(x_lo, hstep, kk, (tq - t_lo) / hstep)

        if code == K.STOP_NODE:
            x_ev = _bisect(lambda y: K.basis(kind, prm, y)[1], x_lo, x_hi)
            kind_ev = "node"
        elif code == K.STOP_TURNING:
            kin_lo = sc.energy - sc.V(x_lo)
            kin_hi = sc.energy - sc.V(x_hi)
            if kin_lo * kin_hi < 0:
                x_in = _bisect(lambda y: sc.energy - sc.V(y), x_lo, x_hi)
            else:
                x_in = x_hi
            x_ev = _band_edge(pair, x_in, x_lo, band)
            kind_ev = "branch_flip"
        else:
            t_ev = _bisect(
                lambda tq: abs(K.velocity(kind, prm, a, b, float(sign), dense(tq))) - v_max,
                t_lo, t_hi)
            x_ev = dense(t_ev)
            kind_ev = "divergence_cutoff"
        if code != K.STOP_DIVERGED:
            if x_ev == x_lo:
                t_ev = t_lo
            else:
                t_ev = _bisect(lambda tq: dense(tq) - x_ev, t_lo, t_hi)
        seg_end[-1][-1] = t_ev
        ts.append(np.concatenate([st[1:n], [t_ev]]))
        xs.append(np.concatenate([sx[1:n], [x_ev]]))
        signs.append(np.full(n, float(sign)))
        events.append(Event(float(t_ev), float(x_ev), kind_ev))
        t, x = float(t_ev), float(x_ev)
        h = max(min(h_next, hstep), 1e-6 * t_scale)
        skip_node = code == K.STOP_NODE

        if code == K.STOP_DIVERGED:
            status = "diverged"
            break
        if code == K.STOP_TURNING:
            sign = -sign
            if opts.enter_barrier and sc.turning_points():
                x = _mirror_across_turning_point(pair, x)
                events.append(Event(t, x, "region_change"))
                ts.append(np.array([t]))
                xs.append(np.array([x]))
                signs.append(np.array([float(sign)]))
        if len(events) > opts.max_events:
            status = "stalled_at_turning_point"
            break
        if t >= t_end:
            break

    t_all = np.concatenate(ts)
    x_all = np.concatenate(xs)
    s_all = np.concatenate(signs).astype(int)
    v_all = np.array([K.velocity(kind, prm, a, b, float(s), xv) for s, xv in zip(s_all, x_all)])
    if seg_t:
        seg = dict(_seg_t=np.concatenate(seg_t), _seg_h=np.concatenate(seg_h),
                   _seg_x=np.concatenate(seg_x), _seg_k=np.concatenate(seg_k),
                   _seg_end=np.concatenate(seg_end))
    else:
        seg = dict(_seg_t=np.array([t0]), _seg_h=np.array([0.0]), _seg_x=np.array([x]),
                   _seg_k=np.zeros((1, 7)), _seg_end=np.array([t0]))
    return Trajectory(t_all, x_all, v_all, s_all, events, status, ms, opts, x_start, **seg)


# ---------------------------------------------------------- closed-form motion

def constant_allowed_analytic(t, eps, ms: Microstate, x0=0.0, mass=ELECTRON_MASS,
                              hbar=HBAR):
    """Continuous allowed-region motion in a constant potential (``a > 0``)::

        x = hbar/p [arctan(a tan(2 eps t/hbar) + b) + n pi] + x0,
        n = round(2 eps t / (pi hbar)),  p = sqrt(2 m eps)
    """
    if not eps > 0:
        raise ValueError("allowed-region motion needs eps > 0")
    if not ms.a > 0:
        raise ValueError("a must be positive")
    t = np.asarray(t, dtype=float)
    p = math.sqrt(2 * mass * eps)
    phase = 2 * eps * t / hbar
    n = np.round(phase / math.pi)
    theta = phase - n * math.pi
    with np.errstate(over="ignore"):
        tan = np.tan(theta)
    inner = np.where(np.abs(theta) >= math.pi / 2 * (1 - 1e-15),
                     np.sign(theta) * math.pi / 2, np.arctan(ms.a * tan + ms.b))
    res = hbar / p * (inner + n * math.pi) + x0
    return float(res) if res.ndim == 0 else res


def allowed_flow_microstate(ms: Microstate) -> Microstate:
    """Flow constants reproducing :func:`constant_allowed_analytic` for ``ms``.

    With ``phi1 = sin kx, phi2 = cos kx`` the flow obeys
    ``a tan(kx) + b = tan(2 eps t/hbar)``, while the closed form is written as
    ``tan(kx) = a tan(2 eps t/hbar) + b``. Both describe the same family of
    curves, labelled through the involution ``(a, b) -> (1/a, -b/a)``.
    Launch the flow from ``x(0) = hbar/p arctan(b) + x0``.
    """
    return Microstate(1.0 / ms.a, -ms.b / ms.a, ms.l, ms.branch)


def constant_forbidden_analytic(t, eps, a, b, t0=0.0, mass=ELECTRON_MASS, hbar=HBAR):
    """Forbidden-region motion in a constant potential, plus-sign form::

        x = 1/(2 rho) ln| tan(-2 eps (t - t0)/hbar)/a - b/a |
        v = sqrt(-eps/2m) (1 + tan^2) / (tan - b)

    Raises
    ------
    PoleError
        At a divergence time (``tan = b`` or ``tan = +-inf``).
    """
    if not eps < 0:
        raise ValueError("forbidden-region motion needs eps < 0")
    if a == 0:
        raise ValueError("a must be non-zero")
    t = np.asarray(t, dtype=float)
    rho = math.sqrt(-2 * mass * eps) / hbar
    theta = -2 * eps * (t - t0) / hbar
    cosv = np.cos(theta)
    tan = np.tan(theta)
    if np.any(np.abs(cosv) < 1e-15) or np.any(tan - b == 0.0):
        raise PoleError("velocity diverges at this time")
    x = np.log(np.abs(tan / a - b / a)) / (2 * rho)
    v = math.sqrt(-eps / (2 * mass)) * (1 + tan * tan) / (tan - b)
    if x.ndim == 0:
        return float(x), float(v)
    return x, v


def constant_forbidden_velocity_x(x, eps, a, b, mass=ELECTRON_MASS, hbar=HBAR):
    """Position form of the forbidden-region velocity::

        v = (1/a) sqrt(-eps/2m) [exp(-2 rho x) + (a exp(rho x) + b exp(-rho x))^2]
    """
    rho = math.sqrt(-2 * mass * eps) / hbar
    x = np.asarray(x, dtype=float)
    return (1 / a) * math.sqrt(-eps / (2 * mass)) * (
        np.exp(-2 * rho * x) + (a * np.exp(rho * x) + b * np.exp(-rho * x)) ** 2)


@dataclass(frozen=True)
class ClassicalPath:
    """Closed-form classical motion ``m xdot^2/2 + V(x) = E``."""

    scenario: Scenario
    x0: float
    v0: float
    turning_points: tuple
    period: Optional[float] = None

    def position(self, t):
        sc, t = self.scenario, np.asarray(t, dtype=float)
        pot = sc.potential
        if isinstance(pot, Constant):
            res = self.x0 + self.v0 * t
        elif isinstance(pot, Linear):
            res = self.x0 + self.v0 * t - pot.g / (2 * sc.mass) * t * t
        else:
            w = pot.omega
            res = self.x0 * np.cos(w * t) + self.v0 / w * np.sin(w * t)
        return float(res) if res.ndim == 0 else res

    def velocity(self, t):
        sc, t = self.scenario, np.asarray(t, dtype=float)
        pot = sc.potential
        if isinstance(pot, Constant):
            res = np.full_like(t, self.v0)
        elif isinstance(pot, Linear):
            res = self.v0 - pot.g / sc.mass * t
        else:
            w = pot.omega
            res = -self.x0 * w * np.sin(w * t) + self.v0 * np.cos(w * t)
        return float(res) if res.ndim == 0 else res

    def energy_error(self, t):
        """Relative violation of the classical energy relation."""
        sc = self.scenario
        e = 0.5 * sc.mass * self.velocity(t) ** 2 + sc.V(self.position(t))
        return np.abs(e - sc.energy) / abs(sc.energy)

    def time_of_first_turning_point(self):
        sc = self.scenario
        pot = sc.potential
        if isinstance(pot, Constant):
            return None
        if isinstance(pot, Linear):
            return sc.mass * self.v0 / pot.g if self.v0 > 0 else 0.0
        w = pot.omega
        # x = A cos(w t - phi): first zero of the velocity after t = 0
        phi = math.atan2(self.v0 / w, self.x0)
        tt = phi / w
        while tt <= 1e-15 * self.period:
            tt += math.pi / w
        return tt


def classical_path(scenario: Scenario, x0, sign=1) -> ClassicalPath:
    """Classical line, parabola or sinusoid through ``x0`` moving with ``sign``."""
    sc = scenario
    kin = sc.energy - sc.V(x0)
    if kin < -1e-9 * abs(sc.energy):
        raise ValueError("classical motion needs E >= V(x0)")
    kin = max(kin, 0.0)  # starting at a rounded turning point
    v0 = sign * math.sqrt(2 * kin / sc.mass)
    period = None
    if sc.omega is not None:
        period = 2 * math.pi / sc.omega
    return ClassicalPath(sc, float(x0), v0, sc.turning_points(), period)


def with_branch(ms: Microstate, branch):
    return replace(ms, branch=branch)
