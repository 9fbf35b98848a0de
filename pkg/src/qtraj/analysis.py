"""Nodes, mean momentum and wavelength, the Ermakov invariant and the
classical-limit convergence study."""

from dataclasses import dataclass
import math
from typing import List, Optional, Sequence

import numpy as np

from .basis import BasisPair, Scenario, build_basis, phi2_zeros
from .constants import PLANCK_H
from .dynamics import (IntegrationOptions, Microstate, Trajectory, classical_path,
                       integrate_trajectory, momentum_derivatives, reduced_action)

PHI2_ZERO = "phi2_zero"
TURNING_POINT = "turning_point"


@dataclass(frozen=True)
class Node:
    t: float  # nan for purely spatial nodes
    x: float
    kind: str  # phi2_zero | turning_point


def find_nodes(scenario: Scenario, pair: BasisPair, x_range) -> List[Node]:
    """Zeros of ``phi2`` and classical turning points inside ``x_range``.

    A zero that coincides with a turning point (the linear pair vanishes
    exactly there) is reported once, as a turning point.
    """
    lo, hi = sorted(float(v) for v in x_range)
    tps = [tp for tp in scenario.turning_points() if lo <= tp <= hi]
    span = max(abs(lo), abs(hi), 1e-300)
    nodes = [Node(math.nan, float(tp), TURNING_POINT) for tp in tps]
    for z in phi2_zeros(pair, lo, hi):
        if any(abs(z - tp) <= 1e-9 * span for tp in tps):
            continue
        nodes.append(Node(math.nan, float(z), PHI2_ZERO))
    return sorted(nodes, key=lambda n: n.x)


def trajectory_nodes(trajectory: Trajectory, include_turning=True) -> List[Node]:
    """Node events of an integrated trajectory, in time order."""
    out = []
    for e in trajectory.events:
        if e.kind == "node":
            out.append(Node(e.t, e.x, PHI2_ZERO))
        elif include_turning and e.kind == "branch_flip":
            out.append(Node(e.t, e.x, TURNING_POINT))
    return out


def node_times(trajectory: Trajectory, include_turning=False):
    """Times at which the trajectory passes a node."""
    return np.array([n.t for n in trajectory_nodes(trajectory, include_turning)])


def _check_interval(pair, node_interval):
    x0, x1 = sorted(float(v) for v in node_interval)
    if not x1 > x0:
        raise ValueError("node interval must have positive length")
    inner = np.linspace(x0, x1, 257)
    p2 = pair.phi2(inner)
    ref = np.max(np.abs(p2))
    if abs(p2[0]) > 1e-8 * ref or abs(p2[-1]) > 1e-8 * ref:
        raise ValueError("interval ends are not zeros of phi2")
    if phi2_zeros(pair, x0 + 1e-6 * (x1 - x0), x1 - 1e-6 * (x1 - x0)):
        raise ValueError("interval contains an interior zero of phi2")
    return x0, x1


def mean_conjugate_momentum(pair: BasisPair, ms: Microstate, node_interval):
    """``|S0(x_{n+1}) - S0(x_n)| / (x_{n+1} - x_n)`` across adjacent zeros of ``phi2``.

    Raises
    ------
    ValueError
        If the interval is not bounded by adjacent zeros of ``phi2``.
    """
    x0, x1 = _check_interval(pair, node_interval)
    s = reduced_action(np.array([x0, x1]), pair, ms, x_ref=0.5 * (x0 + x1))
    return float(abs(s[1] - s[0]) / (x1 - x0))


@dataclass(frozen=True)
class WavelengthReport:
    delta_x: float
    p: float
    wavelength: float
    mean_velocity: Optional[float] = None


def de_broglie_report(pair: BasisPair, ms: Microstate, node_interval,
                      delta_t: Optional[float] = None) -> WavelengthReport:
    """``lambda = h/p`` from the mean momentum; ``delta_x = lambda/2``.

    If the time ``delta_t`` between the two nodes is given the mean velocity
    ``delta_x/delta_t`` is reported as well.
    """
    x0, x1 = sorted(float(v) for v in node_interval)
    p = mean_conjugate_momentum(pair, ms, (x0, x1))
    h = PLANCK_H * pair.scenario.hbar_scale
    lam = h / p
    vel = (x1 - x0) / delta_t if delta_t else None
    return WavelengthReport(lam / 2, p, lam, vel)


@dataclass(frozen=True)
class PhysicalState:
    """Real coefficients of ``psi = alpha phi1 + beta phi2``."""

    alpha_coef: float
    beta_coef: float

    def __post_init__(self):
        if self.alpha_coef == 0 and self.beta_coef == 0:
            raise ValueError("psi must not vanish identically")
        if isinstance(self.alpha_coef, complex) or isinstance(self.beta_coef, complex):
            raise TypeError("only real coefficients are supported")


def ermakov_invariant(x, pair: BasisPair, ms: Microstate, state: PhysicalState):
    """Numerical Ermakov invariant::

        I = [P psi^2 + hbar^2 (P^(-3/2) P' psi / 2 + P^(-1/2) psi')^2] / sqrt(2m)

    Raises
    ------
    ValueError
        Where ``P <= 0``; the half-integer powers need the positive branch.
    """
    sc = pair.scenario
    p, p1, _ = momentum_derivatives(x, pair, ms)
    if np.any(np.asarray(p) <= 0):
        raise ValueError("dS0/dx must be positive; use the branch with P > 0")
    f1, f2, d1, d2 = pair.values(x)
    psi = state.alpha_coef * f1 + state.beta_coef * f2
    dpsi = state.alpha_coef * d1 + state.beta_coef * d2
    inner = 0.5 * p ** -1.5 * p1 * psi + p ** -0.5 * dpsi
    return (p * psi**2 + sc.hbar**2 * inner**2) / math.sqrt(2 * sc.mass)


def ermakov_closed_form(pair: BasisPair, ms: Microstate, state: PhysicalState):
    """``hbar W [alpha^2 + (a beta - b alpha)^2] / (a sqrt(2m))``."""
    sc = pair.scenario
    al, be = state.alpha_coef, state.beta_coef
    return (sc.hbar * pair.W_x * (al**2 + (ms.a * be - ms.b * al) ** 2)
            / (ms.a * math.sqrt(2 * sc.mass)))


@dataclass(frozen=True)
class LimitRow:
    scale: float
    deviation: float  # max |x_quantum - x_classical| over the window (A)
    nodes: int


def classical_limit_study(scenario: Scenario, ms: Microstate, scales: Sequence[float],
                          x0=0.0, window=None, samples=4001,
                          opts: Optional[IntegrationOptions] = None) -> List[LimitRow]:
    """Largest distance between quantum and classical positions for each
    ``hbar -> s hbar``.

    Both trajectories start at ``x0`` at ``t = 0`` moving in the direction of
    the quantum branch. ``window`` is the time span (fs); by default ten
    node spacings ``pi hbar/(2|E - V(x0)|)`` at ``s = 1``.
    """
    kin0 = scenario.energy - scenario.V(x0)
    if window is None:
        window = 10 * math.pi * scenario.hbar / (2 * abs(kin0))
    rows = []
    for s in scales:
        if not 0 < s <= 1:
            raise ValueError("scales must lie in (0, 1]")
        sc = scenario.with_hbar_scale(scenario.hbar_scale * s)
        pair = build_basis(sc)
        traj = integrate_trajectory(sc, pair, ms, x0, 0.0, window, opts)
        v0 = traj.v[0]
        cl = classical_path(sc, traj.x_start, 1 if v0 >= 0 else -1)
        tt = np.linspace(0.0, traj.t_end, samples)
        dev = float(np.max(np.abs(traj(tt) - cl.position(tt))))
        rows.append(LimitRow(float(s), dev, len(traj.events_of("node"))))
    return rows
