"""Built-in scenarios for figures 1 to 6.

Harmonic ``a`` values quoted in 1/m are converted to 1/A. For the first
excited state ``a`` carries a length (``phi1`` is dimensionless, ``phi2`` a
length), so the presets use multiples of the value ``a_c = x_M1/3`` that
matches the classical speed at ``x = 0``, keeping the quoted ratios and
``b`` values.
"""

from dataclasses import dataclass, field
import math
from typing import List, Optional

import numpy as np

from ..basis import Constant, HarmonicExcited1, HarmonicGround, Linear, Scenario, build_basis
from ..constants import force_si_to_internal, inverse_length_si_to_internal
from ..dynamics import (IntegrationOptions, Microstate, allowed_flow_microstate, classical_path,
                        integrate_trajectory)
from .svg import Chart, Series

G_FIG = force_si_to_internal(1e-9)  # 1e-9 N in eV/A
SQRT3 = math.sqrt(3.0)


@dataclass
class Curve:
    label: str
    microstate: Microstate  # flow constants, branch already set
    x0: float
    t0: float = 0.0


@dataclass
class FigurePreset:
    number: int
    title: str
    scenario: Scenario
    curves: List[Curve]
    t_end: float
    classical_x0: Optional[float] = None
    markers: bool = True
    options: IntegrationOptions = field(default_factory=IntegrationOptions)


def _fig1():
    sc = Scenario(Constant(0.0), 10.0)
    p = math.sqrt(2 * sc.mass * sc.energy)
    curves = []
    for a, b in [(1.0, 0.0), (10.0, 0.0), (3.0, 2.0), (0.5, 1.5)]:
        # closed-form labels; x0 constant = 0
        x0 = sc.hbar / p * math.atan(b)
        curves.append(Curve(f"a={a:g}, b={b:g}", allowed_flow_microstate(Microstate(a, b)), x0))
    dt = math.pi * sc.hbar / (2 * sc.energy)
    return FigurePreset(1, "Free electron, E = 10 eV", sc, curves, 5.0 * dt, classical_x0=0.0)


def _fig2():
    sc = Scenario(Linear(G_FIG), 10.0)
    x0 = 3.25405
    curves = [Curve("a=10, b=sqrt(3)", Microstate(10.0, SQRT3), x0),
              Curve("a=7, b=-1", Microstate(7.0, -1.0), x0),
              Curve("a=5, b=sqrt(3)", Microstate(5.0, SQRT3), x0)]
    return FigurePreset(2, "Linear potential, E = 10 eV, allowed region", sc, curves, 4.4,
                        classical_x0=x0)


def _fig3():
    sc = Scenario(Linear(G_FIG), 10.0)
    # entering the forbidden side moving toward +x: negative branch
    curves = [Curve("a=10, b=1/sqrt(3)", Microstate(10.0, 1 / SQRT3, branch=-1),
                    16.02190, 1.447546)]
    return FigurePreset(3, "Linear potential, E = 10 eV, forbidden region", sc, curves, 3.0,
                        markers=False)


def _fig4():
    sc = Scenario(HarmonicGround(), 10.0)
    x_m = sc.turning_points()[1]
    curves = []
    for a_si, b, lab in [(8e9, 1.0, "a=8e9/m, b=1"), (6e10, 2.0, "a=6e10/m, b=2"),
                         (9e9, 0.2, "a=9e9/m, b=0.2")]:
        curves.append(Curve(lab, Microstate(inverse_length_si_to_internal(a_si), b), -x_m))
    return FigurePreset(4, "Harmonic oscillator ground state, E0 = 10 eV", sc, curves, 2.0,
                        classical_x0=-x_m)


def _fig5():
    sc = Scenario(HarmonicExcited1(), 30.0)
    x_m = sc.turning_points()[1]
    a_c = x_m / 3.0
    curves = [Curve(f"a={k:g} a_c, b={b:g}", Microstate(k * a_c, b), -x_m)
              for k, b in [(0.8, 0.5), (10.0, 0.4), (1.0, 0.0)]]
    return FigurePreset(5, "Harmonic oscillator first excited state, E1 = 30 eV", sc, curves,
                        2.0, classical_x0=-x_m)


def _fig6():
    sc = Scenario(HarmonicGround(), 10.0)
    a = inverse_length_si_to_internal(8e10)
    # outward motion in the forbidden region: branch -1 toward +x, +1 toward -x
    curves = [Curve("a=8e10/m, b=1", Microstate(a, 1.0, branch=-1), 0.61726),
              Curve("a=8e10/m, b=-1", Microstate(a, -1.0, branch=1), -0.61726)]
    return FigurePreset(6, "Harmonic oscillator ground state, forbidden region", sc, curves,
                        0.1, markers=False)


PRESETS = {1: _fig1, 2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6}


def get_preset(number) -> FigurePreset:
    try:
        return PRESETS[int(number)]()
    except (KeyError, ValueError):
        raise ValueError(f"unknown figure id {number!r}; choose 1-6") from None


@dataclass
class FigureData:
    preset: FigurePreset
    trajectories: list
    chart: Chart


def build_figure(number, samples=1500) -> FigureData:
    """Integrate every curve of a preset and assemble the chart."""
    pre = get_preset(number)
    sc = pre.scenario
    pair = build_basis(sc)
    chart = Chart(f"Fig. {pre.number}: {pre.title}", "t (fs)", "x (angstrom)")
    trajs = []
    markers = []
    for c in pre.curves:
        tr = integrate_trajectory(sc, pair, c.microstate, c.x0, c.t0, pre.t_end, pre.options)
        trajs.append(tr)
        tt, xx = tr.sample(samples)
        chart.series.append(Series(c.label, tt, xx))
        if pre.markers:
            markers += [(e.t, e.x) for e in tr.events if e.kind in ("node", "branch_flip")]
    if pre.classical_x0 is not None:
        cp = classical_path(sc, pre.classical_x0, 1)
        tt = np.linspace(0.0, pre.t_end, samples)
        if sc.turning_points() and len(sc.turning_points()) == 1:
            # parabola: stop where it leaves the plotted range
            tt = tt[cp.position(tt) >= min(c.x0 for c in pre.curves) - 20.0]
        chart.series.append(Series("Classical trajectory", tt, cp.position(tt),
                                   color="black", dashed=True))
    chart.markers = _dedupe(markers)
    return FigureData(pre, trajs, chart)


def _dedupe(points, tol=1e-9):
    out = []
    for p in sorted(points):
        if not out or abs(p[0] - out[-1][0]) > tol * max(1.0, abs(p[0])) or abs(p[1] - out[-1][1]) > 1e-6:
            out.append(p)
    return out
