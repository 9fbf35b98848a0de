"""Traversal times for a rectangular barrier ``V = V0`` on ``[0, q]``.

Inside the barrier ``eps = E - V0 < 0`` and ``rho = sqrt(-2 m eps)/hbar``.
Two time functions are provided:

``dwell_time``
    time from ``x = 0`` to ``x`` along the forbidden-region motion with the
    plus sign, ``-hbar/(2 eps) [arctan(a e^{2 rho x} + b) - arctan(a + b)]``.
``floyd_dwell_time``
    the time obtained from ``t - t0 = dS0/dE`` with the pair
    ``(e^{-rho x}, e^{rho x})``.

:func:`monotonicity_report` locates interior extrema of either one.
"""

from dataclasses import dataclass
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .constants import ELECTRON_MASS, HBAR


@dataclass(frozen=True)
class BarrierSpec:
    """Barrier height ``V0``, thickness ``q`` (A), energy ``E`` and microstate."""

    V0: float
    q: float
    E: float
    a: float = 1.0
    b: float = 0.0
    mass: float = ELECTRON_MASS
    hbar: float = HBAR

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("barrier thickness q must be positive")
        if not 0 < self.E < self.V0:
            raise ValueError("need 0 < E < V0 for tunnelling")
        if not self.a > 0:
            raise ValueError("a must be positive")

    @property
    def eps(self):
        return self.E - self.V0

    @property
    def rho(self):
        return math.sqrt(-2.0 * self.mass * self.eps) / self.hbar


def _check_x(spec, x, upper=True):
    x = np.asarray(x, dtype=float)
    hi = spec.q * (1 + 1e-12) if upper else np.inf
    if np.any(x < 0) or np.any(x > hi):
        raise ValueError(f"x must lie in [0, {spec.q}]" if upper else "x must be >= 0")
    return x


def _out(res):
    return float(res) if np.ndim(res) == 0 else res


def dwell_time(spec: BarrierSpec, x):
    """Time to reach ``x`` in ``[0, q]`` from the barrier entrance (fs)."""
    x = _check_x(spec, x)
    s = spec
    # arctan(u) - arctan(w) = arctan((u - w)/(1 + u w)) loses nothing for
    # small x, where u - w = a (e^{2 rho x} - 1) is computed with expm1
    u = s.a * np.exp(2 * s.rho * x) + s.b
    w = s.a + s.b
    diff = s.a * np.expm1(2 * s.rho * x)
    ang = np.arctan2(diff, 1 + u * w)
    return _out(-s.hbar / (2 * s.eps) * ang)


def dwell_time_derivative(spec: BarrierSpec, x):
    """``dT/dx = -hbar a rho e^{2 rho x} / (eps (1 + (a e^{2 rho x} + b)^2))``."""
    x = _check_x(spec, x)
    s = spec
    e = np.exp(2 * s.rho * x)
    return _out(-s.hbar * s.a * s.rho * e / (s.eps * (1 + (s.a * e + s.b) ** 2)))


def dwell_time_from_trajectory(spec: BarrierSpec, x):
    """Same quantity obtained by inverting the closed-form forbidden motion.

    ``e^{2 rho x} = (tan(theta) - b)/a`` with ``theta = -2 eps (t - t0)/hbar``
    gives ``t(x)`` on the branch through ``x = 0``.
    """
    x = _check_x(spec, x)
    s = spec
    theta = np.arctan(s.a * np.exp(2 * s.rho * x) + s.b)
    theta0 = math.atan(s.a + s.b)
    return _out(-s.hbar / (2 * s.eps) * (theta - theta0))


def thin_limit(spec: BarrierSpec):
    """``T(q) ~ a/(1 + (a + b)^2) sqrt(-2m/eps) q`` for ``rho q << 1``."""
    s = spec
    return s.a / (1 + (s.a + s.b) ** 2) * math.sqrt(-2 * s.mass / s.eps) * s.q


def thick_limit(spec: BarrierSpec):
    """``T(q) -> -hbar/(2 eps) (pi/2 - arctan(a + b))`` for ``rho q >> 1``."""
    s = spec
    return -s.hbar / (2 * s.eps) * (math.pi / 2 - math.atan(s.a + s.b))


def floyd_dwell_time(spec: BarrierSpec, x):
    """``(2 m a/(hbar rho)) x e^{-2 rho x} / (1 + (a e^{-2 rho x} + b)^2)``."""
    x = _check_x(spec, x, upper=False)
    s = spec
    e = np.exp(-2 * s.rho * x)
    return _out(2 * s.mass * s.a / (s.hbar * s.rho) * x * e / (1 + (s.a * e + s.b) ** 2))


def floyd_dwell_time_derivative(spec: BarrierSpec, x):
    x = _check_x(spec, x, upper=False)
    s = spec
    rho = s.rho
    e = np.exp(-2 * rho * x)
    g = s.a * e + s.b
    den = 1 + g * g
    c = 2 * s.mass * s.a / (s.hbar * rho)
    return _out(c * e * ((1 - 2 * rho * x) * den + 4 * rho * x * s.a * e * g) / den**2)


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: bool
    extremum_x: Optional[float] = None
    extrema: tuple = ()
    direction: int = 0  # +1 increasing, -1 decreasing, 0 flat (on the first piece)


def monotonicity_report(time_function: Callable, domain: Sequence[float],
                        derivative: Optional[Callable] = None, n=4001, rtol=1e-12):
    """Check whether ``time_function`` is monotone on ``domain = (lo, hi)``.

    Sign changes of the derivative are bracketed on an ``n``-point grid and
    refined by bisection to ``rtol`` relative. Without ``derivative`` a
    central difference is used.

    Returns
    -------
    MonotonicityReport
        ``extremum_x`` is the first interior extremum, ``None`` when the
        function is monotone.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ValueError("domain must satisfy lo < hi")
    if derivative is None:
        step = 1e-6 * (hi - lo)

        def derivative(x):
            # one-sided at the ends of the domain
            xl = np.maximum(np.asarray(x, dtype=float) - step, lo)
            xr = np.minimum(np.asarray(x, dtype=float) + step, hi)
            return (np.asarray(time_function(xr)) - np.asarray(time_function(xl))) / (xr - xl)

    xs = np.linspace(lo, hi, n)
    d = np.asarray(derivative(xs), dtype=float)
    scale = np.max(np.abs(d)) if d.size else 0.0
    tiny = 1e-13 * scale
    sgn = np.where(np.abs(d) <= tiny, 0, np.sign(d)).astype(int)
    nonzero = sgn[sgn != 0]
    if nonzero.size == 0:
        return MonotonicityReport(True, None, (), 0)
    extrema = []
    last_i, last_s = None, 0
    for i, si in enumerate(sgn):
        if si == 0:
            continue
        if last_s and si != last_s:
            a, b = xs[last_i], xs[i]
            da = derivative(a)
            while b - a > rtol * max(abs(a), abs(b), 1e-300):
                m = 0.5 * (a + b)
                if m <= a or m >= b:
                    break
                dm = derivative(m)
                if dm == 0.0:
                    a = b = m
                    break
                if (dm > 0) == (da > 0):
                    a, da = m, dm
                else:
                    b = m
            extrema.append(float(0.5 * (a + b)))
        last_i, last_s = i, si
    if not extrema:
        return MonotonicityReport(True, None, (), int(nonzero[0]))
    return MonotonicityReport(False, extrema[0], tuple(extrema), int(nonzero[0]))
