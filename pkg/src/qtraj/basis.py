"""Scenarios and pairs of real Schrodinger solutions.

A :class:`Scenario` fixes the physical problem (potential, energy, mass and a
multiplier on hbar). :func:`build_basis` returns the :class:`BasisPair`
``(phi1, phi2)`` used for that problem; :func:`transform_basis` produces any
other real pair ``theta = T phi`` and :func:`map_microstate` /
:func:`invert_microstate_map` translate the non-classical constants between
the two so that the resulting motion is unchanged.
"""

from dataclasses import dataclass, field
import math
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from .constants import ELECTRON_MASS, HBAR


@dataclass(frozen=True)
class Constant:
    v0: float = 0.0


@dataclass(frozen=True)
class Linear:
    g: float  # eV / A

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("linear potential slope g must be positive")


@dataclass(frozen=True)
class HarmonicGround:
    omega: Optional[float] = None  # 1/fs; derived from the energy when omitted


@dataclass(frozen=True)
class HarmonicExcited1:
    omega: Optional[float] = None


Potential = Union[Constant, Linear, HarmonicGround, HarmonicExcited1]


@dataclass(frozen=True)
class Scenario:
    """Potential, energy (eV), mass (eV fs^2/A^2) and hbar multiplier.

    For the harmonic states the frequency is tied to the energy
    (``E = hbar w / 2`` or ``3 hbar w / 2``); pass ``omega=None`` to derive it,
    an inconsistent value is rejected.
    """

    potential: Potential
    energy: float
    mass: float = ELECTRON_MASS
    hbar_scale: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.hbar_scale > 0:
            raise ValueError("hbar_scale must be positive")
        pot = self.potential
        if isinstance(pot, (HarmonicGround, HarmonicExcited1)):
            quanta = 0.5 if isinstance(pot, HarmonicGround) else 1.5
            if not self.energy > 0:
                raise ValueError("harmonic eigenstate energy must be positive")
            omega = self.energy / (quanta * self.hbar)
            if pot.omega is None:
                object.__setattr__(self, "potential", type(pot)(omega))
            elif not math.isclose(pot.omega, omega, rel_tol=1e-9):
                raise ValueError(
                    f"omega={pot.omega} inconsistent with E={self.energy} eV "
                    f"(expected {omega})"
                )
        elif not isinstance(pot, (Constant, Linear)):
            raise TypeError(f"unknown potential {pot!r}")

    @property
    def hbar(self):
        return HBAR * self.hbar_scale

    @property
    def omega(self):
        return getattr(self.potential, "omega", None)

    def V(self, x):
        pot = self.potential
        x = np.asarray(x, dtype=float)
        if isinstance(pot, Constant):
            res = np.full_like(x, pot.v0)
        elif isinstance(pot, Linear):
            res = pot.g * x
        else:
            res = 0.5 * self.mass * pot.omega**2 * x * x
        return float(res) if res.ndim == 0 else res

    def turning_points(self):
        """Classical turning points (empty for a constant potential)."""
        pot = self.potential
        if isinstance(pot, Linear):
            return (self.energy / pot.g,)
        if isinstance(pot, Constant):
            return ()
        amp = math.sqrt(2.0 * self.energy / (self.mass * pot.omega**2))
        return (-amp, amp)

    def with_hbar_scale(self, s):
        pot = self.potential
        if isinstance(pot, (HarmonicGround, HarmonicExcited1)):
            pot = type(pot)(None)
        return Scenario(pot, self.energy, self.mass, s)


@dataclass(frozen=True)
class TransformParams:
    """``theta1 = mu phi1 + nu phi2``, ``theta2 = alpha phi1 + beta phi2``."""

    mu: float = 1.0
    nu: float = 0.0
    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if self.det == 0.0:
            raise ValueError("singular transform: mu*beta - nu*alpha == 0")

    @property
    def det(self):
        return self.mu * self.beta - self.nu * self.alpha

    def inverse(self):
        d = self.det
        return TransformParams(self.beta / d, -self.nu / d, -self.alpha / d, self.mu / d)

    def compose(self, other):
        """Transform equal to applying ``other`` first, then ``self``."""
        m = np.array([[self.mu, self.nu], [self.alpha, self.beta]]) @ np.array(
            [[other.mu, other.nu], [other.alpha, other.beta]]
        )
        return TransformParams(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


IDENTITY = TransformParams()


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Two real independent solutions and their Wronskian.

    The member functions take positions in angstrom and return the solution
    values and their x-derivatives. ``W`` is reported in the variable named by
    ``convention_note``: the linear-potential pair lives in the dimensionless
    Airy variable ``y`` and ``W`` is then ``dphi1/dy phi2 - phi1 dphi2/dy``;
    ``W_x`` is always the position-variable Wronskian used by the dynamics.
    """

    scenario: Scenario
    kind: int
    params: np.ndarray = field(repr=False)
    W: float
    convention_note: str
    transform: TransformParams = IDENTITY

    @property
    def W_x(self):
        return float(self.params[K.P_WX])

    @property
    def dy_dx(self):
        """Chain-rule factor from the convention variable to x."""
        return self.W_x / self.W

    def values(self, x):
        """``(phi1, phi2, phi1', phi2')`` at ``x``."""
        arr = np.asarray(x, dtype=float)
        out = K.basis_array(self.kind, self.params, np.ascontiguousarray(arr.ravel()))
        if arr.ndim == 0:
            return tuple(float(v[0]) for v in out)
        return tuple(v.reshape(arr.shape) for v in out)

    def phi1(self, x):
        return self.values(x)[0]

    def phi2(self, x):
        return self.values(x)[1]

    def dphi1(self, x):
        return self.values(x)[2]

    def dphi2(self, x):
        return self.values(x)[3]

    def wronskian(self, x):
        """Pointwise ``phi1' phi2 - phi1 phi2'`` in the position variable."""
        p1, p2, d1, d2 = self.values(x)
        return d1 * p2 - p1 * d2

    def local_wavenumber(self, x):
        """sqrt(2m|E - V|)/hbar, used to size sampling grids."""
        sc = self.scenario
        return np.sqrt(2.0 * sc.mass * np.abs(sc.energy - sc.V(x))) / sc.hbar


def _params(scenario, wave, shift, wx, transform):
    prm = np.zeros(K.N_PARAMS)
    prm[K.P_E] = scenario.energy
    prm[K.P_M] = scenario.mass
    prm[K.P_HBAR] = scenario.hbar
    pot = scenario.potential
    if isinstance(pot, Constant):
        prm[K.P_POT] = pot.v0
    elif isinstance(pot, Linear):
        prm[K.P_POT] = pot.g
    else:
        prm[K.P_POT] = pot.omega
    prm[K.P_WAVE] = wave
    prm[K.P_SHIFT] = shift
    prm[K.P_MU] = transform.mu
    prm[K.P_NU] = transform.nu
    prm[K.P_ALPHA] = transform.alpha
    prm[K.P_BETA] = transform.beta
    prm[K.P_WX] = wx * transform.det
    prm.setflags(write=False)
    return prm


def build_basis(scenario: Scenario) -> BasisPair:
    """Return the standard pair for ``scenario``.

    * constant, E > V0: ``(sin kx, cos kx)``, ``W = k``
    * constant, E < V0: ``(exp(rho x), exp(-rho x))``, ``W = 2 rho``
    * linear: ``(Ai + Bi/sqrt3, sqrt3 Ai - Bi)`` in ``y``, ``W_y = 2/pi``
    * harmonic ground: ``(exp(-a x^2) G(x), exp(-a x^2))``, ``W = 1``
    * harmonic first excited: ``(4 a x exp(-a x^2) G(x) - exp(a x^2),
      x exp(-a x^2))``, ``W = 1``

    with ``G(x) = int_0^x exp(2 a q^2) dq`` and ``a = m w / 2 hbar``.
    """
    sc = scenario
    pot = sc.potential
    hbar = sc.hbar
    if isinstance(pot, Constant):
        eps = sc.energy - pot.v0
        if eps == 0.0:
            raise ValueError("E == V0: degenerate constant-potential case")
        wave = math.sqrt(2.0 * sc.mass * abs(eps)) / hbar
        if eps > 0:
            return BasisPair(sc, K.CONST_ALLOWED, _params(sc, wave, 0.0, wave, IDENTITY),
                             wave, "x; W = k")
        return BasisPair(sc, K.CONST_FORBIDDEN, _params(sc, wave, 0.0, 2 * wave, IDENTITY),
                         2 * wave, "x; W = 2 rho")
    if isinstance(pot, Linear):
        kappa = (2.0 * sc.mass * pot.g / hbar**2) ** (1.0 / 3.0)
        w_y = 2.0 / math.pi
        return BasisPair(
            sc, K.LINEAR, _params(sc, kappa, sc.energy / pot.g, kappa * w_y, IDENTITY),
            w_y, "y = (2m/(hbar^2 g^2))^(1/3) (g x - E); W_y = 2/pi, W_x = kappa W_y",
        )
    alpha = sc.mass * pot.omega / (2.0 * hbar)
    kind = K.HARMONIC_GROUND if isinstance(pot, HarmonicGround) else K.HARMONIC_EXCITED1
    return BasisPair(sc, kind, _params(sc, alpha, 0.0, 1.0, IDENTITY), 1.0, "x; W = 1")


def transform_basis(pair: BasisPair, p: TransformParams) -> BasisPair:
    """``theta1 = mu phi1 + nu phi2``, ``theta2 = alpha phi1 + beta phi2``.

    Transforms compose, so transforming an already transformed pair is
    allowed. The Wronskian scales by ``mu beta - nu alpha``.
    """
    total = p.compose(pair.transform)
    prm = np.array(pair.params)
    prm[K.P_MU] = total.mu
    prm[K.P_NU] = total.nu
    prm[K.P_ALPHA] = total.alpha
    prm[K.P_BETA] = total.beta
    prm[K.P_WX] = pair.params[K.P_WX] * p.det
    prm.setflags(write=False)
    return BasisPair(pair.scenario, pair.kind, prm, pair.W * p.det,
                     pair.convention_note, total)


def schrodinger_residual(pair: BasisPair, scenario: Scenario, x):
    """Scaled residual of ``-hbar^2/2m phi'' + (V - E) phi`` for both members.

    ``phi''`` comes from a five-point central difference of the analytic
    first derivative, so the check is independent of the Schrodinger equation
    itself. Returns ``(r1, r2)`` normalised by ``|E| (|phi| + 1)``.
    """
    sc = scenario
    x = np.asarray(x, dtype=float)
    kloc = np.sqrt(2.0 * sc.mass * (np.abs(sc.energy - sc.V(x)) + abs(sc.energy))) / sc.hbar
    h = 2e-3 / kloc
    d = [pair.values(x + j * h)[2:] for j in (-2, -1, 1, 2)]
    p1, p2, _, _ = pair.values(x)
    out = []
    for i, phi in enumerate((p1, p2)):
        dd = (d[0][i] - 8.0 * d[1][i] + 8.0 * d[2][i] - d[3][i]) / (12.0 * h)
        res = -sc.hbar**2 / (2.0 * sc.mass) * dd + (sc.V(x) - sc.energy) * phi
        out.append(np.abs(res) / (abs(sc.energy) * (np.abs(phi) + 1.0)))
    if x.ndim == 0:
        return float(out[0]), float(out[1])
    return out[0], out[1]


def map_microstate(p: TransformParams, a_tilde, b_tilde):
    """Constants ``(a, b)`` of the original pair reproducing the motion of
    ``(a_tilde, b_tilde)`` in the pair transformed by ``p``.

    The result is returned as given by the mapping; it may have ``a W < 0``,
    in which case :meth:`qtraj.dynamics.Microstate.normalized` flips
    ``(a, b, branch)`` together.
    """
    if a_tilde == 0:
        raise ValueError("a_tilde must be non-zero")
    mu, nu, al, be = p.mu, p.nu, p.alpha, p.beta
    den = p.det * a_tilde
    a = (mu * mu * a_tilde**2 + 2 * mu * al * a_tilde * b_tilde + al * al * (1 + b_tilde**2)) / den
    b = (mu * nu * a_tilde**2 + (mu * be + nu * al) * a_tilde * b_tilde
         + al * be * (1 + b_tilde**2)) / den
    return a, b


def consistency_residual(p: TransformParams, a, b, a_tilde, b_tilde):
    """Left minus right side of the third matching condition
    ``(1 + b^2)/a = (nu^2 at^2 + 2 beta nu at bt + beta^2 (1 + bt^2)) / (det at)``."""
    lhs = (1 + b * b) / a
    rhs = (p.nu**2 * a_tilde**2 + 2 * p.beta * p.nu * a_tilde * b_tilde
           + p.beta**2 * (1 + b_tilde**2)) / (p.det * a_tilde)
    return lhs - rhs


def _map_residual(p, a, b, at, bt):
    ma, mb = map_microstate(p, at, bt)
    return np.array([ma - a, mb - b])


def invert_microstate_map(p: TransformParams, a, b, tol=1e-9):
    """Solve ``map_microstate(p, at, bt) == (a, b)`` for ``(at, bt)``.

    The starting point is the forward map of the inverse transform; Newton
    iterations on the 2x2 system then polish it.

    Raises
    ------
    ArithmeticError
        If the residual cannot be brought below ``tol`` (relative).
    """
    if a == 0:
        raise ValueError("a must be non-zero")
    at, bt = map_microstate(p.inverse(), a, b)
    scale = max(1.0, abs(a), abs(b))
    for _ in range(20):
        r = _map_residual(p, a, b, at, bt)
        if np.max(np.abs(r)) <= 1e-15 * scale:
            break
        eps_a = 1e-7 * max(abs(at), 1e-12)
        eps_b = 1e-7 * max(abs(bt), 1.0)
        jac = np.column_stack([
            (_map_residual(p, a, b, at + eps_a, bt) - _map_residual(p, a, b, at - eps_a, bt)) / (2 * eps_a),
            (_map_residual(p, a, b, at, bt + eps_b) - _map_residual(p, a, b, at, bt - eps_b)) / (2 * eps_b),
        ])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        at_new, bt_new = at + step[0], bt + step[1]
        if np.max(np.abs(_map_residual(p, a, b, at_new, bt_new))) >= np.max(np.abs(r)):
            break
        at, bt = at_new, bt_new
    res = np.max(np.abs(_map_residual(p, a, b, at, bt)))
    if not np.isfinite(res) or res > tol * scale:
        raise ArithmeticError(f"no solution for the microstate map (residual {res:.3e})")
    return float(at), float(bt)


def phi2_zeros(pair: BasisPair, lo, hi, points_per_wave=24, min_points=400):
    """Zeros of ``phi2`` in ``[lo, hi]``, bracketed on a grid and bisected.

    The grid is refined to the largest local wavenumber in the interval so no
    adjacent pair of zeros shares a cell.
    """
    if hi < lo:
        lo, hi = hi, lo
    probe = np.linspace(lo, hi, min_points)
    kmax = float(np.max(pair.local_wavenumber(probe)))
    n = max(min_points, int(math.ceil((hi - lo) * kmax * points_per_wave / math.pi)) + 1)
    xs = np.linspace(lo, hi, n)
    f = pair.phi2(xs)
    zeros = [float(x) for x in xs[f == 0.0]]
    idx = np.nonzero(f[:-1] * f[1:] < 0.0)[0]
    for i in idx:
        a, b = xs[i], xs[i + 1]
        fa = f[i]
        for _ in range(200):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            fm = pair.phi2(m)
            if fm == 0.0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        zeros.append(0.5 * (a + b))
    return sorted(zeros)
