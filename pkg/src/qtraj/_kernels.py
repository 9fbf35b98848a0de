"""Scalar kernels shared by the basis, dynamics and integrator code.

A basis is described by an integer ``kind`` and a float parameter vector
``prm`` (layout below) so the kernels stay nopython-compatible.
"""

import math

import numpy as np

from ._jit import njit
from .specfun import Y_MAX, Y_MIN, _airy_scalar, dawson_pair

CONST_ALLOWED = 0
CONST_FORBIDDEN = 1
LINEAR = 2
HARMONIC_GROUND = 3
HARMONIC_EXCITED1 = 4

# parameter vector layout
P_E = 0  # energy
P_M = 1  # mass
P_HBAR = 2  # (scaled) hbar
P_POT = 3  # V0, g or omega
P_WAVE = 4  # k, rho, kappa or alpha
P_SHIFT = 5  # classical turning point E/g (linear only)
P_MU = 6  # transform theta1 = mu phi1 + nu phi2
P_NU = 7
P_ALPHA = 8  # transform theta2 = alpha phi1 + beta phi2
P_BETA = 9
P_WX = 10  # Wronskian of (theta1, theta2) in the position variable
N_PARAMS = 11

_SQRT3 = math.sqrt(3.0)
# keeps squares of exponentially growing solutions finite
_EXP_ARG_MAX = 300.0


@njit
def potential(kind, prm, x):
    """V, dV/dx, d2V/dx2."""
    if kind == CONST_ALLOWED or kind == CONST_FORBIDDEN:
        return prm[P_POT], 0.0, 0.0
    if kind == LINEAR:
        g = prm[P_POT]
        return g * x, g, 0.0
    k = prm[P_M] * prm[P_POT] * prm[P_POT]
    return 0.5 * k * x * x, k * x, k


@njit
def raw_basis(kind, prm, x):
    """(phi1, phi2, phi1', phi2') of the untransformed pair."""
    w = prm[P_WAVE]
    if kind == CONST_ALLOWED:
        s = math.sin(w * x)
        c = math.cos(w * x)
        return s, c, w * c, -w * s
    if kind == CONST_FORBIDDEN:
        ep = math.exp(w * x)
        em = math.exp(-w * x)
        return ep, em, w * ep, -w * em
    if kind == LINEAR:
        y = w * (x - prm[P_SHIFT])
        ai, bi, aip, bip = _airy_scalar(y)
        return (
            ai + bi / _SQRT3,
            _SQRT3 * ai - bi,
            w * (aip + bip / _SQRT3),
            w * (_SQRT3 * aip - bip),
        )
    r = math.sqrt(2.0 * w)
    u = r * x
    f, fp = dawson_pair(u)
    grow = math.exp(0.5 * u * u)
    decay = math.exp(-w * x * x)
    if kind == HARMONIC_GROUND:
        # phi1 = exp(-a x^2) int_0^x exp(2 a q^2) dq = exp(u^2/2) F(u) / sqrt(2a)
        return grow * f / r, decay, grow * (1.0 - u * f), -2.0 * w * x * decay
    # first excited state, regularised second solution
    # phi1 = 4 a x exp(-a x^2) G(x) - exp(a x^2) = -exp(u^2/2) F'(u)
    return (
        -grow * fp,
        x * decay,
        r * grow * (u * fp + 2.0 * f),
        (1.0 - 2.0 * w * x * x) * decay,
    )


@njit
def basis(kind, prm, x):
    """(theta1, theta2, theta1', theta2') after the stored linear transform."""
    p1, p2, d1, d2 = raw_basis(kind, prm, x)
    mu, nu, al, be = prm[P_MU], prm[P_NU], prm[P_ALPHA], prm[P_BETA]
    return (
        mu * p1 + nu * p2,
        al * p1 + be * p2,
        mu * d1 + nu * d2,
        al * d1 + be * d2,
    )


@njit
def basis_array(kind, prm, x):
    out = np.empty((4, x.size))
    for i in range(x.size):
        t1, t2, d1, d2 = basis(kind, prm, x[i])
        out[0, i] = t1
        out[1, i] = t2
        out[2, i] = d1
        out[3, i] = d2
    return out


@njit
def denominator(kind, prm, a, b, x):
    """D = theta2^2 + (a theta1 + b theta2)^2 and its first two x-derivatives."""
    t1, t2, d1, d2 = basis(kind, prm, x)
    psi = a * t1 + b * t2
    dpsi = a * d1 + b * d2
    v, _, _ = potential(kind, prm, x)
    q = 2.0 * prm[P_M] * (v - prm[P_E]) / (prm[P_HBAR] * prm[P_HBAR])
    dd = t2 * t2 + psi * psi
    dd1 = 2.0 * (t2 * d2 + psi * dpsi)
    dd2 = 2.0 * (d2 * d2 + dpsi * dpsi) + 2.0 * q * dd
    return dd, dd1, dd2


@njit
def in_domain(kind, prm, x):
    """Whether the basis can be evaluated (and squared) at ``x``."""
    if not math.isfinite(x):
        return False
    w = prm[P_WAVE]
    if kind == CONST_ALLOWED:
        return True
    if kind == CONST_FORBIDDEN:
        return w * abs(x) <= _EXP_ARG_MAX
    if kind == LINEAR:
        y = w * (x - prm[P_SHIFT])
        return Y_MIN <= y <= Y_MAX
    return w * x * x <= _EXP_ARG_MAX


@njit
def _stage_velocity(kind, prm, a, b, sign, x):
    if not in_domain(kind, prm, x):
        return math.nan
    return velocity(kind, prm, a, b, sign, x)


@njit
def velocity(kind, prm, a, b, sign, x):
    t1, t2, _, _ = basis(kind, prm, x)
    psi = a * t1 + b * t2
    v, _, _ = potential(kind, prm, x)
    return sign * 2.0 * (prm[P_E] - v) * (t2 * t2 + psi * psi) / (
        prm[P_HBAR] * a * prm[P_WX]
    )


@njit
def velocity_derivs(kind, prm, a, b, sign, x):
    """f, f', f'' of the velocity field f(x) = dx/dt."""
    dd, dd1, dd2 = denominator(kind, prm, a, b, x)
    v, v1, v2 = potential(kind, prm, x)
    c = sign * 2.0 / (prm[P_HBAR] * a * prm[P_WX])
    kk = prm[P_E] - v
    return (
        c * kk * dd,
        c * (-v1 * dd + kk * dd1),
        c * (-v2 * dd - 2.0 * v1 * dd1 + kk * dd2),
    )


@njit
def momentum_derivs(kind, prm, a, b, sign, x):
    """P = dS0/dx and its first two x-derivatives."""
    dd, dd1, dd2 = denominator(kind, prm, a, b, x)
    p = sign * prm[P_HBAR] * a * prm[P_WX] / dd
    return p, -p * dd1 / dd, p * (2.0 * dd1 * dd1 / (dd * dd) - dd2 / dd)


@njit
def velocity_array(kind, prm, a, b, sign, x):
    out = np.empty(x.size)
    for i in range(x.size):
        out[i] = velocity(kind, prm, a, b, sign, x[i])
    return out


@njit
def velocity_derivs_array(kind, prm, a, b, sign, x):
    out = np.empty((3, x.size))
    for i in range(x.size):
        f0, f1, f2 = velocity_derivs(kind, prm, a, b, sign, x[i])
        out[0, i] = f0
        out[1, i] = f1
        out[2, i] = f2
    return out


@njit
def momentum_derivs_array(kind, prm, a, b, sign, x):
    out = np.empty((3, x.size))
    for i in range(x.size):
        p0, p1, p2 = momentum_derivs(kind, prm, a, b, sign, x[i])
        out[0, i] = p0
        out[1, i] = p1
        out[2, i] = p2
    return out


# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

# continuous extension: x(t + th h) = x + h * sum_j K_j * sum_r P[j, r] th^(r+1)
DENSE_P = np.array(
    [
        [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
         -12715105075.0 / 11282082432.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
         87487479700.0 / 32700410799.0],
        [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
         -10690763975.0 / 1880347072.0],
        [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
         701980252875.0 / 199316789632.0],
        [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
         -1453857185.0 / 822651844.0],
        [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
         69997945.0 / 29380423.0],
    ]
)

STOP_END = 0
STOP_NODE = 1
STOP_TURNING = 2
STOP_DIVERGED = 3
STOP_UNDERFLOW = 4
STOP_MAX_STEPS = 5
STOP_DOMAIN = 6


@njit
def dense_eval(x0, h, k, theta):
    acc = 0.0
    for j in range(7):
        c = 0.0
        th = theta
        for r in range(4):
            c += DENSE_P[j, r] * th
            th *= theta
        acc += k[j] * c
    return x0 + h * acc


@njit
def dopri_segment(kind, prm, a, b, sign, x0, t0, t_end, h0, rtol, atol,
                  eps_turn, v_max, max_steps, t_scale, skip_node):
    """Integrate dx/dt = f(x) until t_end or the first event.

    Returns ``(n, ts, xs, ks, code, h_next)`` where ``ts[:n+1]``/``xs[:n+1]``
    are accepted points, ``ks[i]`` the seven stage slopes of step ``i`` and
    ``code`` one of the ``STOP_*`` values. For event codes the event lies in
    the last accepted step.
    """
    cap = min(max_steps, 1024)
    ts = np.empty(cap + 1)
    xs = np.empty(cap + 1)
    ks = np.empty((cap, 7))
    ts[0] = t0
    xs[0] = x0
    energy = prm[P_E]
    band = eps_turn * abs(energy)
    v_pot, _, _ = potential(kind, prm, x0)
    kin_prev = energy - v_pot
    in_band_prev = abs(kin_prev) <= band
    _, phi2_prev, _, _ = basis(kind, prm, x0)
    if skip_node:
        # restarting on a node: its sign is rounding noise
        phi2_prev = 0.0
    k1 = velocity(kind, prm, a, b, sign, x0)
    t = t0
    x = x0
    h = h0
    n = 0
    hmin = 1e-14 * t_scale
    domain_hit = False
    while True:
        if t >= t_end:
            return n, ts, xs, ks, STOP_END, h
        if n >= max_steps:
            return n, ts, xs, ks, STOP_MAX_STEPS, h
        # the phase of a phi1/phi2 + b advances at 2|E - V|/hbar: keep it
        # below half a radian per step so no node can be stepped over
        h_phase = 0.5 * prm[P_HBAR] / max(abs(kin_prev), band, 1e-300)
        if h > h_phase:
            h = h_phase
        if h > t_end - t:
            h = t_end - t
        if h < hmin and t_end - t > hmin:
            if domain_hit:
                return n, ts, xs, ks, STOP_DOMAIN, h
            return n, ts, xs, ks, STOP_UNDERFLOW, h
        k2 = _stage_velocity(kind, prm, a, b, sign, x + h * _A21 * k1)
        k3 = _stage_velocity(kind, prm, a, b, sign, x + h * (_A31 * k1 + _A32 * k2))
        k4 = _stage_velocity(kind, prm, a, b, sign,
                      x + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = _stage_velocity(kind, prm, a, b, sign,
                      x + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = _stage_velocity(kind, prm, a, b, sign,
                      x + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4
                               + _A65 * k5))
        x_new = x + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _stage_velocity(kind, prm, a, b, sign, x_new)
        err_abs = abs(h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5
                           + _E6 * k6 + _E7 * k7))
        scale = atol + rtol * max(abs(x), abs(x_new))
        err = err_abs / scale
        if not (err <= 1.0) or not math.isfinite(k7):
            # rejected (NaN-safe)
            if not math.isfinite(k7) or not math.isfinite(x_new):
                domain_hit = True
            if math.isfinite(err) and err > 0.0:
                h *= max(0.2, 0.9 * err ** -0.2)
            else:
                h *= 0.1
            continue
        ks[n, 0] = k1
        ks[n, 1] = k2
        ks[n, 2] = k3
        ks[n, 3] = k4
        ks[n, 4] = k5
        ks[n, 5] = k6
        ks[n, 6] = k7
        n += 1
        if n >= cap:
            cap *= 2
            ts2 = np.empty(cap + 1)
            xs2 = np.empty(cap + 1)
            ks2 = np.empty((cap, 7))
            ts2[:n] = ts[:n]
            xs2[:n] = xs[:n]
            ks2[:n] = ks[:n]
            ts, xs, ks = ts2, xs2, ks2
        t = t + h
        x = x_new
        ts[n] = t
        xs[n] = x
        k1 = k7
        if err == 0.0:
            h *= 5.0
        else:
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2))
        v_pot, _, _ = potential(kind, prm, x)
        kin = energy - v_pot
        in_band = abs(kin) <= band
        crossed = kin * kin_prev < 0.0
        _, phi2, _, _ = basis(kind, prm, x)
        if phi2_prev != 0.0 and (phi2 == 0.0 or phi2 * phi2_prev < 0.0):
            return n, ts, xs, ks, STOP_NODE, h
        if (in_band and not in_band_prev) or crossed:
            return n, ts, xs, ks, STOP_TURNING, h
        if abs(k7) >= v_max:
            return n, ts, xs, ks, STOP_DIVERGED, h
        phi2_prev = phi2
        kin_prev = kin
        in_band_prev = in_band
