"""Airy and Dawson functions for real arguments.

Airy functions
    Values at a grid of nodes on ``[Y_MIN, Y_MAX]`` are built once at import:
    Ai and Bi at the origin come from their Maclaurin constants, Bi (and Ai
    for y < 0) are carried outward by high-order Taylor steps of
    ``f'' = y f``, and Ai for y > 0 is carried inward from ``Y_MAX`` where its
    asymptotic expansion is accurate to machine precision. Every sweep runs in
    the direction in which the carried solution is not recessive, so rounding
    errors do not grow. Evaluation re-expands about the nearest node.

Dawson function
    Maclaurin series for ``|u| < 1``, Rybicki's sampling-theorem sum for
    ``1 <= |u| <= 12`` and the asymptotic series beyond.
"""

import math

import numpy as np

from ._jit import njit

Y_MIN = -40.0
Y_MAX = 12.0
_NODE_STEP = 0.25
_N_NODES = int(round((Y_MAX - Y_MIN) / _NODE_STEP)) + 1
_TAYLOR_TERMS = 34

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
_BI0 = math.sqrt(3.0) * _AI0
_BIP0 = -math.sqrt(3.0) * _AIP0

# Dawson branch points and Rybicki sampling step
_DAW_SERIES_MAX = 1.0
_DAW_ASYMP_MIN = 12.0
_RYB_H = 0.2
_RYB_WINDOW = 6.5
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_EXP_BUDGET = 700.0


class SpecialFunctionDomainError(ValueError):
    """Argument outside the documented accuracy domain."""


def _taylor_step(y0, f, fp, h, nterms=48):
    """Advance a solution of ``f'' = y f`` from ``y0`` to ``y0 + h``."""
    cm1, c0, c1 = 0.0, f, fp
    val = c0 + c1 * h
    der = c1
    hk = h  # h**(k-1) for the derivative of the c_k term
    ck_2, ck_1 = c0, c1  # c_{k-2}, c_{k-1}
    ck_3 = cm1
    for k in range(2, nterms):
        ck = (y0 * ck_2 + ck_3) / (k * (k - 1))
        der += k * ck * hk
        hk *= h
        val += ck * hk
        ck_3, ck_2, ck_1 = ck_2, ck_1, ck
    return val, der


def _ai_asymptotic(y):
    """Ai and Ai' for large positive y (Poincare expansion in 1/zeta)."""
    zeta = 2.0 / 3.0 * y**1.5
    u = 1.0
    su, sv = 1.0, 1.0
    zk = 1.0
    for k in range(1, 200):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        zk *= -zeta
        tu, tv = u / zk, v / zk
        if abs(tu) < 1e-19 and abs(tv) < 1e-19:
            break
        su += tu
        sv += tv
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    return pref * y**-0.25 * su, -pref * y**0.25 * sv


def _build_airy_table():
    ys = Y_MIN + _NODE_STEP * np.arange(_N_NODES)
    table = np.empty((_N_NODES, 4))  # Ai, Ai', Bi, Bi'
    i0 = int(round(-Y_MIN / _NODE_STEP))
    table[i0] = (_AI0, _AIP0, _BI0, _BIP0)
    # outward toward negative y: both solutions oscillate
    ai, aip, bi, bip = _AI0, _AIP0, _BI0, _BIP0
    for i in range(i0, 0, -1):
        ai, aip = _taylor_step(ys[i], ai, aip, -_NODE_STEP)
        bi, bip = _taylor_step(ys[i], bi, bip, -_NODE_STEP)
        table[i - 1] = (ai, aip, bi, bip)
    # Bi grows toward positive y
    bi, bip = _BI0, _BIP0
    for i in range(i0, _N_NODES - 1):
        bi, bip = _taylor_step(ys[i], bi, bip, _NODE_STEP)
        table[i + 1, 2:] = (bi, bip)
    # Ai is recessive toward positive y: sweep it inward from Y_MAX
    ai, aip = _ai_asymptotic(ys[-1])
    table[-1, :2] = (ai, aip)
    for i in range(_N_NODES - 1, i0 + 1, -1):
        ai, aip = _taylor_step(ys[i], ai, aip, -_NODE_STEP)
        table[i - 1, :2] = (ai, aip)
    return table


_AIRY_TABLE = _build_airy_table()


@njit
def _airy_scalar(y):
    if not (Y_MIN <= y <= Y_MAX):
        raise ValueError("Airy argument outside the tabulated domain [-40, 12]")
    j = int(math.floor((y - Y_MIN) / _NODE_STEP + 0.5))
    if j > _N_NODES - 1:
        j = _N_NODES - 1
    y0 = Y_MIN + _NODE_STEP * j
    h = y - y0
    # both solutions share the coefficient recurrence
    a2, a1 = _AIRY_TABLE[j, 0], _AIRY_TABLE[j, 1]
    b2, b1 = _AIRY_TABLE[j, 2], _AIRY_TABLE[j, 3]
    a3 = 0.0
    b3 = 0.0
    ai = a2 + a1 * h
    bi = b2 + b1 * h
    aip = a1
    bip = b1
    hk = h
    for k in range(2, _TAYLOR_TERMS):
        ak = (y0 * a2 + a3) / (k * (k - 1))
        bk = (y0 * b2 + b3) / (k * (k - 1))
        aip += k * ak * hk
        bip += k * bk * hk
        hk *= h
        ai += ak * hk
        bi += bk * hk
        a3, a2, a1 = a2, a1, ak
        b3, b2, b1 = b2, b1, bk
    return ai, bi, aip, bip


@njit
def _airy_array(y):
    out = np.empty((4, y.size))
    for i in range(y.size):
        ai, bi, aip, bip = _airy_scalar(y[i])
        out[0, i] = ai
        out[1, i] = bi
        out[2, i] = aip
        out[3, i] = bip
    return out


@njit
def _dawson_pos(u):
    """F(u) and F'(u) for u >= 0."""
    if u < _DAW_SERIES_MAX:
        # F(u) = sum (-1)^k 2^k u^(2k+1) / (2k+1)!!
        u2 = u * u
        term = u
        s = u
        k = 0
        while abs(term) > 1e-18 * abs(s):
            k += 1
            term *= -2.0 * u2 / (2 * k + 1)
            s += term
        return s, 1.0 - 2.0 * u * s
    if u <= _DAW_ASYMP_MIN:
        # F(u) = lim 1/sqrt(pi) sum_{n odd} exp(-(u - n h)^2) / n
        n_lo = int(math.floor((u - _RYB_WINDOW) / _RYB_H))
        n_hi = int(math.ceil((u + _RYB_WINDOW) / _RYB_H))
        if n_lo % 2 == 0:
            n_lo += 1
        f = 0.0
        fp = 0.0
        for n in range(n_lo, n_hi + 1, 2):
            d = u - n * _RYB_H
            e = math.exp(-d * d) / n
            f += e
            fp -= 2.0 * d * e
        return _INV_SQRT_PI * f, _INV_SQRT_PI * fp
    # F(u) ~ 1/(2u) sum (2k-1)!!/(2u^2)^k ;  F'(u) = 1 - 2uF
    x = 0.5 / (u * u)
    term = 1.0
    s = 1.0
    k = 0
    while term > 1e-18 * s:
        k += 1
        term *= (2 * k - 1) * x
        s += term
    return s / (2.0 * u), -(s - 1.0)


@njit
def dawson_pair(u):
    """Dawson's F(u) and its derivative F'(u) = 1 - 2 u F(u)."""
    if u < 0.0:
        f, fp = _dawson_pos(-u)
        return -f, fp
    return _dawson_pos(u)


@njit
def _dawson_array(u):
    out = np.empty((2, u.size))
    for i in range(u.size):
        f, fp = dawson_pair(u[i])
        out[0, i] = f
        out[1, i] = fp
    return out


def _scalar_or_array(x, fn, rows):
    arr = np.asarray(x, dtype=float)
    res = fn(np.ascontiguousarray(arr.ravel()))
    if arr.ndim == 0:
        return tuple(float(res[i, 0]) for i in range(rows))
    return tuple(res[i].reshape(arr.shape) for i in range(rows))


def airy_pair(y):
    """Return ``(Ai, Bi, Ai', Bi')`` at real ``y`` (scalar or array).

    Accurate to about 1e-14 relative (absolute near zeros) on
    ``[Y_MIN, Y_MAX] = [-40, 12]``.

    Raises
    ------
    SpecialFunctionDomainError
        If any argument lies outside ``[Y_MIN, Y_MAX]`` or is not finite.
    """
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < Y_MIN) or np.any(arr > Y_MAX):
        raise SpecialFunctionDomainError(
            f"Airy argument outside the supported domain [{Y_MIN}, {Y_MAX}]"
        )
    return _scalar_or_array(arr, _airy_array, 4)


def airy_pair_scaled(y):
    """Exponent-scaled Airy values.

    Returns ``(Ai*e^z, Bi*e^-z, Ai'*e^z, Bi'*e^-z, z)`` with
    ``z = 2/3 y^1.5`` for ``y > 0`` and ``z = 0`` otherwise, so that ratios of
    the growing and decaying solutions can be formed without overflow.
    """
    ai, bi, aip, bip = airy_pair(y)
    yy = np.asarray(y, dtype=float)
    z = np.where(yy > 0.0, 2.0 / 3.0 * np.abs(yy) ** 1.5, 0.0)
    up, down = np.exp(z), np.exp(-z)
    if np.ndim(y) == 0:
        z = float(z)
        up, down = float(up), float(down)
    return ai * up, bi * down, aip * up, bip * down, z


def dawson(u):
    """Dawson's integral ``F(u) = exp(-u^2) * int_0^u exp(t^2) dt``.

    Odd in ``u``; relative accuracy about 1e-14 for all finite real input.
    """
    return _scalar_or_array(u, _dawson_array, 2)[0]


def dawson_derivative(u):
    """``F'(u) = 1 - 2 u F(u)``, evaluated without the cancellation at large u."""
    return _scalar_or_array(u, _dawson_array, 2)[1]


def growing_gaussian_integral_scaled(x, alpha):
    """``G(x) = int_0^x exp(2 alpha q^2) dq`` as ``(mantissa, exponent)``.

    ``G(x) = mantissa * exp(exponent)`` with ``exponent = 2 alpha x^2`` and
    ``mantissa = F(sqrt(2 alpha) x) / sqrt(2 alpha)``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    s = math.sqrt(2.0 * alpha)
    return dawson(s * np.asarray(x, dtype=float)) / s, 2.0 * alpha * np.square(x)


def growing_gaussian_integral(x, alpha):
    """``G(x) = int_0^x exp(2 alpha q^2) dq``, odd in ``x``.

    Raises
    ------
    OverflowError
        When ``2 alpha x^2`` exceeds the floating-point exponent budget.
    """
    mant, expo = growing_gaussian_integral_scaled(x, alpha)
    if np.any(expo > _EXP_BUDGET):
        raise OverflowError("exp(2 alpha x^2) exceeds the double-precision range")
    res = mant * np.exp(expo)
    return float(res) if np.ndim(res) == 0 else res
