"""Special functions: Bessel J, Hankel H1, the mirror Airy function and
Gauss-Hermite functions.

Everything here is implemented from recurrences and series so that the
resonance engines do not depend on the special-function conventions of an
external library.  The array routines accept any shape and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np

from .errors import (
    ArgumentAtOrigin,
    EvenOrder,
    IndexOutOfRange,
    NonFiniteInput,
    OrderOutOfRange,
    RangeExceeded,
)

MAX_BESSEL_ORDER = 200
EULER_GAMMA = 0.57721566490153286060651209008240243
_SERIES_RADIUS_Y = 2.0


@dataclass(frozen=True)
class BesselPair:
    value: complex
    derivative: complex


@dataclass(frozen=True)
class AirySample:
    value: float
    derivative: float


@dataclass(frozen=True)
class GaussHermiteSample:
    order: int
    value: float
    derivative: float


# ---------------------------------------------------------------------------
# Bessel functions


def _check_order(order):
    if int(order) != order or order < 0 or order > MAX_BESSEL_ORDER:
        raise OrderOutOfRange(f"order must be an integer in [0, {MAX_BESSEL_ORDER}], got {order}")
    return int(order)


def _j_series(order, z):
    """Ascending series for J_order(z) and, when order >= 1, J_{order-1}(z)."""
    z = np.asarray(z, dtype=complex)
    q = -0.25 * z * z

    def one(n):
        # log form: n! overflows a float beyond n = 170
        term = np.exp(n * np.log(0.5 * z) - math.lgamma(n + 1))
        total = term.copy()
        for k in range(1, 200):
            term = term * q / (k * (n + k))
            total = total + term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                break
        return total

    jm = one(order)
    jm1 = one(order - 1) if order >= 1 else None
    return jm, jm1


def _miller(nmax, z):
    """Backward recurrence for J_0..J_nmax at nonzero z, normalised with the
    Jacobi-Anger sum e^{+-iz} = J_0 + 2 sum (+-i)^k J_k."""
    z = np.asarray(z, dtype=complex)
    zabs = float(np.max(np.abs(z)))
    start = int(max(nmax, zabs) + 20 + 10 * (zabs / 2) ** (1 / 3))
    start += start % 2
    # pick the exponential that is large on the relevant half plane to
    # avoid cancellation in the normalisation sum
    sgn = np.where(z.imag < 0, 1.0, -1.0)
    unit = 1j * sgn
    vals = np.zeros((nmax + 1,) + z.shape, dtype=complex)
    f_next = np.zeros(z.shape, dtype=complex)
    f = np.full(z.shape, 1e-30, dtype=complex)
    norm = np.zeros(z.shape, dtype=complex)
    upow = unit ** start
    for k in range(start, 0, -1):
        if k <= nmax:
            vals[k] = f
        norm = norm + 2.0 * upow * f
        f_prev = (2.0 * k / z) * f - f_next
        f_next, f = f, f_prev
        upow = upow / unit
        big = np.abs(f) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            f = f * scale
            f_next = f_next * scale
            norm = norm * scale
            vals = vals * scale
    vals[0] = f
    norm = norm + f
    target = np.exp(unit * z)
    return vals * (target / norm)


def _y01_series(z):
    z = np.asarray(z, dtype=complex)
    q = -0.25 * z * z
    lg = np.log(0.5 * z)
    j0 = np.ones_like(z)
    s0 = np.zeros_like(z)
    term = np.ones_like(z)
    harm = 0.0
    for k in range(1, 80):
        term = term * q / (k * k)
        harm += 1.0 / k
        j0 = j0 + term
        s0 = s0 - harm * term
        if np.all(np.abs(term) * (harm + 1) < 1e-18):
            break
    y0 = (2 / np.pi) * ((lg + EULER_GAMMA) * j0 + s0)
    # Y1 from DLMF 10.8.1 with n = 1
    term = np.ones_like(z)
    j1 = np.ones_like(z)
    s1 = (-EULER_GAMMA + (1.0 - EULER_GAMMA)) * np.ones_like(z)
    h1 = 0.0
    for k in range(1, 80):
        term = term * q / (k * (k + 1))
        h1 += 1.0 / k
        j1 = j1 + term
        psi_sum = (-EULER_GAMMA + h1) + (-EULER_GAMMA + h1 + 1.0 / (k + 1))
        s1 = s1 + psi_sum * term
        if np.all(np.abs(term) * (abs(psi_sum) + 1) < 1e-18):
            break
    j1 = 0.5 * z * j1
    y1 = -2 / (np.pi * z) + (2 / np.pi) * lg * j1 - (0.5 * z / np.pi) * s1
    return y0, y1


def _y01_neumann(z, jvals):
    """Y0 and Y1 from the Neumann series over even-order J (stable for large |z|)."""
    lg = np.log(0.5 * z) + EULER_GAMMA
    nmax = jvals.shape[0] - 1
    s = np.zeros(z.shape, dtype=complex)
    ds = np.zeros(z.shape, dtype=complex)
    for k in range(1, (nmax - 1) // 2 + 1):
        sign = -1.0 if k % 2 else 1.0
        s = s + sign * jvals[2 * k] / k
        ds = ds + sign * 0.5 * (jvals[2 * k - 1] - jvals[2 * k + 1]) / k
    y0 = (2 / np.pi) * lg * jvals[0] - (4 / np.pi) * s
    dy0 = (2 / np.pi) * (jvals[0] / z - lg * jvals[1]) - (4 / np.pi) * ds
    return y0, -dy0


def bessel_jy_array(order, z, want_y=True):
    """J_order, J'_order and optionally Y_order, Y'_order on an array of nonzero z.

    Returns a tuple (J, dJ, Y, dY) with Y, dY None when ``want_y`` is false.
    """
    order = _check_order(order)
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("non-finite argument")
    if np.any(z == 0):
        raise ArgumentAtOrigin("array routine needs nonzero arguments")
    shape = z.shape
    z = z.reshape(-1)
    zabs = np.abs(z)
    jm = np.empty_like(z)
    jm1 = np.empty_like(z)
    y0 = np.empty_like(z)
    y1 = np.empty_like(z)

    use_series = zabs <= 2.0 * math.sqrt(order + 1)
    if np.any(use_series):
        if order == 0:
            jm[use_series] = _j_series(0, z[use_series])[0]
            jm1[use_series] = -_j_series(1, z[use_series])[0]  # J_{-1} = -J_1
        else:
            jm[use_series], jm1[use_series] = _j_series(order, z[use_series])
    small_y = zabs <= _SERIES_RADIUS_Y
    if want_y and np.any(small_y):
        a, b = _y01_series(z[small_y])
        y0[small_y] = a
        y1[small_y] = b
    need_miller = ~use_series | (want_y & ~small_y)
    if np.any(need_miller):
        zm = z[need_miller]
        zmax = float(np.max(np.abs(zm)))
        nmax = max(order + 1, int(zmax) + 25 + int(8 * (zmax / 2) ** (1 / 3)))
        jv = _miller(nmax, zm)
        idx = np.flatnonzero(need_miller)
        sel = ~use_series[idx]
        jm[idx[sel]] = jv[order][sel]
        jm1[idx[sel]] = jv[order - 1][sel] if order >= 1 else -jv[1][sel]
        if want_y:
            ysel = ~small_y[idx]
            a, b = _y01_neumann(zm[ysel], jv[:, ysel])
            y0[idx[ysel]] = a
            y1[idx[ysel]] = b

    djm = jm1 - (order / z) * jm

    if not want_y:
        return jm.reshape(shape), djm.reshape(shape), None, None

    if order == 0:
        ym, dym = y0, -y1
    else:
        ykm1, yk = y0, y1
        for k in range(1, order):
            ykm1, yk = yk, (2.0 * k / z) * yk - ykm1
        ym, dym = yk, ykm1 - (order / z) * yk
    return jm.reshape(shape), djm.reshape(shape), ym.reshape(shape), dym.reshape(shape)


def hankel1_array(order, z):
    """H1_order and its derivative on an array of nonzero z."""
    j, dj, y, dy = bessel_jy_array(order, z)
    return j + 1j * y, dj + 1j * dy


def _scalar(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteInput(f"non-finite argument {z}")
    return z


def bessel_j(order, z) -> BesselPair:
    """J_order(z) and its derivative."""
    order = _check_order(order)
    z = _scalar(z)
    if z == 0:
        value = 1.0 if order == 0 else 0.0
        deriv = 0.5 if order == 1 else 0.0
        return BesselPair(complex(value), complex(deriv))
    j, dj, _, _ = bessel_jy_array(order, np.array([z]), want_y=False)
    return BesselPair(complex(j[0]), complex(dj[0]))


def bessel_y(order, z) -> BesselPair:
    """Y_order(z) and its derivative (z != 0)."""
    order = _check_order(order)
    z = _scalar(z)
    if z == 0:
        raise ArgumentAtOrigin("Y is singular at the origin")
    _, _, y, dy = bessel_jy_array(order, np.array([z]))
    return BesselPair(complex(y[0]), complex(dy[0]))


def hankel1(order, z) -> BesselPair:
    """H1_order(z) = J + iY and its derivative, for z != 0 with Im z >= -5."""
    order = _check_order(order)
    z = _scalar(z)
    if z == 0:
        raise ArgumentAtOrigin("H1 is singular at the origin")
    if z.imag < -5:
        raise RangeExceeded(f"Im z = {z.imag} below the supported strip")
    h, dh = hankel1_array(order, np.array([z]))
    return BesselPair(complex(h[0]), complex(dh[0]))


# ---------------------------------------------------------------------------
# Mirror Airy function A(z) = Ai(-z)

_AI0 = Decimal("0.355028053887817239260063186004183176397979174")
_DAI0 = Decimal("0.258819403792806798405183560189203963479091138")  # -Ai'(0)
_MACLAURIN_RADIUS = 8.0
_SQRT_PI = math.sqrt(math.pi)


def _ai_maclaurin(x):
    """Ai(x), Ai'(x) by the Maclaurin series, summed in 40-digit decimals so
    the cancellation between the two fundamental series costs nothing."""
    with localcontext() as ctx:
        ctx.prec = 40
        X = Decimal(x)
        x3 = X * X * X
        f, df = Decimal(1), Decimal(0)
        g, dg = X, Decimal(1)
        cf, cg = Decimal(1), Decimal(1)
        p3 = Decimal(1)  # x^{3k}
        tiny = Decimal("1e-36")
        for k in range(1, 80):
            cf = cf / ((3 * k - 1) * (3 * k))
            cg = cg / ((3 * k) * (3 * k + 1))
            df += 3 * k * cf * p3 * X * X  # 3k cf x^{3k-1}
            p3 = p3 * x3
            tf = cf * p3
            tg = cg * p3 * X
            f += tf
            g += tg
            dg += (3 * k + 1) * cg * p3
            if abs(tf) + abs(tg) < tiny and k > 3:
                break
        ai = _AI0 * f - _DAI0 * g
        dai = _AI0 * df - _DAI0 * dg
        return float(ai), float(dai)


@lru_cache(maxsize=None)
def _uv(n):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return tuple(u), tuple(v)


def _asym_sum(coeffs, zeta, start, step, alternate=True):
    total, sign, prev = 0.0, 1.0, math.inf
    for k in range(start, len(coeffs), step):
        term = coeffs[k] * zeta ** (-k)
        if abs(term) > prev:
            break
        total += sign * term
        prev = abs(term)
        if alternate:
            sign = -sign
    return total


def _ai_decaying(x):
    """Ai(x), Ai'(x) for large positive x."""
    u, v = _uv(30)
    zeta = 2.0 / 3.0 * x ** 1.5
    pref = math.exp(-zeta) / (2 * _SQRT_PI)
    su = _asym_sum(u, zeta, 0, 1)
    sv = _asym_sum(v, zeta, 0, 1)
    return pref * x ** -0.25 * su, -pref * x ** 0.25 * sv


def _ai_oscillating(z):
    """Ai(-z), Ai'(-z) for large positive z."""
    u, v = _uv(30)
    zeta = 2.0 / 3.0 * z ** 1.5
    c, s = math.cos(zeta - math.pi / 4), math.sin(zeta - math.pi / 4)
    ue = _asym_sum(u, zeta, 0, 2)
    uo = _asym_sum(u, zeta, 1, 2)
    ve = _asym_sum(v, zeta, 0, 2)
    vo = _asym_sum(v, zeta, 1, 2)
    ai = (c * ue + s * uo) / (_SQRT_PI * z ** 0.25)
    dai = z ** 0.25 * (s * ve - c * vo) / _SQRT_PI
    return ai, dai


def _airy_mirror_pair(z):
    if abs(z) <= _MACLAURIN_RADIUS:
        ai, dai = _ai_maclaurin(-z)
    elif z > 0:
        ai, dai = _ai_oscillating(z)
    else:
        ai, dai = _ai_decaying(-z)
    return ai, -dai


def airy_mirror(z) -> AirySample:
    """A(z) = Ai(-z) and A'(z) for real |z| <= 50."""
    z = float(z)
    if not math.isfinite(z):
        raise NonFiniteInput("non-finite argument")
    if abs(z) > 50:
        raise RangeExceeded(f"|z| = {abs(z)} exceeds 50")
    return AirySample(*_airy_mirror_pair(z))


def airy_mirror_array(z):
    """Vectorised A and A' over an array of reals."""
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 50):
        raise RangeExceeded("|z| exceeds 50")
    flat = z.reshape(-1)
    out = np.array([_airy_mirror_pair(float(t)) for t in flat]).reshape(flat.shape + (2,))
    return out[:, 0].reshape(z.shape), out[:, 1].reshape(z.shape)


@lru_cache(maxsize=None)
def airy_zero(j) -> tuple[float, float]:
    """j-th positive zero a_j of A (a_0 < a_1 < ...) and A'(a_j)."""
    if int(j) != j or j < 0 or j > 50:
        raise IndexOutOfRange(f"airy zero index must be in [0, 50], got {j}")
    j = int(j)
    # bracket by sign scan; the asymptotic location only sizes the scan
    t = 3 * math.pi * (4 * j + 3) / 8
    guess = t ** (2 / 3) * (1 + 5 / 48 * t ** -2)
    step = 0.05
    zl, fl = 0.0, _airy_mirror_pair(0.0)[0]
    found = -1
    z = 0.0
    while z < guess + 1.0:
        z += step
        fz = _airy_mirror_pair(z)[0]
        if fl * fz < 0:
            found += 1
            if found == j:
                break
        zl, fl = z, fz
    lo, hi = zl, z
    x = 0.5 * (lo + hi)
    for _ in range(60):
        f, df = _airy_mirror_pair(x)
        if f == 0:
            break
        if f * fl < 0:
            hi = x
        else:
            lo = x
        xn = x - f / df
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) < 1e-15 * abs(x):
            x = xn
            break
        x = xn
    return x, _airy_mirror_pair(x)[1]


# ---------------------------------------------------------------------------
# Gauss-Hermite functions (orthonormal on the real line)


def gauss_hermite_table(nmax, z):
    """Psi_0..Psi_{nmax+1} at z, shape (nmax+2,) + z.shape."""
    z = np.asarray(z, dtype=float)
    out = np.empty((nmax + 2,) + z.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * z * z)
    if nmax + 1 >= 1:
        out[1] = math.sqrt(2.0) * z * out[0]
    for n in range(1, nmax + 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * z * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def gauss_hermite_array(ell, z):
    """Psi_ell and Psi_ell' on an array."""
    tab = gauss_hermite_table(ell, z)
    lower = tab[ell - 1] if ell >= 1 else 0.0
    deriv = math.sqrt(ell / 2) * lower - math.sqrt((ell + 1) / 2) * tab[ell + 1]
    return tab[ell], deriv


def gauss_hermite(ell, z) -> GaussHermiteSample:
    """Orthonormal Gauss-Hermite function of order ell and its derivative."""
    if int(ell) != ell or ell < 0 or ell > 64:
        raise OrderOutOfRange(f"Gauss-Hermite order must be in [0, 64], got {ell}")
    z = float(z)
    if abs(z) > 30:
        raise RangeExceeded(f"|z| = {abs(z)} exceeds 30")
    v, d = gauss_hermite_array(int(ell), z)
    return GaussHermiteSample(int(ell), float(v), float(d))


def gh_halfline_norm(ell_odd) -> float:
    """Inverse L2(R_-) norm of an odd Gauss-Hermite function, always sqrt(2)."""
    if int(ell_odd) != ell_odd or ell_odd < 0:
        raise OrderOutOfRange(f"order must be a nonnegative integer, got {ell_odd}")
    if ell_odd % 2 == 0:
        raise EvenOrder(f"order {ell_odd} is even")
    return math.sqrt(2.0)
