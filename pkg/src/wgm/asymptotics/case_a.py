"""Case A: Airy-polynomial recurrence for a triangular well at the rim.

Interior correctors are ``P(s) A(z) + Q(s) A'(z)`` with ``z = a_j + c s`` and
``c^3 = 2 kappa``; exterior ones are ``P(rho) exp(-rate rho)``.  Every order is
an upper-triangular solve in those bases, so the arithmetic is exact when the
inputs are :class:`~fractions.Fraction` (with ``a_j``, ``A'(a_j)`` supplied as
rational stand-ins, the algebra only uses ``A'' = -z A`` and ``A(a_j) = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import NonPositiveCurvature, OrderTooHigh, PreconditionError
from ..series import CASE_BETA, PowerSeries
from ..specfun import airy_mirror_array, airy_zero
from . import _poly
from .operators import taylor_operators

MAX_ORDER = 12


@dataclass(frozen=True)
class AiryPolyPair:
    """phi(s) = P(s) A(a + c s) + Q(s) A'(a + c s), coefficient lists in s."""

    P: list
    Q: list


@dataclass(frozen=True)
class ExpPoly:
    """psi(rho) = P(rho) exp(-rate rho)."""

    P: list
    rate: object


@dataclass
class CaseASolution:
    lam: PowerSeries
    modes: list
    n0: object
    p: int
    j: int
    c: object
    a: object
    Ap: object
    rate: object
    operators: dict = field(repr=False)
    exact: bool = False

    def __iter__(self):
        yield self.lam
        yield self.modes

    @property
    def kappa_breve(self):
        return self.c**3 / 2


def _exact_root(x: Fraction, k: int) -> Fraction:
    num = round(abs(x.numerator) ** (1.0 / k))
    den = round(x.denominator ** (1.0 / k))
    for n in (num - 1, num, num + 1):
        for d in (den - 1, den, den + 1):
            if d > 0 and Fraction(n, d) ** k == abs(x):
                return Fraction(n, d) * (1 if x > 0 or k % 2 == 0 else -1)
    raise PreconditionError(f"exact mode needs {x} to be a rational {k}-th power")


class _Engine:
    def __init__(self, n0, c, a, Ap, rate, p):
        self.n0, self.c, self.a, self.Ap, self.rate, self.p = n0, c, a, Ap, rate, p
        self.n0sq = n0 * n0
        self.zero = 0 * n0
        self.one = n0 / n0
        self.z = [a, c]
        self.jump = self.one if p == 1 else self.one / self.n0sq

    # interior pair calculus
    def d_pair(self, f: AiryPolyPair) -> AiryPolyPair:
        P = _poly.sub(_poly.deriv(f.P), _poly.scale(_poly.mul(self.z, f.Q), self.c))
        Q = _poly.add(_poly.scale(f.P, self.c), _poly.deriv(f.Q))
        return AiryPolyPair(P, Q)

    def apply_minus(self, term, f):
        d1 = self.d_pair(f)
        d2 = self.d_pair(d1)
        P = _poly.add(_poly.add(_poly.mul(term.A2, d2.P), _poly.mul(term.A1, d1.P)), _poly.mul(term.A0, f.P))
        Q = _poly.add(_poly.add(_poly.mul(term.A2, d2.Q), _poly.mul(term.A1, d1.Q)), _poly.mul(term.A0, f.Q))
        return AiryPolyPair(P, Q)

    def at0(self, f: AiryPolyPair):
        # A(a) = 0
        return f.Q[0] * self.Ap

    def d_at0(self, f: AiryPolyPair):
        return self.at0(self.d_pair(f))

    # exterior calculus
    def d_exp(self, P):
        return _poly.sub(_poly.deriv(P), _poly.scale(P, self.rate))

    def apply_plus(self, term, P):
        d1 = self.d_exp(P)
        d2 = self.d_exp(d1)
        return _poly.add(_poly.add(_poly.mul(term.A2, d2), _poly.mul(term.A1, d1)), _poly.mul(term.A0, P))

    # triangular solves
    def solve_airy(self, S: AiryPolyPair) -> AiryPolyPair:
        """P, Q with (-d^2 - c^2 z) phi = S and P(0) = 0."""
        c, a = self.c, self.a
        inv_c = self.one / c
        R = _poly.scale(_poly.compose_affine(S.P, -a * inv_c, inv_c), inv_c * inv_c)
        T = _poly.scale(_poly.compose_affine(S.Q, -a * inv_c, inv_c), inv_c * inv_c)
        M = max(len(R), len(T)) + 1
        R = R + [self.zero] * (M + 3 - len(R))
        T = T + [self.zero] * (M + 3 - len(T))
        P = [self.zero] * (M + 3)
        Q = [self.zero] * (M + 3)
        for ell in range(M, -1, -1):
            Q[ell] = (R[ell] + (ell + 2) * (ell + 1) * P[ell + 2]) / (2 * ell + 1)
            P[ell + 1] = -(T[ell] + (ell + 2) * (ell + 1) * Q[ell + 2]) / (2 * (ell + 1))
        Ps = _poly.compose_affine(_poly.trim(P), a, c)
        Qs = _poly.compose_affine(_poly.trim(Q), a, c)
        Ps[0] = self.zero
        return AiryPolyPair(_poly.trim(Ps), _poly.trim(Qs))

    def solve_exp(self, E):
        """P with P(0) = 0 and (-n0^2 d^2 + n0^2 - 1)(P e) = E e."""
        k = 2 * self.n0sq * self.rate
        U = [self.zero] * (len(E) + 1)
        for ell in range(len(E) - 1, -1, -1):
            U[ell] = (E[ell] + self.n0sq * (ell + 1) * U[ell + 1]) / k
        return _poly.trim(_poly.integ(_poly.trim(U)))


def _as_number(x, exact):
    return Fraction(x) if exact else float(x)


def case_a_recurrence(ntilde, p: int, j: int, order: int = 6, *, airy=None, exact: bool = False,
                      rational: bool = False, check: bool = True) -> CaseASolution:
    """lambda_0..lambda_order with the interior/exterior correctors.

    ``ntilde[q] = R^q n^(q)(R^-)``.  In exact mode all entries, and ``airy`` =
    (a, A'(a)), must be rationals with 2 kappa a rational cube and
    1 - n0^-2 a rational square.  ``rational=True`` takes float inputs but
    runs the triangular solves in exact rational arithmetic, which removes
    the cancellation that costs about three digits by order 6; the returned
    lambda series is float.
    """
    if p not in (1, -1):
        raise PreconditionError("p must be +1 (TM) or -1 (TE)")
    if order > MAX_ORDER:
        raise OrderTooHigh(f"order {order} exceeds {MAX_ORDER}")
    ntilde = [_as_number(x, exact) for x in ntilde]
    n0 = ntilde[0]
    kappa = 1 + ntilde[1] / n0
    if kappa <= 0:
        raise NonPositiveCurvature(f"kappa = {float(kappa)} must be positive in case A")
    if exact:
        c = _exact_root(2 * kappa, 3)
        rate = _exact_root(1 - 1 / (n0 * n0), 2)
        if airy is None:
            raise PreconditionError("exact mode needs rational stand-ins for (a_j, A'(a_j))")
        a, Ap = (Fraction(x) for x in airy)
    else:
        c = (2 * kappa) ** (1 / 3)
        rate = math.sqrt(1 - 1 / n0**2)
        a, Ap = airy if airy is not None else airy_zero(j)
        a, Ap = float(a), float(Ap)
        if rational:
            ntilde = [Fraction(x) for x in ntilde]
            n0 = ntilde[0]
            c, rate, a, Ap = (Fraction(x) for x in (c, rate, a, Ap))

    ops = taylor_operators(ntilde, p, "A", max(order, 1))
    eng = _Engine(n0, c, a, Ap, rate, p)
    zero, one = eng.zero, eng.one

    phis = [AiryPolyPair([one], [zero])]
    psis = [[zero]]
    lam = [a * c * c]
    minus, plus = ops["-"], ops["+"]

    for q in range(1, order + 1):
        # exterior
        E = [zero]
        for ell in range(2, q + 1):
            src = psis[q - ell]
            E = _poly.add(E, _poly.sub(_poly.scale(src, lam[ell - 2]), eng.apply_plus(plus[ell], src)))
        Pt = eng.solve_exp(_poly.trim(E))
        dPt0 = Pt[1] if len(Pt) > 1 else zero
        a0 = (dPt0 - eng.jump * eng.d_at0(phis[q - 1])) / rate
        psi = _poly.trim(_poly.add([a0], Pt))
        # interior
        S = eng.apply_minus(minus[q], phis[0])
        S = AiryPolyPair(_poly.scale(S.P, -1), _poly.scale(S.Q, -1))
        for ell in range(1, q):
            f = phis[q - ell]
            Af = eng.apply_minus(minus[ell], f)
            S = AiryPolyPair(
                _poly.add(S.P, _poly.sub(_poly.scale(f.P, lam[ell]), Af.P)),
                _poly.add(S.Q, _poly.sub(_poly.scale(f.Q, lam[ell]), Af.Q)),
            )
        ft = eng.solve_airy(S)
        lq = c * c * (a0 - eng.at0(ft)) / Ap
        Q = _poly.trim(_poly.add(ft.Q, [lq / (c * c)]))
        phis.append(AiryPolyPair(ft.P, Q))
        psis.append(psi)
        lam.append(lq)

    modes = [(f, ExpPoly(P, rate)) for f, P in zip(phis, psis)]
    series = PowerSeries(CASE_BETA["A"], tuple(lam))
    sol = CaseASolution(
        series.to_float() if rational else series, modes, n0, p, j, c, a, Ap, rate, ops, exact
    )
    if check:
        worst = max(residuals(sol).values(), default=0)
        tol = 0 if exact else 1e-9
        if worst > tol:
            raise PreconditionError(f"case A recurrence residual {worst:.3g} above {tol}")
    return sol


def _pair_norm(f):
    return max([abs(float(x)) for x in f.P + f.Q] + [0.0])


def residuals(sol: CaseASolution):
    """Relative algebraic residuals of the four equations at every order.

    Interior and exterior ODEs are checked as identities between polynomial
    coefficients (stronger than pointwise sampling); matching conditions are
    checked directly.
    """
    eng = _Engine(sol.n0, sol.c, sol.a, sol.Ap, sol.rate, sol.p)
    minus, plus = sol.operators["-"], sol.operators["+"]
    lam = sol.lam.coeffs
    phis = [m[0] for m in sol.modes]
    psis = [m[1].P for m in sol.modes]
    out = {}
    for q in range(len(phis)):
        lhs = AiryPolyPair([eng.zero], [eng.zero])
        scale = 0.0
        for ell in range(q + 1):
            Af = eng.apply_minus(minus[ell], phis[q - ell])
            lf = AiryPolyPair(_poly.scale(phis[q - ell].P, lam[ell]), _poly.scale(phis[q - ell].Q, lam[ell]))
            scale = max(scale, _pair_norm(Af), _pair_norm(lf))
            lhs = AiryPolyPair(_poly.add(lhs.P, _poly.sub(Af.P, lf.P)), _poly.add(lhs.Q, _poly.sub(Af.Q, lf.Q)))
        r_int = _pair_norm(lhs) / max(scale, 1e-300)
        ext = [eng.zero]
        # the leading exterior operator cancels exactly on exp(-rate rho)
        escale = float(abs(eng.n0sq)) * max(abs(float(x)) for x in psis[q])
        for ell in range(q + 1):
            Ap_ = eng.apply_plus(plus[ell], psis[q - ell])
            escale = max([escale] + [abs(float(x)) for x in Ap_])
            ext = _poly.add(ext, Ap_)
            if ell >= 2:
                rhs = _poly.scale(psis[q - ell], lam[ell - 2])
                escale = max([escale] + [abs(float(x)) for x in rhs])
                ext = _poly.sub(ext, rhs)
        r_ext = max(abs(float(x)) for x in ext) / max(escale, 1e-300)
        cont = eng.at0(phis[q]) - psis[q][0]
        neu = eng.d_exp(psis[q])[0] - (eng.jump * eng.d_at0(phis[q - 1]) if q >= 1 else 0)
        if sol.exact:
            vals = [r_int, r_ext, abs(cont), abs(neu)]
            out[q] = float(max(vals))
        else:
            s = max(abs(float(psis[q][0])), abs(float(eng.at0(phis[q]))), 1.0)
            out[q] = max(r_int, r_ext, abs(float(cont)) / s, abs(float(neu)) / s)
    return out


def matching_residuals(sol: CaseASolution):
    """{q: (continuity, derivative jump)} at the rim, absolute."""
    eng = _Engine(sol.n0, sol.c, sol.a, sol.Ap, sol.rate, sol.p)
    out = {}
    for q, (f, e) in enumerate(sol.modes):
        cont = eng.at0(f) - e.P[0]
        neu = eng.d_exp(e.P)[0] - (eng.jump * eng.d_at0(sol.modes[q - 1][0]) if q else 0)
        out[q] = (cont, neu)
    return out


def degree_report(sol: CaseASolution):
    """Per-order degrees (deg P_phi, P_phi(0), deg Q_phi, deg P_psi)."""
    rows = []
    for q, (f, e) in enumerate(sol.modes):
        rows.append((q, _poly.degree(f.P), f.P[0], _poly.degree(f.Q), _poly.degree(e.P)))
    return rows


def airy_deep(z):
    """A and A' that flush to zero below z = -50, where |A| < 1e-100."""
    z = np.asarray(z, dtype=float)
    keep = z >= -50
    A, dA = np.zeros_like(z), np.zeros_like(z)
    if np.any(keep):
        A[keep], dA[keep] = airy_mirror_array(z[keep])
    return A, dA


def evaluate_mode(sol: CaseASolution, q: int, sigma=None, rho=None):
    """Sample phi_q at sigma <= 0 and/or psi_q at rho >= 0 (float mode)."""
    f, e = sol.modes[q]
    out = []
    if sigma is not None:
        s = np.asarray(sigma, dtype=float)
        A, dA = airy_deep(float(sol.a) + float(sol.c) * s)
        P = np.polyval([float(x) for x in reversed(f.P)], s)
        Q = np.polyval([float(x) for x in reversed(f.Q)], s)
        out.append(P * A + Q * dA)
    if rho is not None:
        r = np.asarray(rho, dtype=float)
        out.append(np.polyval([float(x) for x in reversed(e.P)], r) * np.exp(-float(e.rate) * r))
    return out[0] if len(out) == 1 else tuple(out)
