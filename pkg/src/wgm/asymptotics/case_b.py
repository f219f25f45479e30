"""Case B: half harmonic oscillator at the rim (zero effective curvature).

Only lambda_0 and lambda_1 are closed-form.  ``case_b_continuation`` pushes the
recurrence further by truncating the odd Gauss-Hermite expansion of each
corrector; it is experimental and reports a tail estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonPositiveHessian, OrderTooHigh
from ..series import CASE_BETA, PowerSeries
from ..specfun import gauss_hermite_table
from . import _gh, _poly
from .operators import taylor_operators

QUAD_L = 12.0
QUAD_NODES = 200


def _nodes():
    x, w = np.polynomial.legendre.leggauss(QUAD_NODES)
    return 0.5 * QUAD_L * (x - 1.0), 0.5 * QUAD_L * w


def _exp_solve(E, n0sq, rate):
    k = 2 * n0sq * rate
    U = [0.0] * (len(E) + 1)
    for ell in range(len(E) - 1, -1, -1):
        U[ell] = (E[ell] + n0sq * (ell + 1) * U[ell + 1]) / k
    return _poly.integ(_poly.trim(U))


def _exp_apply(term, P, rate):
    d1 = _poly.sub(_poly.deriv(P), _poly.scale(P, rate))
    d2 = _poly.sub(_poly.deriv(d1), _poly.scale(d1, rate))
    return _poly.add(_poly.add(_poly.mul(term.A2, d2), _poly.mul(term.A1, d1)), _poly.mul(term.A0, P))


@dataclass
class CaseBSolution:
    lam: PowerSeries
    modes: list
    mu: float
    j: int
    p: int
    tail: list = field(default_factory=list)
    experimental: bool = True

    def __iter__(self):
        yield self.lam
        yield self.modes


def case_b_continuation(ntilde, p: int, j: int, order: int = 1, n_gh: int = 64) -> CaseBSolution:
    """lambda_0..lambda_order by a truncated odd Gauss-Hermite recurrence.

    lambda_0 and lambda_1 are exact up to quadrature error; from order 2 on the
    result depends on ``n_gh`` and ``tail`` holds the magnitude of the last
    retained coefficient of each corrector.
    """
    if order > 6:
        raise OrderTooHigh("the continuation stops at order 6")
    ntilde = [float(x) for x in ntilde]
    n0 = ntilde[0]
    mu = 2.0 - ntilde[2] / n0
    if not mu > 0:
        raise NonPositiveHessian(f"mu = {mu} must be positive")
    ops = taylor_operators(ntilde, p, "B", max(order, 1))
    minus, plus = ops["-"], ops["+"]
    n0sq = n0 * n0
    rate = math.sqrt(1 - 1 / n0sq)
    jump = 1.0 if p == 1 else 1 / n0sq
    ell0 = 2 * j + 1
    x, w = _nodes()
    nbasis = 2 * n_gh + 2
    psi0_at0 = math.pi ** -0.25

    def values(b):
        tab = gauss_hermite_table(len(b) - 1, x)[: len(b)]
        return np.tensordot(b, tab, axes=1)

    def d_at0(b):
        # phi'(0) in sigma: mu^(1/4) * (sum b_i Psi_i)'(0)
        db = _gh.dmul(b)
        tab0 = gauss_hermite_table(len(db) - 1, np.zeros(1))[: len(db), 0]
        return mu**0.25 * float(db @ tab0)

    odd_tab = gauss_hermite_table(nbasis, x)[1 : nbasis + 1 : 2]  # Psi_1, Psi_3, ...
    phi0 = np.zeros(ell0 + 1)
    phi0[ell0] = 1.0
    phis = [phi0]
    psis = [[0.0]]
    lam = [(4 * j + 3) * math.sqrt(mu)]
    tails = [0.0]
    for q in range(1, order + 1):
        E = [0.0]
        for ell in range(2, q + 1):
            E = _poly.add(E, _poly.sub(_poly.scale(psis[q - ell], lam[ell - 2]), _exp_apply(plus[ell], psis[q - ell], rate)))
        Pt = _exp_solve(_poly.trim(E), n0sq, rate)
        a0 = ((Pt[1] if len(Pt) > 1 else 0.0) - jump * d_at0(phis[q - 1])) / rate
        psi = _poly.add([a0], Pt)
        cq = a0 / psi0_at0
        S = -_gh.apply_term(minus[q], phis[0], mu)
        for ell in range(1, q):
            S = _gh.add(S, _gh.add(lam[ell] * phis[q - ell], -_gh.apply_term(minus[ell], phis[q - ell], mu)))
        S = _gh.add(S, np.array([2 * (2 * j + 1) * math.sqrt(mu) * cq]))
        # also (A0 - lambda0) acting on c_q Psi_0 is folded in above
        Sv = values(S)
        s = math.sqrt(2.0) * (odd_tab * Sv) @ w  # (S, sqrt2 Psi_{2i+1}) in x
        lq = -math.sqrt(2.0) * s[j]
        i = np.arange(len(s))
        b = np.zeros(len(s))
        mask = i != j
        b[mask] = s[mask] / (4 * math.sqrt(mu) * (i[mask] - j))
        full = np.zeros(nbasis + 1)
        full[1::2][: len(b)] = math.sqrt(2.0) * b
        full[0] = cq
        phis.append(full)
        psis.append(psi)
        lam.append(lq)
        tails.append(float(abs(b[-1])))
    modes = [(f, p_) for f, p_ in zip(phis, psis)]
    return CaseBSolution(PowerSeries(CASE_BETA["B"], tuple(lam)), modes, mu, j, p, tails, order >= 2)


def case_b_lambda1(ntilde, p: int, j: int) -> float:
    """lambda_1 by half-line quadrature of the solvability condition."""
    return case_b_continuation(ntilde, p, j, order=1).lam[1]
