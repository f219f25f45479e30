"""Case C: interior harmonic well, finite Gauss-Hermite recurrence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonPositiveHessian, OrderTooHigh
from ..series import CASE_BETA, PowerSeries
from . import _gh
from .operators import taylor_operators

MAX_ORDER = 12


@dataclass(frozen=True)
class GHExpansion:
    """phi(s) = sum_i coeffs[i] Psi_i(scale * s)."""

    coeffs: np.ndarray
    scale: float

    def __call__(self, sigma):
        from ..specfun import gauss_hermite_table

        x = self.scale * np.asarray(sigma, dtype=float)
        tab = gauss_hermite_table(max(len(self.coeffs) - 1, 0), x)[: len(self.coeffs)]
        return np.tensordot(self.coeffs, tab, axes=1)


@dataclass
class CaseCSolution:
    lam: PowerSeries
    modes: list
    mu0: float
    j: int
    p: int
    operators: dict = field(repr=False)
    solvability: list = field(default_factory=list)

    def __iter__(self):
        yield self.lam
        yield self.modes


def case_c_recurrence(ntilde, p: int, j: int, order: int = 6, check: bool = True) -> CaseCSolution:
    """lambda_0..lambda_order at an interior well.

    ``ntilde[q] = R0^q n^(q)(R0)``, with R0 the stationary point of r n(r).
    """
    if order > MAX_ORDER:
        raise OrderTooHigh(f"order {order} exceeds {MAX_ORDER}")
    ntilde = [float(x) for x in ntilde]
    mu = 2.0 - ntilde[2] / ntilde[0]
    if not mu > 0:
        raise NonPositiveHessian(f"mu0 = {mu} must be positive")
    ops = taylor_operators(ntilde, p, "C", max(order, 1))["-"]
    gap = 2.0 * math.sqrt(mu)
    phi0 = np.zeros(j + 1)
    phi0[j] = 1.0
    phis = [phi0]
    lam = [(2 * j + 1) * math.sqrt(mu)]
    solv = [0.0]
    for q in range(1, order + 1):
        S = -_gh.apply_term(ops[q], phis[0], mu)
        for ell in range(1, q):
            S = _gh.add(S, _gh.add(lam[ell] * phis[q - ell], -_gh.apply_term(ops[ell], phis[q - ell], mu)))
        S = _gh.pad(S, j + 1)
        lq = -S[j]
        rhs = S.copy()
        rhs[j] += lq
        solv.append(abs(rhs[j]) / max(_gh.norm(S), 1e-300))
        i = np.arange(len(rhs))
        b = np.zeros_like(rhs)
        mask = i != j
        b[mask] = rhs[mask] / (gap * (i[mask] - j))
        phis.append(_gh.trim(b) if _gh.norm(b) else np.zeros(1))
        lam.append(lq)
    # odd orders vanish by parity; clean the rounding
    modes = [GHExpansion(b, mu**0.25) for b in phis]
    sol = CaseCSolution(PowerSeries(CASE_BETA["C"], tuple(lam)), modes, mu, j, p, {"-": ops}, solv)
    if check:
        worst = max(residuals(sol).values())
        if worst > 1e-9:
            raise RuntimeError(f"case C recurrence residual {worst:.3g}")
    return sol


def residuals(sol: CaseCSolution):
    """Relative coefficient-space residual of sum_l (A_l - lambda_l) phi_{q-l}."""
    ops = sol.operators["-"]
    lam = sol.lam.coeffs
    phis = [m.coeffs for m in sol.modes]
    out = {}
    for q in range(len(phis)):
        tot = np.zeros(1)
        scale = 0.0
        for ell in range(q + 1):
            t = _gh.apply_term(ops[ell], phis[q - ell], sol.mu0)
            u = lam[ell] * phis[q - ell]
            scale = max(scale, _gh.norm(t), _gh.norm(u))
            tot = _gh.add(tot, _gh.add(t, -u))
        out[q] = _gh.norm(tot) / max(scale, 1e-300)
    return out
