"""Engine dispatch from a profile, quasi-mode sampling, lattice gaps, WKB."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from ..cavity import IndexProfile, WellClassification, classify
from ..errors import MixedCases, OrderTooHigh, PreconditionError, UnsupportedCase
from ..series import DEFAULT_ORDER, ResonanceExpansion, lambda_to_expansion
from ..specfun import airy_mirror_array, gauss_hermite_table
from .case_a import airy_deep, case_a_recurrence, evaluate_mode
from .case_b import case_b_continuation
from .case_c import case_c_recurrence
from .explicit import case_b_expansion
from .operators import required_derivatives

log = logging.getLogger(__name__)


def _lambda_order(case, order, max_derivative):
    n = order - 2
    while n > 0 and required_derivatives(case, n) > max_derivative:
        n -= 1
    if n < order - 2:
        log.warning("profile derivatives limit case %s to %d coefficients", case, n + 2)
    return max(n, 0)


def expansion(profile: IndexProfile, p: int, j: int, order: int | None = None,
              classification: WellClassification | None = None) -> ResonanceExpansion:
    """Resonance expansion with ``order`` coefficients for the well of ``profile``."""
    cls = classification or classify(profile)
    order = DEFAULT_ORDER[cls.case] if order is None else order
    if order < 1:
        raise PreconditionError("order must be at least 1")
    if cls.case == "A":
        n = _lambda_order("A", order, profile.max_derivative)
        nt = profile.scaled_derivatives(cls.R, required_derivatives("A", max(n, 1)))
        lam = case_a_recurrence(nt, p, j, n, rational=True).lam
        return lambda_to_expansion(lam, "A", cls.anchor, p, j, order=order)
    if cls.case == "B":
        if order > 4:
            raise OrderTooHigh("case B is closed-form only through 4 coefficients")
        n3 = profile.R**3 * profile.deriv(profile.R, 3) / cls.n0
        e = case_b_expansion(cls.n0, cls.mu_breve, n3, p, j, R=cls.R)
        return dataclasses.replace(e, series=e.series.extend(order))
    if cls.case == "C":
        n = _lambda_order("C", order, profile.max_derivative)
        nt = profile.scaled_derivatives(cls.R0, required_derivatives("C", max(n, 1)))
        lam = case_c_recurrence(nt, p, j, n).lam
        return lambda_to_expansion(lam, "C", cls.anchor, p, j, order=order)
    raise UnsupportedCase(str(cls.case))


# ---------------------------------------------------------------------------
# quasi-modes


@lru_cache(maxsize=None)
def _airy_peak():
    # max of |A| sits at the first zero of A', below every a_j
    def dA(z):
        return float(airy_mirror_array(np.array([z]))[1][0])

    z = brentq(dA, 0.5, 1.5, xtol=1e-14)
    return float(airy_mirror_array(np.array([z]))[0][0])


@lru_cache(maxsize=None)
def _gh_peak(ell, half_line):
    # signed value at the largest lobe, so the returned peak is +1
    x = np.linspace(-12, 0 if half_line else 12, 24001)
    v = gauss_hermite_table(ell, x)[ell]
    return float(v[np.argmax(np.abs(v))])


def _gh_eval(coeffs, x):
    tab = gauss_hermite_table(max(len(coeffs) - 1, 0), x)[: len(coeffs)]
    return np.tensordot(coeffs, tab, axes=1)


def quasimode_profile(profile: IndexProfile, m, p, j, r, classification=None, correction=True):
    """Leading (plus first-correction) radial quasi-mode sampled on ``r``.

    Scaled so that the leading term peaks at 1.  No cut-off is applied.
    """
    if m < 1:
        raise PreconditionError("m must be >= 1")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise PreconditionError("radial grid must lie in (0, inf)")
    cls = classification or classify(profile)
    out = np.zeros_like(r)
    if cls.case == "A":
        R = cls.R
        nt = profile.scaled_derivatives(R, 2)
        sol = case_a_recurrence(nt, p, j, 1)
        inside = r < R
        sigma = m ** (2 / 3) * (r[inside] / R - 1)
        rho = m * (r[~inside] / R - 1)
        A, _ = airy_deep(sol.a + sol.c * sigma)
        out[inside] = A
        if correction:
            out[inside] += m ** (-1 / 3) * evaluate_mode(sol, 1, sigma=sigma)
            out[~inside] += m ** (-1 / 3) * evaluate_mode(sol, 1, rho=rho)
        return out / _airy_peak()
    if cls.case == "B":
        R = cls.R
        nt = profile.scaled_derivatives(R, 3)
        inside = r < R
        sigma = m**0.5 * (r[inside] / R - 1)
        x = cls.mu_breve**0.25 * sigma
        out[inside] = gauss_hermite_table(2 * j + 1, x)[2 * j + 1]
        if correction:
            sol = case_b_continuation(nt, p, j, order=1)
            phi1, psi1 = sol.modes[1]
            out[inside] += m**-0.5 * _gh_eval(phi1, x)
            rho = m * (r[~inside] / R - 1)
            rate = math.sqrt(1 - 1 / cls.n0**2)
            out[~inside] += m**-0.5 * np.polyval(list(reversed(psi1)), rho) * np.exp(-rate * rho)
        return out / _gh_peak(2 * j + 1, True)
    if cls.case == "C":
        R0 = cls.R0
        x = cls.mu0_breve**0.25 * m**0.5 * (r / R0 - 1)
        out = gauss_hermite_table(j, x)[j].copy()
        if correction:
            nt = profile.scaled_derivatives(R0, 3)
            sol = case_c_recurrence(nt, p, j, 1)
            out += m**-0.5 * _gh_eval(sol.modes[1].coeffs, x)
        return out / _gh_peak(j, False)
    raise UnsupportedCase(str(cls.case))


# ---------------------------------------------------------------------------
# lattice structure and tunnelling estimate


@dataclass(frozen=True)
class LatticeGaps:
    gap_m: float
    gap_j: float
    lead_m: float
    lead_j: float

    @property
    def rel_dev_m(self):
        return abs(self.gap_m - self.lead_m) / abs(self.lead_m)

    @property
    def rel_dev_j(self):
        return abs(self.gap_j - self.lead_j) / abs(self.lead_j)


def lattice_gaps(e_j: ResonanceExpansion, e_j1: ResonanceExpansion, m, terms=None) -> LatticeGaps:
    """Polar gap k(m+1) - k(m) and radial gap k_{j+1}(m) - k_j(m).

    Leading values are the anchor 1/(R n) and anchor * (K2_{j+1} - K2_j)
    m^(1 - 2 beta), i.e. 2 sqrt(mu)/(R n0) in case B and sqrt(mu0)/(R0 n(R0)) in case C.
    """
    if e_j.case != e_j1.case or e_j.p != e_j1.p:
        raise MixedCases("expansions must share case and polarisation")
    terms = min(e_j.order, e_j1.order) if terms is None else terms
    gap_m = e_j(m + 1, terms) - e_j(m, terms)
    gap_j = e_j1(m, terms) - e_j(m, terms)
    beta = float(e_j.beta)
    lead_j = e_j.anchor * (float(e_j1.series[2]) - float(e_j.series[2])) * m ** (1 - 2 * beta)
    return LatticeGaps(gap_m, gap_j, e_j.anchor, lead_j)


def wkb_imag_estimate(S0, m) -> float:
    """Heuristic order of magnitude exp(-2 S0 m) of |Im k|; not a rigorous bound."""
    if S0 < 0:
        raise PreconditionError("S0 must be non-negative")
    if m < 1:
        raise PreconditionError("m must be >= 1")
    return math.exp(-2.0 * S0 * m)
