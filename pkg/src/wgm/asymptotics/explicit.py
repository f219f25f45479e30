"""Closed-form leading coefficients of the resonance expansions."""

from __future__ import annotations

import math

from ..errors import NonPositiveCurvature, NonPositiveHessian, PreconditionError
from ..series import CASE_BETA, PowerSeries, ResonanceExpansion, lambda_to_expansion
from ..specfun import airy_zero, gauss_hermite


def _check_index(n0):
    if not n0 > 1:
        raise PreconditionError(f"n0 = {n0} must exceed 1")


def case_a_explicit(n0, kappa_breve, mu_breve, p, j, R=1.0) -> ResonanceExpansion:
    """Six coefficients K^0..K^5 of a triangular-well expansion in m^(-1/3)."""
    _check_index(n0)
    if not kappa_breve > 0:
        raise NonPositiveCurvature(f"kappa = {kappa_breve} must be positive")
    a, _ = airy_zero(j)
    kb, mu = kappa_breve, mu_breve
    root = math.sqrt(n0**2 - 1)
    np_ = n0**p
    k = [
        1.0,
        0.0,
        a / 2,
        -np_ / (2 * root),
        a**2 / 15 * (17 / 8 - 3 / kb + mu / kb**2),
        -a * np_ / (12 * root) * ((3 * n0**2 - 2 * n0 ** (2 * p)) / (n0**2 - 1) + 2 - 6 / kb + 2 * mu / kb**2),
    ]
    # terms are graded by (2 kappa / m)^(l/3)
    c = (2 * kb) ** (1 / 3)
    coeffs = tuple(kl * c**ell for ell, kl in enumerate(k))
    return ResonanceExpansion(p, j, "A", 1 / (R * n0), PowerSeries(CASE_BETA["A"], coeffs), "explicit")


def constant_index_expansion(n0, R, p, j, corrected=False) -> ResonanceExpansion:
    """Nine coefficients K^0..K^8 for a homogeneous disk.

    ``corrected=False`` gives the closed forms as commonly quoted;
    ``corrected=True`` uses the values reproduced by the recurrence
    and by high-precision modal roots (TM 7/3 gains a factor n0, TE 5/3 has
    3 n0^4 - 2 in place of 3 n0^2 - 2, TE order 2 has (n0^2 - 1) instead of
    its square, TE 7/3 flips sign).
    """
    _check_index(n0)
    a, _ = airy_zero(j)
    s = n0**2 - 1
    if p == 1:
        k6 = (10 - a**3) / 2800
        k7 = a**2 * n0**2 * (n0**2 - 4) / (80 * s**2.5)
        if corrected:
            k7 *= n0
        k8 = -a / 144 * (1 / 175 + 479 * a**3 / 7000 + 2 * n0**6 / s**3)
        k3 = -n0 / (2 * math.sqrt(s))
        k5 = -a * n0**3 / (12 * s**1.5)
    elif p == -1:
        k6 = (1 / 35 - a**3 / 350 + 1 / (n0**4 * (s if corrected else s**2))) / 8
        k7 = a**2 * (3 * n0**8 + 12 * n0**6 - 12 * n0**4 - 8 * n0**2 + 8) / (80 * n0**5 * s**2.5)
        if corrected:
            k7 = -k7
        k8 = -a / 144 * (
            1 / 175 + 479 * a**3 / 7000 + (18 * n0**8 - 45 * n0**6 + 12 * n0**4 + 45 * n0**2 - 28) / (n0**6 * s**3)
        )
        k3 = -1 / (2 * n0 * math.sqrt(s))
        k5 = -a * ((3 * n0**4 - 2) if corrected else (3 * n0**2 - 2)) / (12 * n0**3 * s**1.5)
    else:
        raise PreconditionError("p must be +1 (TM) or -1 (TE)")
    k = [1.0, 0.0, a / 2, k3, 3 * a**2 / 40, k5, k6, k7, k8]
    coeffs = tuple(kl * 2 ** (ell / 3) for ell, kl in enumerate(k))
    return ResonanceExpansion(p, j, "A", 1 / (R * n0), PowerSeries(CASE_BETA["A"], coeffs), "explicit",
                              {"corrected": corrected})


def case_b_k3(n0, mu_breve, n3_scaled, p, j):
    """k^3 of the zero-curvature expansion; ``n3_scaled = R^3 n'''(R) / n0``."""
    d = gauss_hermite(2 * j + 1, 0.0).derivative
    return d**2 * (-(n0**p) / math.sqrt(n0**2 - 1) + (4 * j + 3) / (9 * mu_breve**1.5) * (6 + n3_scaled - 6 * mu_breve))


def case_b_expansion(n0, mu_breve, n3_scaled, p, j, R=1.0) -> ResonanceExpansion:
    """K^0..K^3 in powers of m^(-1/2) for a zero-curvature rim well."""
    _check_index(n0)
    if not mu_breve > 0:
        raise NonPositiveHessian(f"mu = {mu_breve} must be positive")
    lam0 = (4 * j + 3) * math.sqrt(mu_breve)
    lam1 = 2 * mu_breve**0.75 * case_b_k3(n0, mu_breve, n3_scaled, p, j)
    lam = PowerSeries(CASE_BETA["B"], (lam0, lam1))
    return lambda_to_expansion(lam, "B", 1 / (R * n0), p, j, provenance="explicit")


def case_c_k4(mu0, eta3, eta4, p, j, corrected=False):
    """k^4 of the interior-well expansion.

    ``corrected=True`` flips the sign of the constant 5 in the 1/mu0 term,
    which is what the recurrence and fine finite differences both give.
    """
    const = 5 if corrected else -5
    return (
        13 - 16 * p + (8 * p * p - 16 * p + const) / mu0 - (2 * eta3 - 3 * eta4) / (3 * mu0**2) - 7 * eta3**2 / (9 * mu0**3)
        + (2 * j + 1) ** 2 * (5 - 35 / mu0 + (10 * eta3 + eta4) / mu0**2 - 5 * eta3**2 / (3 * mu0**3))
    ) / 64


def case_c_explicit(R0, n_R0, mu0, eta3, eta4, p, j, corrected=False) -> ResonanceExpansion:
    """K^0..K^4 in powers of m^(-1/2) for an interior well; odd orders vanish."""
    if not mu0 > 0:
        raise NonPositiveHessian(f"mu0 = {mu0} must be positive")
    lam0 = (2 * j + 1) * math.sqrt(mu0)
    lam2 = 2 * (case_c_k4(mu0, eta3, eta4, p, j, corrected) * mu0 + lam0**2 / 8)
    lam = PowerSeries(CASE_BETA["C"], (lam0, 0.0, lam2))
    return lambda_to_expansion(lam, "C", 1 / (R0 * n_R0), p, j, provenance="explicit")
