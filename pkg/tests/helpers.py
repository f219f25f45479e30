"""Shared builders for the asymptotic cross-checks."""

import numpy as np

from wgm.asymptotics import (
    case_a_explicit,
    case_a_recurrence,
    case_c_explicit,
    case_c_recurrence,
    required_derivatives,
)
from wgm.series import lambda_to_expansion


def random_case_a(rng):
    """(ntilde, p, j, kappa, mu) with n0 in (1.1, 3), kappa in (0.1, 2)."""
    n0 = rng.uniform(1.1, 3.0)
    kappa = rng.uniform(0.1, 2.0)
    mu = rng.uniform(-3.0, 5.0)
    nt = [n0, (kappa - 1) * n0, (2 - mu) * n0]
    return nt, int(rng.choice([1, -1])), int(rng.integers(0, 4)), kappa, mu


def random_case_c(rng):
    """(ntilde at R0, p, j, mu0, eta3, eta4); r n(r) is stationary at R0."""
    n0 = rng.uniform(1.1, 3.0)
    mu0 = rng.uniform(0.3, 5.0)
    eta3 = rng.uniform(-10.0, 10.0)
    eta4 = rng.uniform(-40.0, 60.0)
    nt = [n0, -n0, (2 - mu0) * n0, (eta3 - 6) * n0, (24 - eta4) * n0]
    return nt, int(rng.choice([1, -1])), int(rng.integers(0, 4)), mu0, eta3, eta4


def case_a_pair(nt, p, j, kappa, mu):
    """Recurrence and closed-form expansions, six coefficients each (R = 1)."""
    assert len(nt) > required_derivatives("A", 3)
    rec = lambda_to_expansion(case_a_recurrence(nt, p, j, 3).lam, "A", 1 / nt[0], p, j, order=6)
    ref = case_a_explicit(nt[0], kappa, mu, p, j)
    return np.array(rec.series.coeffs, float), np.array(ref.series.coeffs, float)


def case_c_pair(nt, p, j, mu0, eta3, eta4, corrected):
    """Recurrence and closed-form expansions, five coefficients each (R0 = 1)."""
    rec = lambda_to_expansion(case_c_recurrence(nt, p, j, 2).lam, "C", 1 / nt[0], p, j, order=5)
    ref = case_c_explicit(1.0, nt[0], mu0, eta3, eta4, p, j, corrected=corrected)
    return np.array(rec.series.coeffs, float), np.array(ref.series.coeffs, float)


def rel_err(got, ref):
    """Per-coefficient relative error; coefficients that vanish exactly are compared absolutely."""
    scale = np.where(ref == 0, 1.0, np.abs(ref))
    return np.abs(got - ref) / scale
