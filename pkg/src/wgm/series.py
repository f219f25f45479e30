"""Truncated power series in t = m^(-beta) and resonance expansions.

Coefficients may be floats or :class:`fractions.Fraction`; all operations are
written generically so exact-rational checks run through the same code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BetaMismatch,
    BranchViolation,
    CaseBetaMismatch,
    OrderMismatch,
    TermsExceedOrder,
)

CASE_BETA = {"A": Fraction(1, 3), "B": Fraction(1, 2), "C": Fraction(1, 2)}
DEFAULT_ORDER = {"A": 9, "B": 4, "C": 8}


@dataclass(frozen=True)
class PowerSeries:
    """sum_{q < order} coeffs[q] t^q with t = m^(-beta)."""

    beta: Fraction
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def constant(cls, c, beta, order):
        return cls(beta, (c,) + (0 * c,) * (order - 1))

    def __getitem__(self, q):
        return self.coeffs[q]

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, series_scale(other, -1))

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __call__(self, t, terms=None):
        n = self.order if terms is None else terms
        total = 0.0
        for c in reversed(self.coeffs[:n]):
            total = total * t + c
        return total

    def shift(self, k):
        """Multiply by t^k, keeping the truncation order (top terms drop out)."""
        zero = 0 * self.coeffs[0]
        return PowerSeries(self.beta, ((zero,) * k + self.coeffs)[: self.order])

    def extend(self, order):
        """Pad with zeros or truncate to ``order`` coefficients."""
        zero = 0 * self.coeffs[0]
        c = self.coeffs[:order] + (zero,) * max(0, order - self.order)
        return PowerSeries(self.beta, c)

    def to_float(self):
        return PowerSeries(self.beta, tuple(float(c) for c in self.coeffs))


def _check_pair(s, t):
    if s.beta != t.beta:
        raise BetaMismatch(f"beta {s.beta} vs {t.beta}")
    if s.order != t.order:
        raise OrderMismatch(f"order {s.order} vs {t.order}")


def series_add(s: PowerSeries, t: PowerSeries) -> PowerSeries:
    _check_pair(s, t)
    return PowerSeries(s.beta, tuple(a + b for a, b in zip(s.coeffs, t.coeffs)))


def series_scale(s: PowerSeries, c) -> PowerSeries:
    return PowerSeries(s.beta, tuple(c * a for a in s.coeffs))


def series_mul(s: PowerSeries, t: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at the common order."""
    _check_pair(s, t)
    n = s.order
    out = []
    for q in range(n):
        acc = 0 * s.coeffs[0]
        for i in range(q + 1):
            acc = acc + s.coeffs[i] * t.coeffs[q - i]
        out.append(acc)
    return PowerSeries(s.beta, tuple(out))


def series_sqrt_one_plus(s: PowerSeries) -> PowerSeries:
    """T with T*T = 1 + S up to the truncation order."""
    c0 = 1 + s.coeffs[0]
    if c0 <= 0:
        raise BranchViolation(f"1 + S(0) = {c0} is not positive")
    if isinstance(c0, Fraction) and c0 == 1:
        t0 = Fraction(1)
    else:
        t0 = math.sqrt(c0)
    out = [t0]
    for q in range(1, s.order):
        acc = s.coeffs[q]
        for i in range(1, q):
            acc = acc - out[i] * out[q - i]
        out.append(acc / (2 * t0))
    return PowerSeries(s.beta, tuple(out))


@dataclass(frozen=True)
class ResonanceExpansion:
    """k(m) ~ m * anchor * sum_l K^l m^(-l beta).

    ``series`` holds K^l / anchor, so its first coefficient is 1.
    """

    p: int
    j: int
    case: str
    anchor: float
    series: PowerSeries
    provenance: str = "recurrence"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def beta(self):
        return self.series.beta

    @property
    def order(self):
        return self.series.order

    @property
    def coefficients(self):
        """Dimensional K^l = anchor * series coefficient."""
        return tuple(self.anchor * float(c) for c in self.series.coeffs)

    def __call__(self, m, terms=None):
        return evaluate_expansion(self, m, self.order if terms is None else terms)

    def to_dict(self):
        return {
            "case": self.case,
            "p": self.p,
            "j": self.j,
            "beta": str(self.beta),
            "anchor": self.anchor,
            "coefficients": [float(c) for c in self.series.coeffs],
            "provenance": self.provenance,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        beta = Fraction(d["beta"])
        return cls(
            p=int(d["p"]),
            j=int(d["j"]),
            case=d["case"],
            anchor=float(d["anchor"]),
            series=PowerSeries(beta, tuple(float(c) for c in d["coefficients"])),
            provenance=d.get("provenance", "recurrence"),
        )


def lambda_to_expansion(lam: PowerSeries, case, anchor, p, j, order=None, provenance="recurrence"):
    """Turn the eigenvalue series lambda(t) into k/(m anchor) = sqrt(1 + t^2 lambda(t)).

    The result carries ``lam.order + 2`` coefficients unless ``order`` asks for
    fewer.
    """
    if case not in CASE_BETA:
        raise CaseBetaMismatch(f"unknown case {case!r}")
    if lam.beta != CASE_BETA[case]:
        raise CaseBetaMismatch(f"case {case} needs beta {CASE_BETA[case]}, got {lam.beta}")
    n = lam.order + 2 if order is None else min(order, lam.order + 2)
    zero = 0 * lam.coeffs[0]
    shifted = PowerSeries(lam.beta, ((zero, zero) + lam.coeffs)[:n])
    root = series_sqrt_one_plus(shifted)
    return ResonanceExpansion(p=p, j=j, case=case, anchor=float(anchor), series=root, provenance=provenance)


def evaluate_expansion(e: ResonanceExpansion, m, terms) -> float:
    """m * anchor * sum_{l < terms} K^l m^(-l beta)."""
    if terms > e.order:
        raise TermsExceedOrder(f"{terms} terms requested, expansion has {e.order}")
    if m < 1:
        raise ValueError("m must be >= 1")
    t = float(m) ** (-float(e.beta))
    return m * e.anchor * float(e.series(t, terms))
