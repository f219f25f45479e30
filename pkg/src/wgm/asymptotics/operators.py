"""Taylor coefficients of the scaled radial operators on each side of the anchor.

The interior operator is expanded in the stretched variable sigma = xi / h^alpha,
the exterior one in rho = xi / h, and both are graded by powers of t = h^beta.
Each term is returned as an :class:`OperatorTaylorTerm` ``A2 d^2 + A1 d + A0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from ..errors import InsufficientDerivatives, UnsupportedCase
from . import _poly


@dataclass(frozen=True)
class OperatorTaylorTerm:
    A2: list
    A1: list
    A0: list

    def apply_coeffs(self):
        return self.A2, self.A1, self.A0


def _zero_term(zero):
    return OperatorTaylorTerm([zero], [zero], [zero])


def required_derivatives(case: str, q_max: int) -> int:
    """Highest scaled derivative order needed for operators up to q_max."""
    return q_max // 2 + 1 if case == "A" else q_max + 2


def coefficient_series(ntilde, p, nterms):
    """Taylor coefficients (a2, b1, v) in xi of the interior operator.

    ``ntilde[q] = R^q n^(q)(R)``; everything is normalised by ntilde[0].
    """
    n0 = ntilde[0]
    one = n0 / n0
    u = [one] + [ntilde[q] / n0 / factorial(q) for q in range(1, len(ntilde))]
    u = (u + [0 * one] * nterms)[:nterms]
    inv_u = _poly.ser_inv(u, nterms)
    inv_u2 = _poly.ser_mul(inv_u, inv_u, nterms)
    inv_u3 = _poly.ser_mul(inv_u2, inv_u, nterms)
    inv_1x = [(-one) ** k for k in range(nterms)]
    a2 = inv_u2
    b1 = _poly.add(
        _poly.ser_mul(inv_1x, inv_u2, nterms),
        _poly.scale(_poly.ser_mul(_poly.ser_deriv(u, nterms), inv_u3, nterms), (p - 1) * one),
    )
    v = _poly.ser_mul(_poly.ser_mul(inv_1x, inv_1x, nterms), inv_u2, nterms)
    return a2, b1, v


def taylor_operators(ntilde, p: int, case: str, q_max: int):
    """Operator Taylor terms for q = 0..q_max as ``{"-": [...], "+": [...]}``.

    The exterior list is empty in case C (no interface at the anchor).
    """
    if case not in ("A", "B", "C"):
        raise UnsupportedCase(f"case {case!r}")
    need = required_derivatives(case, q_max)
    if len(ntilde) < need + 1:
        raise InsufficientDerivatives(f"case {case} to order {q_max} needs derivatives up to {need}, got {len(ntilde) - 1}")
    n0 = ntilde[0]
    one = n0 / n0
    zero = 0 * one
    a2, b1, v = coefficient_series(ntilde, p, need + 1)

    minus = []
    for q in range(q_max + 1):
        if case == "A":
            if q % 2:
                minus.append(_zero_term(zero))
                continue
            k = q // 2
            A2 = _poly.monomial(-a2[k], k)
            A1 = _poly.monomial(-b1[k - 1], k - 1) if k >= 1 else [zero]
            A0 = _poly.monomial(v[k + 1], k + 1)
        else:
            A2 = _poly.monomial(-a2[q], q)
            A1 = _poly.monomial(-b1[q - 1], q - 1) if q >= 1 else [zero]
            # v[1] is -2 kappa, dropped: it vanishes in cases B and C
            A0 = _poly.monomial(v[q + 2], q + 2)
        minus.append(OperatorTaylorTerm(A2, A1, A0))

    plus = []
    if case != "C":
        step = 3 if case == "A" else 2
        n0sq = n0 * n0
        for q in range(q_max + 1):
            if q % step:
                plus.append(_zero_term(zero))
                continue
            k = q // step
            if k == 0:
                plus.append(OperatorTaylorTerm([-n0sq], [zero], [n0sq - one]))
            else:
                # -n0^2 h/(1+h rho) d  and  n0^2/(1+h rho)^2, coefficient of h^k
                sign = one if k % 2 == 0 else -one
                plus.append(
                    OperatorTaylorTerm([zero], _poly.monomial(n0sq * sign, k - 1), _poly.monomial(n0sq * (k + 1) * sign, k))
                )
    return {"-": minus, "+": plus}
