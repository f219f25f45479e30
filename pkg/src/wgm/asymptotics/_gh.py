# Gauss-Hermite coefficient-space calculus: vectors b with f(x) = sum b_i Psi_i(x).
import math

import numpy as np


def pad(b, n):
    out = np.zeros(max(n, len(b)))
    out[: len(b)] = b
    return out


def xmul(b):
    n = len(b)
    out = np.zeros(n + 1)
    i = np.arange(n)
    out[i[1:] - 1] += np.sqrt(i[1:] / 2) * b[1:]
    out[i + 1] += np.sqrt((i + 1) / 2) * b
    return out


def dmul(b):
    n = len(b)
    out = np.zeros(n + 1)
    i = np.arange(n)
    out[i[1:] - 1] += np.sqrt(i[1:] / 2) * b[1:]
    out[i + 1] -= np.sqrt((i + 1) / 2) * b
    return out


def add(a, b):
    n = max(len(a), len(b))
    return pad(a, n) + pad(b, n)


def poly_mul(poly, b, sigma_scale):
    """sum_k poly[k] sigma^k f with sigma = x * sigma_scale."""
    out = np.zeros(1)
    term = np.asarray(b, dtype=float)
    for k, c in enumerate(poly):
        if c != 0:
            out = add(out, float(c) * sigma_scale**k * term)
        if k + 1 < len(poly):
            term = xmul(term)
    return out


def apply_term(term, b, mu):
    """(A2 d^2 + A1 d + A0) in sigma, with x = mu^(1/4) sigma."""
    s = mu ** -0.25
    d1 = dmul(b) * mu**0.25
    d2 = dmul(d1) * mu**0.25
    out = poly_mul(term.A0, b, s)
    out = add(out, poly_mul(term.A1, d1, s))
    return add(out, poly_mul(term.A2, d2, s))


def trim(b, tol=0.0):
    b = np.asarray(b, dtype=float)
    nz = np.flatnonzero(np.abs(b) > tol)
    return b[: nz[-1] + 1] if nz.size else b[:1] * 0


def norm(b):
    return float(np.max(np.abs(b))) if len(b) else 0.0


SQRT2 = math.sqrt(2.0)
