"""Radial index profiles, the effective potential W = (r n)^-2 and the
classification of the potential well into cases A, B and C.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (
    ConfigError,
    DegenerateWell,
    IndexNotAboveUnity,
    InsufficientDerivatives,
    InvalidParameters,
    NoInteriorMinimum,
    NonPositiveRadius,
)

log = logging.getLogger(__name__)

FAMILIES = ("constant", "ilchenko", "fisheye", "quadratic", "table")
KAPPA_TOL = 1e-9

# step per derivative order for the Richardson central differences used on
# user callables; a single step cannot serve orders 1 through 4
_FD_STEPS = {1: 1e-4, 2: 1e-3, 3: 5e-3, 4: 1e-2}


def _falling(a, q):
    out = 1.0
    for i in range(q):
        out *= a - i
    return out


def _central(f, r, q, h):
    if q == 1:
        return (f(r + h) - f(r - h)) / (2 * h)
    if q == 2:
        return (f(r + h) - 2 * f(r) + f(r - h)) / h**2
    if q == 3:
        return (f(r + 2 * h) - 2 * f(r + h) + 2 * f(r - h) - f(r - 2 * h)) / (2 * h**3)
    return (f(r + 2 * h) - 4 * f(r + h) + 6 * f(r) - 4 * f(r - h) + f(r - 2 * h)) / h**4


def richardson_derivative(f, r, q, h):
    """q-th derivative (q <= 4) by central differences with one Richardson step."""
    if q == 0:
        return f(r)
    if q > 4:
        raise InsufficientDerivatives(f"finite-difference derivatives stop at order 4, asked {q}")
    return (4 * _central(f, r, q, h / 2) - _central(f, r, q, h)) / 3


@dataclass(frozen=True)
class IndexProfile:
    """Radial index n(r): ``inner`` is the smooth interior law, n = 1 for r > R.

    ``inner(r, q)`` returns the q-th derivative of the interior law and may be
    evaluated slightly beyond R, which is how limits from inside are taken.
    """

    R: float
    family: str
    params: dict
    inner: Callable = field(repr=False, compare=False)
    max_derivative: int = 64

    def __call__(self, r):
        return self.eval(r)

    def eval(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.R, self.inner(np.minimum(r, self.R), 0), 1.0)
        return out if out.ndim else float(out)

    def deriv(self, r, q):
        """q-th derivative of n; at r = R this is the limit from inside."""
        if q > self.max_derivative:
            raise InsufficientDerivatives(f"profile {self.family!r} provides derivatives up to {self.max_derivative}")
        r = np.asarray(r, dtype=float)
        val = self.inner(r, q)
        out = np.where(r <= self.R, val, 1.0 if q == 0 else 0.0)
        return out if out.ndim else float(out)

    @property
    def n0(self):
        return float(self.inner(np.asarray(self.R), 0))

    def scaled_derivatives(self, anchor, qmax):
        """[R_a^q n^(q)(R_a) for q = 0..qmax] at the anchor radius R_a."""
        return [anchor**q * float(self.inner(np.asarray(anchor), q)) for q in range(qmax + 1)]

    def to_dict(self):
        return {"family": self.family, "R": self.R, **self.params}

    def rescaled(self, factor):
        """Same profile with all lengths multiplied by ``factor``."""
        d = self.to_dict()
        d["R"] = self.R * factor
        if self.family == "ilchenko":
            d["delta"] = self.params["delta"] / factor
        elif self.family == "quadratic":
            d["beta"] = self.params["beta"] / factor**2
        elif self.family == "table":
            d["r"] = [x * factor for x in self.params["r"]]
        elif self.family == "callable":
            inner = self.inner
            return IndexProfile(self.R * factor, "callable", dict(self.params),
                                lambda r, q, s=factor: inner(np.asarray(r) / s, q) / s**q,
                                self.max_derivative)
        return profile_from_dict(d)


# ---------------------------------------------------------------------------
# builtin families


def _require(cond, msg):
    if not cond:
        raise InvalidParameters(msg)


def constant(n0, R=1.0):
    _require(R > 0, "R must be positive")
    _require(n0 > 1, "n0 must exceed 1")

    def inner(r, q):
        r = np.asarray(r, dtype=float)
        return np.full(r.shape, float(n0)) if q == 0 else np.zeros(r.shape)

    return IndexProfile(float(R), "constant", {"n0": float(n0)}, inner)


def ilchenko(n0, delta, R=1.0):
    """n(r) = n0 sqrt(1 + delta (R - r))."""
    _require(R > 0, "R must be positive")
    _require(n0 > 1, "n0 must exceed 1")
    _require(n0**2 * (1 + delta * R) > 1 and n0**2 > 1, "index must exceed 1 on [0, R]")

    def inner(r, q):
        u = 1.0 + delta * (R - np.asarray(r, dtype=float))
        return n0 * (-delta) ** q * _falling(0.5, q) * u ** (0.5 - q)

    return IndexProfile(float(R), "ilchenko", {"n0": float(n0), "delta": float(delta)}, inner)


def fisheye(alpha, R=1.0):
    """Maxwell fish-eye n(r) = alpha / (1 + r^2/R^2), alpha > 2."""
    _require(R > 0, "R must be positive")
    _require(alpha > 2, "alpha must exceed 2 so that n(R) > 1")

    def inner(r, q):
        s = np.asarray(r, dtype=float) / R + 0j
        # 1/(1+s^2) = (1/2i) (1/(s-i) - 1/(s+i))
        d = (-1) ** q * math.factorial(q) * ((s - 1j) ** (-q - 1) - (s + 1j) ** (-q - 1)) / 2j
        return alpha * d.real / R**q

    return IndexProfile(float(R), "fisheye", {"alpha": float(alpha)}, inner)


def quadratic(alpha, beta, R=1.0):
    """Quadratic-glass profile n(r) = alpha - beta r^2 / 2."""
    _require(R > 0, "R must be positive")
    _require(min(alpha, alpha - beta * R**2 / 2) > 1, "index must exceed 1 on [0, R]")

    def inner(r, q):
        r = np.asarray(r, dtype=float)
        if q == 0:
            return alpha - 0.5 * beta * r * r
        if q == 1:
            return -beta * r
        if q == 2:
            return np.full(r.shape, -float(beta))
        return np.zeros(r.shape)

    return IndexProfile(float(R), "quadratic", {"alpha": float(alpha), "beta": float(beta)}, inner)


def table(r, n, R=None):
    """Sampled profile with monotone cubic (PCHIP) interpolation."""
    r = np.asarray(r, dtype=float)
    n = np.asarray(n, dtype=float)
    _require(r.ndim == 1 and r.shape == n.shape and r.size >= 2, "table needs matching r and n lists")
    _require(np.all(np.diff(r) > 0), "table radii must increase")
    R = float(r[-1]) if R is None else float(R)
    _require(R > 0 and r[0] <= 0 + 1e-12 * R and abs(r[-1] - R) <= 1e-12 * R, "table must span [0, R]")
    _require(np.all(n > 1), "index must exceed 1 on [0, R]")
    interp = PchipInterpolator(r, n, extrapolate=True)
    derivs = [interp] + [interp.derivative(q) for q in (1, 2, 3)]

    def inner(x, q):
        x = np.asarray(x, dtype=float)
        return derivs[q](x) if q <= 3 else np.zeros(x.shape)

    return IndexProfile(R, "table", {"r": r.tolist(), "n": n.tolist()}, inner, max_derivative=4)


def from_callable(n, R, derivative: Callable | None = None):
    """Profile from a user function n(r) (the interior law, smooth past R).

    Without ``derivative(r, q)``, derivatives up to order 4 come from
    Richardson-extrapolated central differences.
    """
    _require(R > 0, "R must be positive")
    if derivative is not None:
        def inner(r, q):
            r = np.asarray(r, dtype=float)
            return np.asarray(n(r) if q == 0 else derivative(r, q), dtype=float) + 0 * r
        return IndexProfile(float(R), "callable", {}, inner)

    def inner(r, q):
        r = np.asarray(r, dtype=float)
        f = lambda x: np.asarray(n(x), dtype=float)  # noqa: E731
        return richardson_derivative(f, r, q, _FD_STEPS.get(q, 1e-2) * R) + 0 * r

    return IndexProfile(float(R), "callable", {}, inner, max_derivative=4)


def builtin_profile(family, **params):
    """Construct a builtin profile by family name."""
    R = params.pop("R", 1.0)
    try:
        if family == "constant":
            return constant(params.pop("n0"), R=R)
        if family == "ilchenko":
            return ilchenko(params.pop("n0"), params.pop("delta", 0.0), R=R)
        if family == "fisheye":
            return fisheye(params.pop("alpha"), R=R)
        if family == "quadratic":
            return quadratic(params.pop("alpha"), params.pop("beta"), R=R)
        if family == "table":
            return table(params.pop("r"), params.pop("n"), R=R if "R" in params else None)
    except KeyError as exc:
        raise InvalidParameters(f"family {family!r} is missing parameter {exc.args[0]!r}") from None
    except TypeError as exc:
        raise InvalidParameters(str(exc)) from None
    raise InvalidParameters(f"unknown family {family!r}; expected one of {FAMILIES}")


def profile_from_dict(d):
    """Parse {"family": ..., "R": ..., params} into a profile."""
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigError('profile must be an object with a "family" field')
    d = dict(d)
    family = d.pop("family")
    if family == "table":
        R = d.pop("R", None)
        try:
            return table(d["r"], d["n"], R=R)
        except KeyError as exc:
            raise InvalidParameters(f"table profile is missing {exc.args[0]!r}") from None
    return builtin_profile(family, **d)


def profile_from_json(text):
    return profile_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# potential and classification


def effective_potential(profile: IndexProfile, r, side=None):
    """W(r) = (r n(r))^-2.  At r = R pass side='-' or '+' for the one-sided limits."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonPositiveRadius("W is defined for r > 0")
    if side == "-":
        n = profile.inner(r, 0)
    elif side == "+":
        n = np.where(r < profile.R, profile.inner(np.minimum(r, profile.R), 0), 1.0)
    else:
        n = profile.eval(r)
    out = 1.0 / (r * n) ** 2
    return out if np.ndim(out) else float(out)


def effective_potential_derivative(profile: IndexProfile, r):
    """W'(r) = -2 W (1/r + n'/n) on (0, R]."""
    r = np.asarray(r, dtype=float)
    n = profile.inner(r, 0)
    dn = profile.inner(r, 1)
    w = 1.0 / (r * n) ** 2
    out = -2.0 * w * (1.0 / r + dn / n)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class WellClassification:
    case: str
    R: float
    n0: float
    kappa_eff: float
    kappa_breve: float
    mu_breve: float
    W0: float
    R0: float | None = None
    n_R0: float | None = None
    mu0_breve: float | None = None
    eta3: float | None = None
    eta4: float | None = None
    other_minima: tuple = ()

    @property
    def anchor_radius(self):
        return self.R0 if self.case == "C" else self.R

    @property
    def anchor(self):
        """1/(R n(R)) for cases A/B, 1/(R0 n(R0)) for case C."""
        if self.case == "C":
            return 1.0 / (self.R0 * self.n_R0)
        return 1.0 / (self.R * self.n0)

    def to_dict(self):
        d = {
            "case": self.case,
            "R": self.R,
            "n0": self.n0,
            "kappa_eff": self.kappa_eff,
            "kappa_breve": self.kappa_breve,
            "mu_breve": self.mu_breve,
            "W0": self.W0,
        }
        if self.case == "C":
            d.update(R0=self.R0, n_R0=self.n_R0, mu0_breve=self.mu0_breve, eta3=self.eta3, eta4=self.eta4)
        if self.other_minima:
            d["other_minima"] = list(self.other_minima)
        return d


def _check_assumption(profile, grid):
    n = profile.inner(grid, 0)
    if np.any(n <= 1):
        raise InvalidParameters("index must exceed 1 on [0, R]")
    # reject interior jumps: a step much larger than the local slope allows
    h = grid[1] - grid[0]
    dn = np.abs(np.diff(n))
    slope = np.abs(profile.inner(0.5 * (grid[1:] + grid[:-1]), 1))
    if np.any(dn > 10 * h * (slope + 1e-8) + 1e-10):
        raise InvalidParameters("profile looks discontinuous inside (0, R)")


def classify(profile: IndexProfile, tolerance: float = KAPPA_TOL) -> WellClassification:
    """Case A/B/C from the sign of the dimensionless curvature at R."""
    R = profile.R
    grid = np.linspace(R * 1e-4, R, 10_001)
    _check_assumption(profile, grid)
    n0 = profile.n0
    n1 = float(profile.inner(np.asarray(R), 1))
    n2 = float(profile.inner(np.asarray(R), 2))
    kappa_eff = 1.0 / R + n1 / n0
    kb = R * kappa_eff
    mu = 2.0 - R**2 * n2 / n0
    common = dict(R=R, n0=n0, kappa_eff=kappa_eff, kappa_breve=kb, mu_breve=mu, W0=1.0 / (R * n0) ** 2)

    if abs(kb) <= tolerance:
        if mu <= 0:
            raise DegenerateWell(f"kappa = 0 with non-positive hessian {mu}")
        return WellClassification("B", **common)
    if kb > 0:
        return WellClassification("A", **common)

    def g(r):
        return 1.0 + r * profile.inner(np.asarray(r), 1) / profile.inner(np.asarray(r), 0)

    gv = g(grid)
    # W' = -(2W/r) g, so minima of W sit where g goes from + to -
    idx = np.flatnonzero((gv[:-1] > 0) & (gv[1:] <= 0))
    if idx.size == 0:
        raise NoInteriorMinimum("no sign change of 1 + r n'/n on (0, R)")
    minima = []
    for i in idx:
        r0 = brentq(lambda r: float(g(r)), grid[i], grid[i + 1], xtol=1e-15 * R, maxiter=200)
        minima.append((float(effective_potential(profile, r0)), r0))
    minima.sort()
    W0, R0 = minima[0]
    others = tuple(r for _, r in minima[1:])
    if others:
        log.warning("multiple interior wells at r = %s; using the lowest, r = %.6g", others, R0)
    nR0 = float(profile.inner(np.asarray(R0), 0))
    d = [R0**q * float(profile.inner(np.asarray(R0), q)) / nR0 for q in range(5)]
    mu0 = 2.0 - d[2]
    if mu0 <= 0:
        raise DegenerateWell(f"interior well at {R0} has non-positive hessian {mu0}")
    common["W0"] = W0
    return WellClassification(
        "C", R0=R0, n_R0=nR0, mu0_breve=mu0, eta3=6.0 + d[3], eta4=24.0 - d[4], other_minima=others, **common
    )


def wkb_action(n_at_R: float) -> tuple[float, float]:
    """Tunnelling action S0 = artanh(T) - T with T = sqrt(1 - n(R)^-2); returns (S0, T)."""
    if not n_at_R > 1:
        raise IndexNotAboveUnity(f"n(R) = {n_at_R} must exceed 1")
    T = math.sqrt(1.0 - 1.0 / n_at_R**2)
    return math.atanh(T) - T, T
