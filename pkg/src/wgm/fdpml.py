"""Finite-difference resonance solver with complex scaling.

The radial problem -(1/r)(n^(p-1) r w')' + n^(p-1) m^2/r^2 w = k^2 n^(p+1) w is
written in the stretched coordinate rt(r) = r (r <= r_pml),
r_pml + e^(i theta)(r - r_pml) beyond, multiplied by rt * drt/dr, and
discretised in flux form on a uniform grid that has R and r_pml as nodes.
The result is a complex-symmetric tridiagonal pencil (A, B) with B diagonal.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eig, lapack, qr

from .cavity import IndexProfile
from .errors import (
    FactorizationSingular,
    GridMisaligned,
    GridTooCoarse,
    InvalidParameters,
    NoConvergence,
    NonMonotoneConvergence,
    UnsupportedM,
)
from .modal import Resonance, radial_index

log = logging.getLogger(__name__)

MIN_POINTS = 500
IM_FLOOR = 1e-13
NOISE_FLOOR = 1e-9


@dataclass(frozen=True)
class RadialGrid:
    R: float
    N: int
    r_max: float
    pml_start: float
    theta: float = 0.5

    def __post_init__(self):
        if self.N < MIN_POINTS:
            raise GridTooCoarse(f"N = {self.N} < {MIN_POINTS}")
        if not 0 < self.theta < math.pi / 3:
            raise InvalidParameters("scaling angle must lie in (0, pi/3)")
        if self.pml_start < 1.2 * self.R * (1 - 1e-12) or self.pml_start >= self.r_max:
            raise InvalidParameters("need 1.2 R <= pml_start < r_max")
        for name, x in (("R", self.R), ("pml_start", self.pml_start)):
            if abs(x / self.spacing - round(x / self.spacing)) > 1e-9:
                raise GridMisaligned(f"{name} = {x} is not a grid node")

    @property
    def spacing(self):
        return self.r_max / self.N

    @property
    def nodes(self):
        return self.spacing * np.arange(self.N + 1)

    def refined(self, factor=2):
        return replace(self, N=self.N * factor)

    def stretched(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.pml_start, r + 0j, self.pml_start + cmath.exp(1j * self.theta) * (r - self.pml_start))

    def metric(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.pml_start, 1.0 + 0j, cmath.exp(1j * self.theta))


def make_grid(R=1.0, N=4000, r_max=None, pml_start=None, theta=0.5) -> RadialGrid:
    """Uniform grid with about N intervals, snapped so that R and pml_start are nodes."""
    r_max = 3.0 * R if r_max is None else r_max
    pml_start = 1.5 * R if pml_start is None else pml_start
    n_R = max(1, round(N * R / r_max))
    h = R / n_R
    return RadialGrid(R, int(round(r_max / h)), round(r_max / h) * h, round(pml_start / h) * h, theta)


@dataclass
class DiscreteEVP:
    """A w = k^2 B w on interior nodes; A tridiagonal (dl, d, du), B diagonal."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    weight: np.ndarray
    grid: RadialGrid
    p: int
    m: int

    def matvec(self, x):
        y = self.diag * x
        y[1:] += self.lower * x[:-1]
        y[:-1] += self.upper * x[1:]
        return y


def _coefficients(profile, p, r, side):
    # a = n^(p-1), b = n^(p+1); side picks the one-sided limit at r = R
    n = np.asarray(profile.eval(r), dtype=float)
    if side is not None:
        at = np.isclose(r, profile.R, rtol=0, atol=1e-12 * profile.R)
        n = np.where(at, profile.n0 if side == "-" else 1.0, n)
    return n ** (p - 1), n ** (p + 1)


def assemble(profile: IndexProfile, p: int, m: int, grid: RadialGrid) -> DiscreteEVP:
    """Flux-form pencil; Dirichlet at r = 0 and r = r_max."""
    if m == 0:
        raise UnsupportedM("m = 0 needs a Neumann condition at the origin")
    if p not in (1, -1):
        raise InvalidParameters("p must be +1 or -1")
    if abs(grid.R - profile.R) > 1e-12 * profile.R:
        raise GridMisaligned("grid and profile radii differ")
    h = grid.spacing
    r = grid.nodes[1:-1]
    half = grid.spacing * (np.arange(grid.N) + 0.5)
    a_half, _ = _coefficients(profile, p, half, None)
    # midpoint metric; no midpoint sits on r_pml since it is a node
    flux = a_half * grid.stretched(half) / grid.metric(half) / h**2

    # node terms are cell averages of the two half cells
    a_l, b_l = _coefficients(profile, p, r, "-")
    a_r, b_r = _coefficients(profile, p, r, "+")
    rt = grid.stretched(r)
    s_l = grid.metric(r - 0.25 * h)
    s_r = grid.metric(r + 0.25 * h)
    pot = 0.5 * m * m * (a_l * s_l + a_r * s_r) / rt
    wt = 0.5 * rt * (b_l * s_l + b_r * s_r)

    diag = flux[:-1] + flux[1:] + pot
    off = -flux[1:-1]
    return DiscreteEVP(off.copy(), diag, off.copy(), wt, grid, p, abs(int(m)))


def _factor(evp, shift):
    dl, d, du, du2, ipiv, info = lapack.zgttrf(evp.lower, evp.diag - shift * evp.weight, evp.upper)
    if info != 0:
        raise FactorizationSingular(f"zgttrf info = {info} at shift {shift}")
    pivmin = np.min(np.abs(d)) / max(np.max(np.abs(d)), 1e-300)
    if pivmin < 1e-15:
        raise FactorizationSingular(f"pivot collapse ({pivmin:.2e}) at shift {shift}")
    return dl, d, du, du2, ipiv


def _solve(fact, rhs):
    dl, d, du, du2, ipiv = fact
    x, info = lapack.zgttrs(dl, d, du, du2, ipiv, rhs)
    if info != 0:
        raise FactorizationSingular(f"zgttrs info = {info}")
    return x


def _ritz(evp, X):
    Q, _ = qr(X, mode="economic")
    AQ = np.column_stack([evp.matvec(q) for q in Q.T])
    BQ = evp.weight[:, None] * Q
    vals, vecs = eig(Q.conj().T @ AQ, Q.conj().T @ BQ)
    return vals, Q @ vecs


def solve_near(evp: DiscreteEVP, shift: complex, count: int = 1, tol=1e-13, maxit=200, shift_updates=3):
    """The ``count`` eigenpairs (k^2, w) of A w = k^2 B w nearest ``shift``.

    Block inverse iteration on the tridiagonal LU of A - shift B with
    Rayleigh-Ritz extraction; for count = 1 the shift is moved onto the
    current estimate up to ``shift_updates`` times.  Eigenvectors are scaled
    so that w^T B w = 1 (unconjugated, the pencil is complex symmetric).
    """
    shift = complex(shift)
    block = count + 2
    rng = np.random.default_rng(12345)
    n = evp.diag.size
    X = rng.standard_normal((n, block)) + 0j
    updates = 0
    for attempt in range(4):
        try:
            fact = _factor(evp, shift)
            break
        except FactorizationSingular:
            shift *= 1 + 1e-9 * (attempt + 1)
    else:
        raise FactorizationSingular(f"cannot factor near {shift}")
    prev = None
    last_step = math.inf
    for _ in range(maxit):
        X = _solve(fact, evp.weight[:, None] * X)
        vals, vecs = _ritz(evp, X)
        order = np.argsort(np.abs(vals - shift))[:count]
        vals, vecs = vals[order], vecs[:, order]
        X = np.column_stack([vecs, X[:, : block - count]])
        step = math.inf if prev is None else float(np.max(np.abs(vals - prev) / np.abs(vals)))
        # on fine grids the Ritz values stall at a roundoff floor above tol
        stalled = step < NOISE_FLOOR and step >= 0.5 * last_step
        last_step = step
        if prev is not None and (step <= tol or stalled):
            if count == 1 and updates < shift_updates and abs(vals[0] - shift) > 1e-10 * abs(vals[0]):
                shift = vals[0] * (1 + 1e-12)
                fact = _factor(evp, shift)
                updates += 1
                prev = None
                last_step = math.inf
                continue
            return [(complex(v), _b_normalise(evp, w)) for v, w in zip(vals, vecs.T)]
        prev = vals
    raise NoConvergence(f"inverse iteration did not settle near {shift}")


def _b_normalise(evp, w):
    c = np.sqrt(np.sum(evp.weight * w * w))
    w = w / c
    # only the sign is free once w^T B w = 1
    i = np.argmax(np.abs(w))
    return -w if w[i].real < 0 else w


def k_from_eig(lam) -> complex:
    k = cmath.sqrt(lam)
    return k if k.real > 0 else -k


@dataclass(frozen=True)
class FDResult:
    resonance: Resonance
    levels: tuple
    k_levels: tuple
    consistency: float
    im_resolved: bool


def refine_extrapolated(profile: IndexProfile, p, m, seed_k, grid: RadialGrid | None = None, levels=3,
                        j=None) -> FDResult:
    """Richardson extrapolation of k over N, 2N, 4N, ... assuming O(h^2) error.

    ``seed_k`` is a guess for k (not k^2).  ``consistency`` is the distance
    between the two highest-level extrapolants.
    """
    if levels < 3:
        raise InvalidParameters("need at least three grid levels")
    grid = grid or make_grid(profile.R)
    ks, Ns = [], []
    shift = complex(seed_k) ** 2
    for level in range(levels):
        g = grid.refined(2**level)
        evp = assemble(profile, p, m, g)
        lam, _ = solve_near(evp, shift, 1)[0]
        ks.append(k_from_eig(lam))
        Ns.append(g.N)
        shift = lam
    d1 = [ks[i + 1] - ks[i] for i in range(levels - 1)]
    for a, b in zip(d1, d1[1:]):
        ratio = abs(a) / max(abs(b), 1e-300)
        if not 2.0 < ratio < 8.0 and abs(b) > 1e-12 * abs(ks[-1]):
            raise NonMonotoneConvergence(f"successive differences shrink by {ratio:.3g}, expected about 4")
    # Richardson table
    table = [list(ks)]
    for lev in range(1, levels):
        prev = table[-1]
        f = 4**lev
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)])
    best = table[-1][-1]
    consistency = abs(table[-2][-1] - table[-2][-2]) if len(table[-2]) > 1 else math.nan
    resolved = abs(best.imag) >= IM_FLOOR * best.real
    if not resolved:
        log.warning("Im k = %.3g is below the double-precision floor", best.imag)
    res = Resonance(best, abs(int(m)), p, j, "fd", extra={"consistency": consistency, "im_resolved": resolved})
    return FDResult(res, tuple(Ns), tuple(ks), consistency, resolved)


def fd_mode_profile(w, grid: RadialGrid):
    """(r, Re w, radial index) on the physical region r <= pml_start."""
    r = grid.nodes[1:-1]
    keep = r <= grid.pml_start
    w = np.asarray(w)[keep]
    r = r[keep]
    re = np.real(w / w[np.argmax(np.abs(w))])
    return r, re, radial_index(re, r, grid.R)


def mass_fraction(evp: DiscreteEVP, w, lo, hi):
    """B-weighted |w|^2 fraction on [lo, hi] within the physical region."""
    r = evp.grid.nodes[1:-1]
    phys = r <= evp.grid.pml_start
    dens = np.abs(evp.weight) * np.abs(w) ** 2
    sel = phys & (r >= lo) & (r <= hi)
    return float(dens[sel].sum() / dens[phys].sum())
