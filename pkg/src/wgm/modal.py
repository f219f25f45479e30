"""Exact resonances of a homogeneous disk from the Bessel/Hankel modal equation.

Roots are counted with the argument principle on rectangular boxes, boxes are
bisected until each holds one root, the root is located from the first moment
of F'/F and polished by Newton on the raw modal function.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryRootSuspected,
    MatchingDenominatorTiny,
    MaxSubdivisionExceeded,
    PreconditionError,
    QuadratureNotConverged,
)
from .specfun import bessel_jy_array, hankel1_array

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_BOUNDARY_TOL = 1e-13


@dataclass(frozen=True)
class Resonance:
    k: complex
    m: int
    p: int
    j: int | None = None
    provenance: str = "modal"
    multiplicity: int = 2
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def q_factor(self) -> float:
        im = abs(self.k.imag)
        return math.inf if im == 0 else self.k.real / im

    @property
    def log10_abs_im_k(self) -> float:
        im = abs(self.k.imag)
        return -math.inf if im == 0 else math.log10(im)

    def to_dict(self):
        return {
            "m": self.m, "j": self.j, "p": self.p,
            "re_k": self.k.real, "im_k": self.k.imag,
            "log10_abs_im_k": self.log10_abs_im_k, "q_factor": self.q_factor,
            "provenance": self.provenance, "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class SearchBox:
    re_range: tuple
    im_range: tuple
    max_depth: int = 40
    newton_tol: float = 1e-12

    def __post_init__(self):
        a, b = self.re_range
        c, d = self.im_range
        if not (0 < a < b):
            raise PreconditionError("real range must be positive and increasing")
        if not (c < d <= 0):
            raise PreconditionError("imaginary range must be increasing and non-positive")

    def contains(self, k):
        return self.re_range[0] <= k.real <= self.re_range[1] and self.im_range[0] <= k.imag <= self.im_range[1]

    def split(self, frac=0.5):
        (a, b), (c, d) = self.re_range, self.im_range
        kw = dict(max_depth=self.max_depth, newton_tol=self.newton_tol)
        if (b - a) >= (d - c):
            s = a + frac * (b - a)
            return SearchBox((a, s), (c, d), **kw), SearchBox((s, b), (c, d), **kw)
        s = c + frac * (d - c)
        return SearchBox((a, b), (c, s), **kw), SearchBox((a, b), (s, d), **kw)


def default_box(m, n0, R=1.0) -> SearchBox:
    base = m / (R * n0)
    return SearchBox((0.9 * base, 1.6 * base), (-1.2, -1e-14))


# ---------------------------------------------------------------------------
# modal function


def _parts(p, n0, R, m, k):
    m = abs(int(m))
    k = np.asarray(k, dtype=complex)
    j, dj, _, _ = bessel_jy_array(m, n0 * R * k, want_y=False)
    h, dh = hankel1_array(m, R * k)
    return m, k, j, dj, h, dh


def modal_function(p, n0, R, m, k, normalized=False):
    """n0^p J'_m(n0 R k) H_m(R k) - J_m(n0 R k) H'_m(R k).

    ``normalized`` divides by the sum of the two term magnitudes.  Accepts
    scalar or array ``k``; m and -m give the same value.
    """
    _, _, j, dj, h, dh = _parts(p, n0, R, m, k)
    a = n0**p * dj * h
    b = j * dh
    f = a - b
    if normalized:
        f = f / (np.abs(a) + np.abs(b))
    return f if np.ndim(k) else complex(f)


def modal_derivative(p, n0, R, m, k):
    """Analytic dF/dk, second derivatives from Bessel's equation."""
    m, k, j, dj, h, dh = _parts(p, n0, R, m, k)
    z1, z2 = n0 * R * k, R * k
    d2j = -dj / z1 - (1 - m * m / z1**2) * j
    d2h = -dh / z2 - (1 - m * m / z2**2) * h
    out = n0**p * (n0 * R * d2j * h + R * dj * dh) - (n0 * R * dj * dh + R * j * d2h)
    return out if np.ndim(k) else complex(out)


# ---------------------------------------------------------------------------
# argument principle


def _logderiv(p, n0, R, m, k):
    # fourth-order central differences with a relative step
    h = 1e-6 * np.abs(k)
    pts = np.concatenate([k - 2 * h, k - h, k + h, k + 2 * h, k])
    f = modal_function(p, n0, R, m, pts)
    fm2, fm1, fp1, fp2, f0 = np.split(f, 5)
    dF = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    return dF / f0


def _edge(p, n0, R, m, z0, z1, tol, depth=0):
    """Integrals of F'/F and k F'/F along the segment z0 -> z1."""

    def panel(a, b):
        x = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
        g = _logderiv(p, n0, R, m, x)
        return 0.5 * (b - a) * np.array([g @ _GL_W, (x * g) @ _GL_W])

    stack = [(z0, z1, panel(z0, z1), 0)]
    total = np.zeros(2, dtype=complex)
    while stack:
        a, b, whole, d = stack.pop()
        mid = 0.5 * (a + b)
        left, right = panel(a, mid), panel(mid, b)
        if abs((left + right - whole)[0]) <= tol * max(1.0, abs(b - a)):
            total += left + right
            continue
        if d >= 60:
            raise QuadratureNotConverged(f"edge {a}..{b} did not converge")
        stack.append((a, mid, left, d + 1))
        stack.append((mid, b, right, d + 1))
    return total


def _check_boundary(p, n0, R, m, box):
    (a, b), (c, d) = box.re_range, box.im_range
    t = np.linspace(0, 1, 65)
    ring = np.concatenate([a + t * (b - a) + 1j * c, b + 1j * (c + t * (d - c)),
                           b - t * (b - a) + 1j * d, a + 1j * (d - t * (d - c))])
    f = modal_function(p, n0, R, m, ring, normalized=True)
    if np.min(np.abs(f)) < _BOUNDARY_TOL:
        raise BoundaryRootSuspected(f"|F| below {_BOUNDARY_TOL} on the boundary of {box}")


def _moments(p, n0, R, m, box, tol=1e-8):
    (a, b), (c, d) = box.re_range, box.im_range
    corners = [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]
    _check_boundary(p, n0, R, m, box)
    tot = np.zeros(2, dtype=complex)
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        tot += _edge(p, n0, R, m, z0, z1, tol)
    return tot / (2j * math.pi)


def count_zeros(p, n0, R, m, box: SearchBox) -> int:
    """Number of modal roots inside ``box`` by the argument principle."""
    n = _moments(p, n0, R, m, box)[0]
    count = round(n.real)
    if abs(n - count) > 0.05:
        raise QuadratureNotConverged(f"winding number {n} is not an integer")
    return int(count)


def _nudged(box, p, n0, R, m):
    # shrink the box slightly until the boundary is clear of roots
    for eps in (1e-7, 1e-6, 1e-5, 1e-4):
        (a, b), (c, d) = box.re_range, box.im_range
        w, h = b - a, d - c
        nb = SearchBox((a + eps * w, b - eps * w), (c + eps * h, d - eps * h), box.max_depth, box.newton_tol)
        try:
            return nb, _moments(p, n0, R, m, nb)
        except BoundaryRootSuspected:
            continue
    raise BoundaryRootSuspected(f"could not move the boundary of {box} off a root")


def newton(p, n0, R, m, k, tol=1e-12, maxit=50) -> complex:
    k = complex(k)
    for _ in range(maxit):
        step = modal_function(p, n0, R, m, k) / modal_derivative(p, n0, R, m, k)
        k -= step
        if abs(step) <= tol * abs(k):
            return k
    log.warning("Newton stopped after %d steps at k=%s", maxit, k)
    return k


def find_resonances(p, n0, R, m, box: SearchBox | None = None) -> list[Resonance]:
    """All modal roots in ``box`` (default: the WGM window), sorted by Re k."""
    if int(m) != m:
        raise PreconditionError("m must be an integer")
    box = box or default_box(abs(m), n0, R)
    try:
        mom = _moments(p, n0, R, m, box)
    except BoundaryRootSuspected:
        box, mom = _nudged(box, p, n0, R, m)
    roots = []
    _descend(p, n0, R, m, box, mom, 0, roots)
    roots.sort(key=lambda z: (z.real, z.imag))
    return [Resonance(k, abs(int(m)), p, multiplicity=2 if m else 1) for k in roots]


def _descend(p, n0, R, m, box, mom, depth, out):
    n = int(round(mom[0].real))
    if abs(mom[0] - n) > 0.05:
        raise QuadratureNotConverged(f"winding number {mom[0]} is not an integer")
    if n == 0:
        return
    if n == 1:
        guess = mom[1] / mom[0]
        k = newton(p, n0, R, m, guess, box.newton_tol)
        if not box.contains(k) or abs(k - guess) > 1e-4 * abs(guess):
            k = guess if box.contains(guess) else k
        out.append(k)
        return
    if depth >= box.max_depth:
        raise MaxSubdivisionExceeded(f"{n} roots left in {box} at depth {depth}")
    for frac in (0.5, 0.5 + 1 / 97, 0.5 - 1 / 89, 0.5 + 1 / 13, 0.5 - 1 / 11):
        halves = box.split(frac)
        try:
            moms = [_moments(p, n0, R, m, h) for h in halves]
        except BoundaryRootSuspected:
            continue
        counts = [int(round(x[0].real)) for x in moms]
        if sum(counts) == n:
            for h, x in zip(halves, moms):
                _descend(p, n0, R, m, h, x, depth + 1, out)
            return
    raise MaxSubdivisionExceeded(f"subdivision of {box} keeps losing roots")


def find_mode(p, n0, R, m, j, npts=4000) -> Resonance:
    """The inner root with radial index j, Newton-seeded from the asymptotics.

    Falls back to a box search when the seeded root has the wrong index.
    """
    from .asymptotics.explicit import constant_index_expansion

    m = abs(int(m))
    if m < 1:
        raise PreconditionError("m must be >= 1")
    r = np.linspace(R / npts, R, npts)
    seed = constant_index_expansion(n0, R, p, j, corrected=True)(m, 6)
    k = newton(p, n0, R, m, seed)
    if k.imag < 0 and radial_index(mode_field(p, n0, R, m, k, r)) == j:
        return Resonance(k, m, p, j)
    base = m / (R * n0)
    hi = base * 1.6 + (j + 2) * math.pi / (R * n0)
    cands = label_radial_indices(find_resonances(p, n0, R, m, SearchBox((0.5 * base, hi), (-1.2, -1e-14))), n0, R)
    inner, _ = classify_inner_outer(cands, p, n0, R)
    hits = [c for c in inner if c.j == j]
    if not hits:
        raise MaxSubdivisionExceeded(f"no inner root with j = {j} for m = {m}")
    return hits[0]


# ---------------------------------------------------------------------------
# modes and labelling


def mode_field(p, n0, R, m, k, r):
    """J_m(n0 k r) inside, continued outside by the matched outgoing Hankel wave."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise PreconditionError("grid must lie in (0, r_max]")
    m = abs(int(m))
    k = complex(k)
    jR, _, _, _ = bessel_jy_array(m, np.array([n0 * k * R]), want_y=False)
    hR, _ = hankel1_array(m, np.array([k * R]))
    if abs(hR[0]) < 1e-250 or abs(hR[0]) < 1e-14 * abs(jR[0]):
        raise MatchingDenominatorTiny(f"|H_m(kR)| = {abs(hR[0]):.3g} is too small")
    out = np.empty(r.shape, dtype=complex)
    inside = r <= R
    if np.any(inside):
        out[inside] = bessel_jy_array(m, n0 * k * r[inside], want_y=False)[0]
    if np.any(~inside):
        out[~inside] = jR[0] / hR[0] * hankel1_array(m, k * r[~inside])[0]
    return out


def radial_index(w, r=None, R=None, floor=1e-8) -> int:
    """Sign changes of Re w on (0, R), ignoring samples below ``floor`` * max."""
    from .errors import GridTooCoarse

    w = np.real(np.asarray(w))
    if r is not None and R is not None:
        w = w[np.asarray(r) < R]
    if w.size == 0:
        return 0
    big = np.abs(w) > floor * np.max(np.abs(w))
    s = np.sign(w[big])
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    if changes and w.size < 10 * (changes + 1):
        raise GridTooCoarse(f"{w.size} samples for {changes} sign changes")
    return changes


INNER_THRESHOLD = 0.5


def intensity_ratio(p, n0, R, m, k, npts=4001) -> float:
    """Mean |w|^2 per unit area on the disk over the same on R < r <= 2R.

    The outgoing exponential growth exp(|Im k| r) is divided out of the
    exterior field first; otherwise every leaky mode would look outer.
    """
    r_in = np.linspace(R * 1e-6, R, npts)
    r_out = np.linspace(R, 2 * R, npts)
    w_in = mode_field(p, n0, R, m, k, r_in)
    w_out = mode_field(p, n0, R, m, k, r_out) * np.exp(complex(k).imag * (r_out - R))
    mi = np.trapezoid(np.abs(w_in) ** 2 * r_in, r_in) / (0.5 * R**2)
    mo = np.trapezoid(np.abs(w_out) ** 2 * r_out, r_out) / (1.5 * R**2)
    return float(mi / mo)


def classify_inner_outer(resonances, p, n0, R=1.0):
    """Split into (inner, outer) lists by ``intensity_ratio`` >= INNER_THRESHOLD."""
    inner, outer = [], []
    for res in resonances:
        if not isinstance(res, Resonance):
            raise PreconditionError("classify_inner_outer expects Resonance objects")
        try:
            ratio = intensity_ratio(p, n0, R, res.m, res.k)
        except MatchingDenominatorTiny:
            outer.append(res)
            continue
        (inner if ratio >= INNER_THRESHOLD else outer).append(res)
    return inner, outer


def label_radial_indices(resonances, n0, R=1.0, npts=4000):
    """Attach j = radial_index of the interior mode to each resonance."""
    out = []
    r = np.linspace(R / npts, R, npts)
    for res in resonances:
        w = mode_field(res.p, n0, R, res.m, res.k, r)
        out.append(Resonance(res.k, res.m, res.p, radial_index(w), res.provenance, res.multiplicity))
    return out


def large_j_asymptote(p, n0, R, m, j) -> complex:
    """Leading large-j behaviour; its imaginary part depends on n0 and R only."""
    if j < 1:
        raise PreconditionError("j must be >= 1")
    re = j * math.pi / (R * n0) + (2 * m + 2 - p) * math.pi / (4 * R * n0)
    im = math.log((n0 - 1) / (n0 + 1)) / (2 * R * n0)
    return complex(re, im)


# ---------------------------------------------------------------------------
# export

CSV_COLUMNS = ("m", "j", "p", "re_k", "im_k", "log10_abs_im_k", "q_factor", "provenance")


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def resonances_to_csv(resonances, fh=None) -> str:
    buf = fh or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for res in sorted(resonances, key=lambda z: (z.p, -1 if z.j is None else z.j, z.m, z.k.real)):
        d = res.to_dict()
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue() if fh is None else ""


def resonances_to_json(resonances) -> str:
    return json.dumps([r.to_dict() for r in resonances], indent=2)
