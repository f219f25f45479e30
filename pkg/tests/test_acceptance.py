"""Acceptance criteria, one test (or xfail pair) per criterion part.

Each part records through the ``criterion`` fixture before asserting, so the
terminal summary prints one PASS/FAIL line per criterion.  Run directly with
``python tests/test_acceptance.py``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import case_a_pair, case_c_pair, random_case_a, random_case_c, rel_err
from wgm import specfun
from wgm.asymptotics import case_c_recurrence, constant_index_expansion, expansion, lattice_gaps
from wgm.asymptotics.case_a import case_a_recurrence, degree_report, matching_residuals, residuals
from wgm.cavity import classify, constant, ilchenko, wkb_action
from wgm.fdpml import assemble, k_from_eig, make_grid, refine_extrapolated, solve_near
from wgm.modal import find_mode
from wgm.series import PowerSeries

N0 = 1.5

# homogeneous disk reference values: (m, j) -> (Re k, exponent of |Im k|)
TABLE = {
    (5, 0): (4.64, -0.54), (10, 0): (8.46, -0.92), (20, 0): (15.9, -1.96), (40, 0): (30.1, -4.74),
    (5, 1): (7.08, -0.34), (10, 1): (11.1, -0.45), (20, 1): (18.7, -0.86), (40, 1): (33.6, -2.59),
    (5, 2): (9.36, -0.30), (10, 2): (13.5, -0.35), (20, 2): (21.4, -0.52), (40, 2): (36.6, -1.39),
}

# graded disks at m = 30, j = 0: delta -> (Re k, |Im k|)
GRADED = {0.0: (23.04, 5.2e-4), 2.0: (21.20, 6.4e-6), 4.0: (19.16, 1.2e-8)}


def test_criterion_1_homogeneous_table(criterion):
    t0 = time.perf_counter()
    worst_re = worst_im = 0.0
    for (m, j), (re, expo) in TABLE.items():
        k = find_mode(1, N0, 1.0, m, j).k
        worst_re = max(worst_re, abs(k.real - re) / re)
        worst_im = max(worst_im, abs(math.log10(abs(k.imag)) - expo))
    elapsed = time.perf_counter() - t0
    ok = worst_re <= 0.005 and worst_im <= 0.05 and elapsed < 30
    criterion(1, ok, f"12 cells, max Re dev {100 * worst_re:.2f}%, max log10|Im| dev {worst_im:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_graded_disks_fd(criterion):
    t0 = time.perf_counter()
    notes, ok = [], True
    for delta, (re, im) in GRADED.items():
        prof = ilchenko(N0, delta)
        seed = expansion(prof, 1, 0)(30)
        out = refine_extrapolated(prof, 1, 30, seed, make_grid(1.0, N=4000), levels=3, j=0)
        k = out.resonance.k
        good = abs(k.real - re) <= 0.005 * re and im / 3 <= abs(k.imag) <= 3 * im
        ok &= good and out.levels[0] >= 3999 and out.levels[1:] == (2 * out.levels[0], 4 * out.levels[0])
        notes.append(f"d={delta:g}: {k.real:.4f}{k.imag:+.2e}i")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    criterion(2, ok, ", ".join(notes) + f", {elapsed:.1f}s")
    assert ok


def test_criterion_3_case_a(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = max(np.max(rel_err(*case_a_pair(*random_case_a(rng)))) for _ in range(100))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 10
    criterion(3, ok, f"case A max rel err {worst:.1e} ({elapsed:.1f}s)")
    assert ok


def _case_c_worst(corrected):
    rng = np.random.default_rng(33)
    return max(np.max(rel_err(*case_c_pair(*random_case_c(rng), corrected=corrected))) for _ in range(100))


def test_criterion_3_case_c_corrected_k4(criterion):
    worst = _case_c_worst(True)
    criterion(3, worst < 1e-10, f"case C vs k4 with +5 in the 1/mu0 bracket: {worst:.1e}")
    assert worst < 1e-10


@pytest.mark.xfail(strict=True, reason="uncorrected k4 constant term has the wrong sign")
def test_criterion_3_case_c_uncorrected_k4(criterion):
    worst = _case_c_worst(False)
    criterion(3, worst < 1e-10, f"case C vs uncorrected k4: {worst:.1e}")
    assert worst < 1e-10


def _display_gap(corrected):
    worst = 0.0
    for n0 in (1.2, 1.5, 2.0):
        for p in (1, -1):
            for j in range(3):
                got = np.array(expansion(constant(n0), p, j, order=9).coefficients)
                want = np.array(constant_index_expansion(n0, 1.0, p, j, corrected=corrected).coefficients)
                worst = max(worst, np.max(rel_err(got, want)))
    return worst


def test_criterion_4_corrected_closed_forms(criterion):
    worst = _display_gap(True)
    criterion(4, worst <= 1e-12, f"pipeline vs corrected closed forms {worst:.1e}")
    assert worst <= 1e-12


@pytest.mark.xfail(strict=True, reason="uncorrected TM 7/3 and TE 5/3, 2, 7/3 coefficients disagree with the recurrence")
def test_criterion_4_uncorrected_closed_forms(criterion):
    worst = _display_gap(False)
    criterion(4, worst <= 1e-12, f"pipeline vs uncorrected closed forms {worst:.1e}")
    assert worst <= 1e-12


@pytest.fixture(scope="module")
def homogeneous_j0():
    ms = list(range(20, 61, 5))
    e = expansion(constant(N0), 1, 0)
    ks = [find_mode(1, N0, 1.0, m, 0).k for m in ms]
    errs = [abs(e(m, 6) - k.real) / k.real for m, k in zip(ms, ks)]
    return ms, ks, errs


def test_criterion_5_decay_exponent(criterion, homogeneous_j0):
    ms, _, errs = homogeneous_j0
    slope = -np.polyfit(np.log(ms), np.log(errs), 1)[0]
    criterion(5, slope >= 1.8, f"6-term decay exponent {slope:.2f}")
    assert slope >= 1.8


@pytest.mark.xfail(strict=True, reason="K^6 at m = 60 alone is about 1e-4 relative; the threshold needs m of several hundred")
def test_criterion_5_error_at_60(criterion, homogeneous_j0):
    _, _, errs = homogeneous_j0
    criterion(5, errs[-1] < 1e-5, f"6-term rel err at m=60 {errs[-1]:.2e}")
    assert errs[-1] < 1e-5


def test_criterion_6_wkb_trend(criterion, homogeneous_j0):
    ms, ks, _ = homogeneous_j0
    slope = np.polyfit(ms, np.log([abs(k.imag) for k in ks]), 1)[0]
    S0, _ = wkb_action(N0)
    dev = abs(slope - (-2 * S0)) / (2 * S0)
    criterion(6, dev <= 0.25, f"slope {slope:.4f} vs {-2 * S0:.4f} ({100 * dev:.1f}%)")
    assert dev <= 0.25


def _property_checks():
    out = {}
    # Wronskian and three-term recurrence
    w = max(abs(j * dy - dj * y - 2 / (math.pi * x)) * math.pi * x / 2
            for m in (0, 1, 5, 30) for x in (0.5, 1.0, 5.0, 20.0)
            for j, dj, y, dy in [[a[0] for a in specfun.bessel_jy_array(m, np.array([x]))]])
    out["wronskian"] = w <= 1e-10
    z = np.linspace(0.3, 60, 200) + 0.7j
    J = {n: specfun.bessel_jy_array(n, z, False)[0] for n in (9, 10, 11)}
    out["recurrence"] = np.max(np.abs(J[9] + J[11] - 20 / z * J[10]) / np.abs(J[10])) <= 1e-10
    # mirror Airy ODE: second difference over decreasing steps is second order
    zs = 1.3
    res = []
    for h in (1e-2, 5e-3):
        a = [specfun.airy_mirror(zs + s * h).value for s in (-1, 0, 1)]
        res.append(abs((a[0] - 2 * a[1] + a[2]) / h**2 + zs * a[1]))
    out["airy"] = 3.5 < res[0] / res[1] < 4.5
    # Gauss-Hermite orthonormality
    x, wts = np.polynomial.hermite.hermgauss(90)
    g = specfun.gauss_hermite_table(32, x)[:33] * np.exp(x**2 / 2)
    gram = (g * wts) @ g.T
    out["gh"] = np.max(np.abs(gram - np.eye(33))) <= 1e-12
    # series ring axioms
    rng = np.random.default_rng(7)
    a, b, c = (PowerSeries(Fraction(1, 3), list(rng.uniform(-1, 1, 12))) for _ in range(3))
    out["ring"] = all(abs(u - v) <= 1e-13 for u, v in zip(((a * b) * c).coeffs, (a * (b * c)).coeffs))
    # case A matching and ODE residuals, float mode to q = 8
    sol = case_a_recurrence([1.8, -0.3, 0.4, 0.1, -0.2, 0.3], -1, 1, 8)
    scale = {q: max(1.0, abs(mode[1].P[0])) for q, mode in enumerate(sol.modes)}
    out["matching"] = all(max(abs(cc), abs(dd)) <= 1e-12 * scale[q] for q, (cc, dd) in matching_residuals(sol).items())
    out["ode"] = max(residuals(sol).values()) < 1e-9
    out["psi degree"] = all(dpsi <= q - 1 and p0 == 0 for q, _, p0, _, dpsi in degree_report(sol)[1:])
    # case C solvability
    solc = case_c_recurrence(ilchenko(N0, 4.0).scaled_derivatives(5 / 6, 10), 1, 1, 8)
    out["case C"] = max(solc.solvability) <= 1e-12
    # K^1 = 0 in all three cases
    out["K1"] = all(expansion(prof, p, j).series[1] == 0 for prof in (constant(N0), ilchenko(N0, 2.0), ilchenko(N0, 4.0))
                    for p in (1, -1) for j in range(3))
    # FD scaling-angle and layer independence
    prof = ilchenko(N0, 2.0)
    def k_at(**kw):
        evp = assemble(prof, 1, 20, make_grid(1.0, **kw))
        return k_from_eig(solve_near(evp, 14.2**2)[0][0])
    ref = k_at()
    out["fd"] = all(abs(k_at(**kw) - ref) <= 1e-6 * abs(ref) for kw in ({"theta": 0.3}, {"theta": 0.7}, {"pml_start": 2.0}))
    return out


def test_criterion_7_property_suites(criterion):
    checks = _property_checks()
    ok = all(checks.values())
    criterion(7, ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()))
    assert ok


@pytest.mark.xfail(strict=True, reason="deg P_q and deg Q_q exceed q and q-1 from q = 2 on")
def test_criterion_7_stated_phi_degree_bounds(criterion):
    sol = case_a_recurrence([1.8, -0.3, 0.4, 0.1, -0.2, 0.3, 0.7], 1, 0, 10)
    bad = [q for q, dp, _, dq, _ in degree_report(sol)[1:] if dp > q or dq > q - 1]
    criterion(7, not bad, f"stated phi degree bounds hold for q = 1..10: violated at q = {bad}")
    assert not bad


@pytest.fixture(scope="module")
def case_b_gaps():
    prof = ilchenko(N0, 2.0)
    e0, e1 = expansion(prof, 1, 0, order=4), expansion(prof, 1, 1, order=4)
    return lattice_gaps(e0, e1, 50), classify(prof)


def test_criterion_8_polar_gap(criterion, case_b_gaps):
    g, cls = case_b_gaps
    dev = abs(g.gap_m - 1 / (cls.R * cls.n0)) * cls.R * cls.n0
    criterion(8, dev <= 0.05, f"m-gap {g.gap_m:.5f} vs {1 / (cls.R * cls.n0):.5f} ({100 * dev:.2f}%)")
    assert dev <= 0.05


@pytest.mark.xfail(strict=True, reason="O(m^-1/2) remainder is 0.14 at m = 50; measured gap is about 32% off")
def test_criterion_8_radial_gap(criterion, case_b_gaps):
    g, cls = case_b_gaps
    lead = 2 * math.sqrt(cls.mu_breve) / (cls.R * cls.n0)
    dev = abs(g.gap_j - lead) / lead
    criterion(8, dev <= 0.10, f"j-gap {g.gap_j:.4f} vs {lead:.4f} ({100 * dev:.1f}%)")
    assert dev <= 0.10


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
