"""Acceptance criteria for the exact null-solution library.

One test per criterion, each ending in a single printed pass/fail line
(visible with -v as the test verdict, and in the captured output).

Two criteria fail honestly and deliberately:

* criterion 1: at m = 4 the kernel of the operator on degree-l
  H_k-valued polynomials can exceed dim H_l * dim H_k.  The operator
  annihilates |x|^2 <x, u> at m = 4, k = 1 (its image is
  2(m+2)(1 - 4/(m+2k-2)) <x, u>), so the radial lift map is not
  injective and the product dimension law breaks at exactly
  (m,k,l) in {(4,1,3), (4,1,4), (4,2,4)} within the scanned range,
  with true dimensions 65, 104, 226 against predicted 64, 100, 225.
  The basis builder returns the full exact kernel, which is the
  honest answer; the criterion as stated is unattainable.
* criterion 8: the truncation gap of the kernel series at |x| = 0.3 is
  monotone on the reference sample set for both spins, and falls below
  1e-6 by L = 8 at spin 0 (8.4e-7), but at spin 1 the L = 8 gap is
  3.2e-5 and only crosses 1e-6 at L = 11.  The spin-1 part of the
  stated tolerance is unattainable at L = 8.
"""

import time

import numpy as np
import pytest
from gmpy2 import mpq

from bosonic.expr import parse_poly
from bosonic.harmonic import hk_dimension
from bosonic.hardy import (
    ProductMeasure,
    growth_report,
    lp_ball_norm,
    poisson_boundary_integral,
    poisson_extension,
    weak_star_gap,
)
from bosonic.kernels import (
    bergman_project,
    calibrate_cmk,
    inner_ss,
    jlk_kernel,
    poisson_series_gap,
    project_Bl,
)
from bosonic.operator import (
    OperatorParams,
    apply_Dk,
    bl_basis,
    fischer_decompose,
)
from bosonic.polynomials import PolyXU
from bosonic.scalars import ScaledRational, sphere_area


def random_hk_valued(rng, m, k, l):
    from bosonic.cli import _random_hk_valued

    return _random_hk_valued(rng, m, k, l)


def verdict(n, ok, detail=""):
    line = "criterion %d: %s" % (n, "PASS" if ok else "FAIL")
    if detail:
        line += " (%s)" % detail
    print(line)
    assert ok, line


def test_criterion_01_basis_cardinality():
    """dim B_l = dim H_l * dim H_k for m in {3,4,5}, k <= 3, l <= 4,
    within 60 seconds."""
    t0 = time.time()
    mismatches = {}
    for m in (3, 4, 5):
        for k in range(0, 4):
            params = OperatorParams(m, k)
            for l in range(0, 5):
                got = len(bl_basis(params, l))
                want = hk_dimension(m, l) * hk_dimension(m, k)
                if got != want:
                    mismatches[(m, k, l)] = (got, want)
    elapsed = time.time() - t0
    assert elapsed < 60.0, "basis construction took %.1fs" % elapsed
    # honest red: the product law is false at m = 4 (see module
    # docstring); the exact kernel dimensions are reported instead
    detail = "; ".join(
        "m=%d k=%d l=%d: %d != %d" % (m, k, l, got, want)
        for (m, k, l), (got, want) in sorted(mismatches.items())
    )
    verdict(1, not mismatches, detail or "%.1fs" % elapsed)


def test_criterion_02_annihilation():
    """The operator annihilates every basis vector exactly, same
    ranges as criterion 1."""
    bad = []
    for m in (3, 4, 5):
        for k in range(0, 4):
            params = OperatorParams(m, k)
            for l in range(0, 5):
                for v in bl_basis(params, l).vectors:
                    if not apply_Dk(v, params, check=False).is_zero():
                        bad.append((m, k, l))
    verdict(2, not bad, "" if not bad else "nonzero images at %s" % bad)


def test_criterion_03_decomposition():
    """100 random H_k-valued inputs per configuration (m in {3,4},
    k <= 2, l <= 4) reconstruct exactly, with null components and zero
    wrong-parity components."""
    rng = np.random.default_rng(20240814)
    failures = []
    for m in (3, 4):
        for k in range(0, 3):
            params = OperatorParams(m, k)
            xsq = PolyXU.norm_sq(m, "x")
            for l in range(0, 5):
                for _ in range(100):
                    f = random_hk_valued(rng, m, k, l)
                    fd = fischer_decompose(f, params, l)
                    recon = PolyXU(m)
                    ok = True
                    for j, comp in fd.components:
                        if not apply_Dk(comp, params, check=False).is_zero():
                            ok = False
                        lifted = comp
                        for _ in range((l - j) // 2):
                            lifted = xsq * lifted
                        recon = recon + lifted
                    if recon != f:
                        ok = False
                    if l >= 1 and not project_Bl(f, params, l - 1).is_zero():
                        ok = False  # wrong parity must vanish
                    if not ok:
                        failures.append((m, k, l))
    verdict(3, not failures, "" if not failures else "failed at %s" % failures)


def test_criterion_04_cross_spin_orthogonality():
    """The double-sphere pairing vanishes exactly for basis pairs with
    distinct degrees AND distinct spins, all degrees <= 3, with at
    least 500 exact zero checks."""
    m = 3
    zeros = 0
    bad = 0
    for k1 in range(0, 4):
        for k2 in range(k1 + 1, 4):
            pa = OperatorParams(m, k1)
            pb = OperatorParams(m, k2)
            for s in range(0, 4):
                for t in range(0, 4):
                    if s == t:
                        continue
                    for f in bl_basis(pa, s).vectors:
                        for g in bl_basis(pb, t).vectors:
                            if inner_ss(f, g).is_zero():
                                zeros += 1
                            else:
                                bad += 1
    verdict(4, bad == 0 and zeros >= 500, "%d exact zeros" % zeros)


def test_criterion_05_reproducing_kernel():
    """The in-space kernel reproduces every basis vector exactly for
    m in {3,4}, k <= 2, l <= 3."""
    bad = []
    for m in (3, 4):
        for k in range(0, 3):
            params = OperatorParams(m, k)
            for l in range(0, 4):
                K = jlk_kernel(params, l)
                for f in bl_basis(params, l).vectors:
                    if K.pair_ss(f) != f:
                        bad.append((m, k, l))
                        break
    verdict(5, not bad, "" if not bad else "not reproduced at %s" % bad)


def test_criterion_06_bergman_projection():
    """Both projection routes agree exactly on 100 random inputs per
    configuration (m in {3,4}, k <= 2, l <= 4), and the projection of
    |x|^2 u1 at m = 3, k = 1 is (3/5) u1."""
    rng = np.random.default_rng(7)
    bad = []
    for m in (3, 4):
        for k in range(0, 3):
            params = OperatorParams(m, k)
            for l in range(0, 5):
                for _ in range(100):
                    f = random_hk_valued(rng, m, k, l)
                    try:
                        a, b = bergman_project(f, params)
                    except AssertionError:
                        bad.append((m, k, l))
                        break
                    if a != b:
                        bad.append((m, k, l))
                        break
    pa, pb = bergman_project(parse_poly("|x|^2*u1", 3), OperatorParams(3, 1))
    known = pa == parse_poly("3/5*u1", 3) and pa == pb
    verdict(6, not bad and known, "" if not bad else "disagree at %s" % bad)


def test_criterion_07_poisson_quadrature():
    """Quadrature Poisson integrals match the exact polynomial solve at
    20 interior points to 1e-8, and the spin-0 calibration recovers
    c/2 = 1/omega_m to relative 1e-10."""
    m, k = 3, 1
    params = OperatorParams(m, k)
    spec = calibrate_cmk(params)
    g = parse_poly("x1^2*u1 + x2*u1", m)
    P = poisson_extension(g, params)
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=m)
        x *= 0.4 * rng.random() / np.linalg.norm(x)
        v = rng.normal(size=m)
        v /= np.linalg.norm(v)
        quad = poisson_boundary_integral(g, spec, x, v, degree=24)
        worst = max(worst, abs(quad - float(P.evaluate(tuple(x), tuple(v)))))
    points_ok = worst < 1e-8
    cal_ok = True
    for mm in (3, 4, 5):
        s0 = calibrate_cmk(OperatorParams(mm, 0))
        half = s0.kappa_numeric * s0.c_mk.numeric(mm) / 2.0
        target = 1.0 / sphere_area(mm)
        if abs(half - target) / target > 1e-10:
            cal_ok = False
    verdict(7, points_ok and cal_ok, "worst gap %.2e" % worst)


def test_criterion_08_series_truncation():
    """Kernel-series truncation gaps at |x| = 0.3: monotone decreasing
    for L = 1..8 (slack 1e-12) and below 1e-6 at L = 8, spins 0 and 1
    at m = 3."""
    m = 3
    rng = np.random.default_rng(0)
    pts = []
    for _ in range(3):
        zeta = rng.normal(size=m)
        zeta /= np.linalg.norm(zeta)
        x = rng.normal(size=m)
        x *= 0.3 / np.linalg.norm(x)
        u = rng.normal(size=m)
        u /= np.linalg.norm(u)
        v = rng.normal(size=m)
        v /= np.linalg.norm(v)
        pts.append((tuple(zeta), tuple(x), tuple(u), tuple(v)))
    details = []
    ok = True
    for k in (0, 1):
        params = OperatorParams(m, k)
        spec = calibrate_cmk(params)
        gaps = [poisson_series_gap(params, spec, L, pts) for L in range(1, 9)]
        mono = all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1))
        small = gaps[-1] < 1e-6
        details.append("k=%d L8 gap %.2e%s" % (k, gaps[-1], "" if mono else " NOT MONOTONE"))
        ok = ok and mono and small
    # honest red: the spin-1 gap at L = 8 is 3.2e-5 and reaches 1e-6
    # only at L = 11; monotonicity and the spin-0 tolerance hold
    verdict(8, ok, "; ".join(details))


def test_criterion_09_growth_bounds():
    """Slice norms of Poisson extensions respect the growth bound
    (m+2k-2)/(m-2) (violations beyond 1e-9 fail) for three boundary
    polynomials at p in {1, 2, inf}; the ball-norm gate rejects
    p >= m/(m-1)."""
    m = 3
    data = [
        (parse_poly("u1", m), 1),
        (parse_poly("x1*u1", m), 1),
        (parse_poly("u1^2 - u3^2", m), 2),
    ]
    bad = []
    for g, k in data:
        spec = calibrate_cmk(OperatorParams(m, k))
        for p in (1.0, 2.0, float("inf")):
            rep = growth_report(g, p, spec, degree=8, slack=1e-9)
            if not rep.all_ok():
                bad.append((str(g), p))
    gate_ok = True
    for p in (1.5, 2.0, 10.0):
        try:
            lp_ball_norm(lambda x, v: 1.0, p, m)
            gate_ok = False
        except ValueError:
            pass
    lp_ball_norm(lambda x, v: 1.0, 1.2, m)  # admissible exponent works
    verdict(9, not bad and gate_ok, "" if not bad else "violations: %s" % bad)


def test_criterion_10_weak_star_convergence():
    """The smoothing gap |<P[mu]_r, g> - <mu, g>| strictly decreases
    across r in {0.5, 0.9, 0.99} for five measure/test-function
    pairs."""
    m = 3
    u1 = parse_poly("u1", m)
    u2 = parse_poly("u2", m)
    one = PolyXU.constant(m, 1)
    e1, e2, e3 = (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)
    pairs = [
        (ProductMeasure(m=m, k=1, atoms=((e1, 1.0),), density2=u1),
         parse_poly("x1*u1", m), 1),
        (ProductMeasure(m=m, k=1, atoms=((e2, 2.0),), density2=u2),
         parse_poly("x2^3*u2", m), 1),
        (ProductMeasure(m=m, k=0, atoms=((e1, 1.0),), density2=one),
         parse_poly("x1^2", m), 0),
        (ProductMeasure(m=m, k=1, density1=parse_poly("x1^2", m), density2=u1),
         parse_poly("x1^2*u1", m), 1),
        (ProductMeasure(m=m, k=1, atoms=((e1, 1.0), (e3, 0.5)), density2=u2),
         parse_poly("x2^2*u2", m), 1),
    ]
    bad = []
    for idx, (mu, g, k) in enumerate(pairs):
        spec = calibrate_cmk(OperatorParams(m, k))
        gaps = [weak_star_gap(mu, g, r, r, spec) for r in (0.5, 0.9, 0.99)]
        if not all(gaps[i] > gaps[i + 1] + 1e-6 for i in range(2)):
            bad.append((idx, gaps))
    verdict(10, not bad, "" if not bad else "non-decreasing: %s" % bad)
