"""Boundary measures, Poisson integrals, slice-norm growth bounds, and
the weak-star smoothing gap."""

import math

import numpy as np
import pytest

from bosonic.expr import parse_poly
from bosonic.hardy import (
    DEFAULT_RADII,
    ProductMeasure,
    dk_residual,
    growth_constant,
    growth_report,
    hp_norm,
    lp_ball_norm,
    mean_value_check,
    point_growth_check,
    poisson_boundary_integral,
    poisson_extension,
    poisson_integral,
    slice_norm,
    total_variation,
    weak_star_gap,
)
from bosonic.kernels import calibrate_cmk
from bosonic.operator import OperatorParams
from bosonic.polynomials import PolyXU
from bosonic.quadrature import quad_rule

M = 3
U1 = parse_poly("u1", M)
Z1U1 = parse_poly("x1*u1", M)
E1 = (1.0, 0.0, 0.0)


def spec_for(k, m=M):
    return calibrate_cmk(OperatorParams(m, k))


def test_measure_validation():
    with pytest.raises(ValueError):
        ProductMeasure(m=M, k=1, atoms=((E1, 1.0),), density2=None)
    with pytest.raises(ValueError):
        ProductMeasure(m=M, k=1, atoms=(((2.0, 0.0, 0.0), 1.0),), density2=U1)
    with pytest.raises(ValueError):
        # density2 must be harmonic of the declared degree
        ProductMeasure(m=M, k=2, atoms=((E1, 1.0),), density2=parse_poly("u1^2", M))


def test_total_variation():
    mu = ProductMeasure(m=M, k=1, atoms=((E1, 2.0), (E1, -1.0)), density2=U1)
    # ||mu1|| = 3 (atom weights in absolute value), ||u1||_{L1(sigma)}
    tv = total_variation(mu, degree=12)
    u1_l1 = quad_rule(M, 12)
    vals = np.abs(u1_l1.nodes[:, 0])
    assert tv == pytest.approx(3.0 * float(np.dot(u1_l1.weights, vals)), rel=1e-12)


def test_poisson_integral_of_density_measure_matches_exact_extension():
    # mu = g1(zeta) dsigma x h(u) dsigma smooths to the polynomial
    # extension of g1 * h
    k = 1
    params = OperatorParams(M, k)
    spec = spec_for(k)
    g1 = parse_poly("x1^2", M)
    mu = ProductMeasure(m=M, k=k, density1=g1, density2=U1)
    P = poisson_extension(g1 * U1, params)
    rng = np.random.default_rng(0)
    for _ in range(4):
        x = rng.normal(size=M)
        x *= 0.35 * rng.random() / np.linalg.norm(x)
        v = rng.normal(size=M)
        v /= np.linalg.norm(v)
        quad = poisson_integral(mu, spec, x, v, degree=20)
        assert quad == pytest.approx(float(P.evaluate(tuple(x), tuple(v))), abs=5e-7)


def test_poisson_boundary_integral_matches_extension():
    k = 1
    params = OperatorParams(M, k)
    spec = spec_for(k)
    g = parse_poly("x1^2*u1 + x2*u1", M)
    P = poisson_extension(g, params)
    x = (0.2, -0.1, 0.05)
    v = (0.3, 0.5, -0.8)
    quad = poisson_boundary_integral(g, spec, x, v, degree=24)
    assert quad == pytest.approx(float(P.evaluate(x, v)), abs=1e-8)


def test_poisson_integral_rejects_points_outside_cap():
    mu = ProductMeasure(m=M, k=1, atoms=((E1, 1.0),), density2=U1)
    with pytest.raises(ValueError):
        poisson_integral(mu, spec_for(1), (0.999, 0.0, 0.0), E1)


def test_slice_norm_of_constant():
    rule = quad_rule(M, 8)
    f = lambda x, v: 1.0
    for p in (1.0, 2.0, float("inf")):
        assert slice_norm(f, 0.5, 0.5, p, rule) == pytest.approx(1.0, rel=1e-13)


def test_growth_constant_value():
    assert growth_constant(3, 1) == pytest.approx(3.0)
    assert growth_constant(4, 2) == pytest.approx(3.0)
    assert growth_constant(3, 0) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1.0, 2.0, float("inf")])
def test_growth_report_polynomial_data(p):
    spec = spec_for(1)
    rep = growth_report(Z1U1, p, spec, degree=8)
    assert rep.all_ok()
    assert rep.corlp_decreasing()
    rows = rep.csv_rows()
    assert rows[0] == "r1,r2,norm,bound,ok"
    assert len(rows) == 1 + len(DEFAULT_RADII) ** 2


def test_growth_report_measure_data():
    mu = ProductMeasure(m=M, k=1, atoms=((E1, 1.0),), density2=U1)
    spec = spec_for(1)
    # an atom's Poisson kernel concentrates as r1 -> 1, beyond what a
    # fixed-degree quadrature can resolve in L1, so check the bound on
    # the radii the rule resolves
    rep = growth_report(mu, 1, spec, radii=(0.0, 0.25, 0.5), degree=12)
    assert rep.all_ok()
    with pytest.raises(ValueError):
        growth_report(mu, 2, spec, degree=8)


def test_hp_norm_positive_and_bounded():
    params = OperatorParams(M, 1)
    spec = spec_for(1)
    n = hp_norm(U1, params, 2, degree=8)
    assert n > 0
    rep = growth_report(U1, 2, spec, degree=8)
    assert max(rep.values) <= rep.bound + 1e-9


def test_point_growth_check_passes_for_null_data():
    params = OperatorParams(M, 1)
    rows = point_growth_check(Z1U1, params, 2, degree=8)
    assert rows and all(ok for (_, _, _, _, ok) in rows)


def test_lp_ball_norm_gate_and_value():
    # admissible range is 1 <= p < m/(m-1) = 1.5 at m = 3
    with pytest.raises(ValueError):
        lp_ball_norm(lambda x, v: 1.0, 1.5, M)
    with pytest.raises(ValueError):
        lp_ball_norm(lambda x, v: 1.0, 2.0, M)
    area = 4 * math.pi
    val = lp_ball_norm(lambda x, v: 1.0, 1.0, M, degree=6)
    assert val == pytest.approx(area / 3 * area, rel=1e-10)


def test_weak_star_gap_vanishes_at_the_boundary():
    mu = ProductMeasure(m=M, k=1, atoms=((E1, 1.0),), density2=U1)
    spec = spec_for(1)
    # at r1 = r2 = 1 the smoothed pairing equals the raw pairing
    assert weak_star_gap(mu, Z1U1, 1.0, 1.0, spec) < 1e-12


def test_weak_star_gap_decreases_toward_the_boundary():
    mu = ProductMeasure(m=M, k=1, atoms=((E1, 1.0),), density2=U1)
    spec = spec_for(1)
    gaps = [weak_star_gap(mu, Z1U1, r, r, spec) for r in (0.5, 0.9, 0.99)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[0] == pytest.approx(0.5, rel=1e-9)


def test_dk_residual_small_for_null_solution():
    params = OperatorParams(M, 1)
    P = poisson_extension(parse_poly("x1^2*u1", M), params)
    f = lambda x, v: float(P.evaluate(tuple(x), tuple(v)))
    res = dk_residual(f, params, (0.2, 0.1, -0.1), (0.4, 0.5, 0.6))
    assert abs(res) < 1e-6


def test_mean_value_inequality_spot_check():
    params = OperatorParams(M, 1)
    P = poisson_extension(parse_poly("x1^2*u1", M), params)
    f = lambda x, v: float(P.evaluate(tuple(x), tuple(v)))
    lhs, rhs = mean_value_check(
        f, params, (0.1, 0.0, 0.0), (0.0, 1.0, 0.0), 0.3, n=4000
    )
    assert lhs <= rhs * 1.05  # Monte Carlo slack
