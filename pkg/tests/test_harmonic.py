"""Harmonic polynomial spaces, projection, and zonal kernels."""

from math import comb

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from bosonic.harmonic import (
    harmonic_project_u,
    hk_basis,
    hk_dimension,
    monomial_exponents,
    zonal_kernel,
)
from bosonic.moments import sphere_moment
from bosonic.polynomials import PolyXU, laplacian
from bosonic.scalars import ZERO, ScaledRational


def test_dimension_closed_form():
    assert [hk_dimension(3, k) for k in range(5)] == [1, 3, 5, 7, 9]
    assert [hk_dimension(4, k) for k in range(5)] == [1, 4, 9, 16, 25]
    assert hk_dimension(5, 2) == comb(6, 2) - comb(4, 0)
    assert hk_dimension(3, -1) == 0


@pytest.mark.parametrize("m,k", [(3, 0), (3, 2), (3, 4), (4, 3), (5, 2)])
def test_basis_is_harmonic_and_full(m, k):
    basis = hk_basis(m, k)
    assert len(basis) == hk_dimension(m, k)
    for v in basis.vectors:
        assert v.is_homogeneous("u", k)
        assert laplacian(v, "u").is_zero()
    # read-off coordinates invert membership
    for j, v in enumerate(basis.vectors):
        coords = basis.coords_of(v)
        for i, c in enumerate(coords):
            assert c == (1 if i == j else ZERO)


def test_monomial_exponents_count():
    assert len(monomial_exponents(3, 4)) == comb(6, 2)
    assert all(sum(a) == 4 for a in monomial_exponents(3, 4))


def u_polys(m=3, k=4, max_terms=4):
    monos = monomial_exponents(m, k)
    coeffs = st.integers(min_value=-6, max_value=6)
    term = st.tuples(st.sampled_from(monos), coeffs)
    def build(terms):
        p = PolyXU(m)
        for b, c in terms:
            p = p + PolyXU.monomial(m, (0,) * m, b, c)
        return p
    return st.lists(term, max_size=max_terms).map(build)


@given(u_polys())
@settings(max_examples=40, deadline=None)
def test_harmonic_projection_properties(p):
    h = harmonic_project_u(p, 4)
    assert laplacian(h, "u").is_zero()
    diff = p - h
    if not diff.is_zero():
        # the defect is divisible by |u|^2: dividing out must succeed
        usq = PolyXU.norm_sq(3, "u")
        # verify via the uniqueness direction instead: p - h has zero
        # harmonic projection
        assert harmonic_project_u(diff, 4).is_zero()
        # and h is reproduced by projecting again
    assert harmonic_project_u(h, 4) == h


def _sphere_pair_u(p, q):
    """Raw integral over the u sphere of p*q (both u-block polys)."""
    acc = ZERO
    prod = p * q
    for (_, b), c in prod.terms.items():
        mom = sphere_moment(b, 3)
        if not mom.is_zero():
            acc = acc + c * mom
    return acc


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (3, 3), (4, 2), (5, 2)])
def test_zonal_kernel_reproduces_basis(m, k):
    Z = zonal_kernel(m, k)  # x block holds u, u block holds v
    basis = hk_basis(m, k)
    for h in basis.vectors:
        # move h to the x block and integrate the x block against Z
        hx = PolyXU(m, {(b, (0,) * m): c for (_, b), c in h.terms.items()})
        prod = Z * hx
        out = PolyXU(m)
        for (a, b), c in prod.terms.items():
            mom = sphere_moment(a, m)
            if not mom.is_zero():
                # normalized measure: divide the raw moment grade out
                out = out + PolyXU.monomial(m, (0,) * m, b, 1).scale(
                    c * mom * ScaledRational(mpq(1), -1)
                )
        assert out == h


def test_zonal_kernel_symmetric_in_arguments():
    Z = zonal_kernel(3, 2)
    # swapping the two argument blocks fixes Z
    swapped = PolyXU(3, {(b, a): c for (a, b), c in Z.terms.items()})
    assert swapped == Z


def test_zonal_value_on_diagonal():
    # Z_k(u, u) = dim H_k on the unit sphere
    for m, k in [(3, 1), (3, 3), (4, 2), (5, 2)]:
        Z = zonal_kernel(m, k)
        pt = tuple([mpq(1)] + [mpq(0)] * (m - 1))
        assert Z.evaluate(pt, pt) == hk_dimension(m, k)
