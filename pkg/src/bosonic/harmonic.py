"""Classical harmonic machinery: Laplacian, harmonic projection, bases
of the spaces H_k of homogeneous harmonic polynomials, and zonal
reproducing kernels Z_k.

Convention: Z_k reproduces against the NORMALIZED sphere measure sigma
(total mass 1); raw-measure formulas are converted through the omega
grade of the coefficients.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from gmpy2 import mpq

from . import linalg
from .moments import sphere_moment
from .polynomials import PolyXU, laplacian
from .scalars import ScaledRational, ZERO


def validate_dimension(m):
    if m < 3:
        raise ValueError("dimension m must be at least 3")


@lru_cache(maxsize=None)
def monomial_exponents(m, deg):
    """All length-m exponent tuples of total degree deg, lex order."""
    if m == 1:
        return ((deg,),)
    out = []
    for first in range(deg, -1, -1):
        for rest in monomial_exponents(m - 1, deg - first):
            out.append((first,) + rest)
    return tuple(out)


def hk_dimension(m, k):
    """dim H_k = C(m+k-1, k) - C(m+k-3, k-2)."""
    if k < 0:
        return 0
    d = comb(m + k - 1, k)
    if k >= 2:
        d -= comb(m + k - 3, k - 2)
    return d


@dataclass(frozen=True)
class SubspaceBasis:
    """Exact basis of a finite-dimensional polynomial subspace.

    coord_keys, when present, lists one (alpha, beta) monomial per
    vector such that vector j has coefficient 1 there and every other
    vector has coefficient 0; coordinates of a member polynomial can
    then be read off its coefficients directly.
    """

    m: int
    k: int
    space_tag: str
    vectors: tuple
    l: int = None
    coord_keys: tuple = None

    def __len__(self):
        return len(self.vectors)

    def coords_of(self, p):
        if self.coord_keys is None:
            raise ValueError("basis has no read-off coordinates")
        return [p.coeff(a, b) for a, b in self.coord_keys]


@lru_cache(maxsize=None)
def hk_basis(m, k):
    """Exact basis of H_k(R^m) as polynomials in the u block.

    Built from the nullspace of the Laplacian matrix on degree-k
    monomials; basis vectors carry a distinguished monomial with unit
    coefficient (the RREF free columns) enabling coordinate read-off.
    """
    validate_dimension(m)
    if k < 0:
        raise ValueError("degree k must be non-negative")
    zero = (0,) * m
    monos = monomial_exponents(m, k)
    if k < 2:
        vectors = tuple(
            PolyXU.monomial(m, zero, beta, 1) for beta in monos
        )
        keys = tuple((zero, beta) for beta in monos)
        basis = SubspaceBasis(m=m, k=k, space_tag="Hk", vectors=vectors, coord_keys=keys)
        assert len(basis) == hk_dimension(m, k)
        return basis
    out_monos = monomial_exponents(m, k - 2)
    out_index = {b: i for i, b in enumerate(out_monos)}
    rows = [[mpq(0)] * len(monos) for _ in out_monos]
    for j, beta in enumerate(monos):
        for i in range(m):
            e = beta[i]
            if e >= 2:
                nb = list(beta)
                nb[i] = e - 2
                rows[out_index[tuple(nb)]][j] += e * (e - 1)
    null = linalg.nullspace(rows, ncols=len(monos))
    # identify each vector's free column: the unique index where it is 1
    # and all other vectors vanish
    pivot_set = set()
    red, pivots = linalg.rref(rows)
    pivot_set.update(pivots)
    free_cols = [c for c in range(len(monos)) if c not in pivot_set]
    vectors = []
    keys = []
    for vec, fc in zip(null, free_cols):
        terms = {}
        for j, c in enumerate(vec):
            if c != 0:
                terms[(zero, monos[j])] = ScaledRational(c)
        vectors.append(PolyXU(m, terms))
        keys.append((zero, monos[fc]))
    basis = SubspaceBasis(
        m=m, k=k, space_tag="Hk", vectors=tuple(vectors), coord_keys=tuple(keys)
    )
    assert len(basis) == hk_dimension(m, k)
    return basis


def harmonic_project_u(p, k):
    """Harmonic component h of a u-homogeneous p of degree k, i.e. the
    unique h with laplacian(h, u) = 0 and p - h divisible by |u|^2.

    x-dependence passes through untouched (the projection acts slice by
    slice in x).
    """
    if p.is_zero():
        return p
    m = p.m
    if not p.is_homogeneous("u", k):
        raise ValueError("input must be u-homogeneous of degree %d" % k)
    if k < 2:
        return p
    lap = laplacian(p, "u")
    if lap.is_zero():
        return p
    in_monos = monomial_exponents(m, k - 2)
    idx = {b: i for i, b in enumerate(in_monos)}
    # matrix of q |-> laplacian(|u|^2 q, u) on degree k-2 u-monomials
    mat = [[mpq(0)] * len(in_monos) for _ in in_monos]
    usq = PolyXU.norm_sq(m, "u")
    zero = (0,) * m
    for j, beta in enumerate(in_monos):
        img = laplacian(usq * PolyXU.monomial(m, zero, beta, 1), "u")
        for (_, b), c in img.terms.items():
            mat[idx[b]][j] += c.value
    # batch right-hand sides over x-monomials of lap
    by_alpha = {}
    for (a, b), c in lap.terms.items():
        by_alpha.setdefault(a, [mpq(0)] * len(in_monos))[idx[b]] += c.value
    alphas = sorted(by_alpha)
    B = [[by_alpha[a][i] for a in alphas] for i in range(len(in_monos))]
    X = linalg.solve_exact(mat, B)
    q = PolyXU(m)
    for ci, a in enumerate(alphas):
        terms = {}
        for i, beta in enumerate(in_monos):
            if X[i][ci] != 0:
                terms[(a, beta)] = ScaledRational(X[i][ci])
        q = q + PolyXU(m, terms)
    return p - usq * q


def _gegenbauer_coeffs(k, lam):
    """Coefficient list (by power of t) of the Gegenbauer polynomial
    C_k^lam via the three-term recurrence."""
    c0 = [mpq(1)]
    if k == 0:
        return c0
    c1 = [mpq(0), 2 * lam]
    if k == 1:
        return c1
    prev, cur = c0, c1
    for n in range(2, k + 1):
        nxt = [mpq(0)] * (n + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * (n + lam - 1) * c / n
        for i, c in enumerate(prev):
            nxt[i] -= (n + 2 * lam - 2) * c / n
        prev, cur = cur, nxt
    return cur


@lru_cache(maxsize=None)
def zonal_kernel(m, k):
    """Zonal kernel Z_k(u, v): the reproducing kernel of H_k under the
    normalized sphere measure.

    Returned as a PolyXU whose x block holds u and whose u block holds
    v.  Two independent constructions (Gegenbauer recurrence and Gram
    inverse over hk_basis) are computed and must agree exactly.
    """
    validate_dimension(m)
    gg = _zonal_gegenbauer(m, k)
    gr = _zonal_gram(m, k)
    if gg != gr:
        raise AssertionError("zonal kernel construction mismatch at m=%d k=%d" % (m, k))
    return gg


def _zonal_gegenbauer(m, k):
    lam = mpq(m - 2, 2)
    coeffs = _gegenbauer_coeffs(k, lam)
    scale = mpq(2 * k + m - 2, m - 2)
    pair = PolyXU.pairing(m)  # <first-block, second-block>
    nx = PolyXU.norm_sq(m, "x")
    nu = PolyXU.norm_sq(m, "u")
    out = PolyXU(m)
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        j = (k - i) // 2
        term = PolyXU.constant(m, c * scale)
        for _ in range(i):
            term = term * pair
        for _ in range(j):
            term = term * nx * nu
        out = out + term
    return out


def _zonal_gram(m, k):
    basis = hk_basis(m, k)
    n = len(basis)
    G = [[mpq(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = ZERO
            prod = basis.vectors[i] * basis.vectors[j]
            for (_, b), c in prod.terms.items():
                mom = sphere_moment(b, m)
                if not mom.is_zero():
                    acc = acc + c * mom
            # normalized measure: divide by omega (grade 1 -> 0)
            val = acc.value if not acc.is_zero() else mpq(0)
            G[i][j] = val
            G[j][i] = val
    Ginv = linalg.solve_exact(G, [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)])
    out = PolyXU(m)
    zero = (0,) * m
    for i in range(n):
        # basis vector i with u-exponents moved to the x block
        hi_x = PolyXU(
            m, {(b, zero): c for (_, b), c in basis.vectors[i].terms.items()}
        )
        for j in range(n):
            if Ginv[i][j] != 0:
                out = out + hi_x * basis.vectors[j].scale(ScaledRational(Ginv[i][j]))
    return out
