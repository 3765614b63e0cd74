"""The degree-k operator D_k, its polynomial null spaces B_l, the
constructive polynomial Dirichlet solver, and the descending
decomposition f = f_l + |x|^2 f_{l-2} + ...

D_k acts on polynomials f(x, u) whose u-slices are harmonic of degree k:

    D_k f = Lap_x f - (4/(m+2k-2)) <u,D_x><D_u,D_x> f
            + (4 |u|^2 / ((m+2k-2)(m+2k-4))) <D_u,D_x>^2 f

with the degree-zero case defined as the plain Laplacian in x (the
coupling terms vanish identically on u-independent input, which also
sidesteps the m+2k-4 denominator at m = 4).
"""

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from . import linalg
from .harmonic import (
    SubspaceBasis,
    hk_basis,
    hk_dimension,
    monomial_exponents,
    validate_dimension,
)
from .polynomials import (
    PolyXU,
    euler_pairing_x,
    laplacian,
    mixed_pairing,
)
from .scalars import ScaledRational


@dataclass(frozen=True)
class OperatorParams:
    m: int
    k: int

    def __post_init__(self):
        validate_dimension(self.m)
        if self.k < 0:
            raise ValueError("spin degree k must be non-negative")


@dataclass(frozen=True)
class FischerDecomposition:
    """f = sum_j |x|^(l-2j... ) -- components[(j, f_j)] with f_j a null
    solution, x-homogeneous of degree j, and
    sum_j |x|^(l-j) ... reconstructing the input as
    sum_j |x|^(l-j) f_j over the stored degrees."""

    l: int
    components: tuple  # of (degree j, PolyXU)

    def component(self, j):
        for d, f in self.components:
            if d == j:
                return f
        raise KeyError("no component of degree %d" % j)


def ensure_hk_valued(f, params):
    """Validate that f is H_k valued in u: u-homogeneous of degree k and
    annihilated by the u Laplacian."""
    if f.is_zero():
        return
    if not f.is_homogeneous("u", params.k):
        raise ValueError("polynomial is not u-homogeneous of degree %d" % params.k)
    if not laplacian(f, "u").is_zero():
        raise ValueError("polynomial is not harmonic in u")


def apply_Dk(f, params, check=True):
    """Exact image of f under D_k; x-degree drops by two."""
    if f.m != params.m:
        raise ValueError("dimension mismatch")
    if check:
        ensure_hk_valued(f, params)
    m, k = params.m, params.k
    t1 = laplacian(f, "x")
    if k == 0:
        return t1
    g = mixed_pairing(f)  # <D_u, D_x> f
    t2 = euler_pairing_x(g)
    t3 = PolyXU.norm_sq(m, "u") * mixed_pairing(g)
    c1 = m + 2 * k - 2
    c2 = m + 2 * k - 4
    return (
        t1
        - t2.scale(ScaledRational(mpq(4, c1)))
        + t3.scale(ScaledRational(mpq(4, c1 * c2)))
    )


# -- coordinates on P_j (x) tensor H_k (u) ----------------------------


@lru_cache(maxsize=None)
def _space_meta(m, k, j):
    """Monomial-times-harmonic coordinates for x-degree-j, H_k-valued
    polynomials: returns (alphas, hkb, coord_keys) where entry (a, b)
    of the basis is x^alphas[a] * hkb.vectors[b] and coord_keys allow
    coefficient read-off."""
    alphas = monomial_exponents(m, j)
    hkb = hk_basis(m, k)
    keys = tuple(
        (alpha, hkey[1]) for alpha in alphas for hkey in hkb.coord_keys
    )
    return alphas, hkb, keys


def _coords(p, m, k, j):
    _, _, keys = _space_meta(m, k, j)
    return [p.coeff(a, b).value if p.coeff(a, b) else mpq(0) for a, b in keys]


def _poly_from_coords(vec, m, k, j):
    alphas, hkb, _ = _space_meta(m, k, j)
    d = len(hkb)
    out = PolyXU(m)
    zero = (0,) * m
    for a, alpha in enumerate(alphas):
        xa = PolyXU.monomial(m, alpha, zero, 1)
        for b in range(d):
            c = vec[a * d + b]
            if c != 0:
                out = out + (xa * hkb.vectors[b]).scale(ScaledRational(c))
    return out


class _DegenerateLift:
    """Stand-in solver for configurations where q |-> D_k(|x|^2 q) has a
    nontrivial kernel (this happens: at m = 4, k = 1 the polynomial
    |x|^2 <x, u> is annihilated, since the image of |x|^2 <x, u> works
    out to 2(m+2)(1 - 4/(m+2k-2)) <x, u>).  Solves consistent systems by
    a particular solution and exposes the exact kernel."""

    def __init__(self, rows, m, k, j):
        self.rows = rows
        self.meta = (m, k, j)

    def solve_many(self, B):
        return linalg.solve_particular(self.rows, B)

    def kernel_polys(self):
        m, k, j = self.meta
        null = linalg.nullspace(self.rows, ncols=len(self.rows[0]))
        return [_poly_from_coords(vec, m, k, j) for vec in null]


@lru_cache(maxsize=None)
def _lift_solver(m, k, j):
    """Solver for q |-> D_k(|x|^2 q) on x-degree-j, H_k-valued
    polynomials.  The map is a bijection except at degenerate
    configurations (m = 4 with small spin), where a _DegenerateLift is
    returned instead."""
    params = OperatorParams(m, k)
    alphas, hkb, keys = _space_meta(m, k, j)
    xsq = PolyXU.norm_sq(m, "x")
    zero = (0,) * m
    n = len(keys)
    cols = []
    for alpha in alphas:
        xa = PolyXU.monomial(m, alpha, zero, 1)
        for hv in hkb.vectors:
            img = apply_Dk(xsq * xa * hv, params, check=False)
            cols.append(_coords(img, m, k, j))
    rows = [[cols[c][r] for c in range(n)] for r in range(n)]
    # matrices above the inverse-cache limit would otherwise hide their
    # singularity until solve time, so probe it modularly up front
    if linalg.singular_modulo_primes(rows):
        return _DegenerateLift(rows, m, k, j)
    try:
        return linalg.ExactSolver(rows)
    except linalg.SingularMatrixError:
        return _DegenerateLift(rows, m, k, j)


def _lift_degenerate(m, k, j):
    return isinstance(_lift_solver(m, k, j), _DegenerateLift)


def _solve_lift_batch(rhs_polys, m, k, j):
    """Solve D_k(|x|^2 g_i) = rhs_i for each x-degree-j rhs; returns
    polynomials."""
    solver = _lift_solver(m, k, j)
    B_cols = [_coords(p, m, k, j) for p in rhs_polys]
    n = len(B_cols[0]) if B_cols else 0
    B = [[col[i] for col in B_cols] for i in range(n)]
    try:
        X = solver.solve_many(B)
    except linalg.SingularMatrixError:
        # degeneracy surfacing only at solve time (a prime coincidence
        # slipping past the modular probe); fall back to a particular
        # solution
        A = solver.A if isinstance(solver, linalg.ExactSolver) else solver.rows
        X = linalg.solve_particular(A, B)
    return [
        _poly_from_coords([X[i][c] for i in range(n)], m, k, j)
        for c in range(len(rhs_polys))
    ]


# -- public operations ------------------------------------------------


def dirichlet_poly(f, params):
    """Polynomial solution of the Dirichlet problem with boundary data
    f on the unit sphere: returns (g, P) with P = (1 - |x|^2) g + f,
    D_k P = 0, deg_x g <= deg_x f - 2."""
    g, P = dirichlet_poly_many([f], params)[0]
    return g, P


def _dirichlet_via_slices(f, params):
    """Dirichlet solve through the homogeneous slices of the Poisson
    kernel; used at degenerate configurations where the descending lift
    solves are singular.  The slice pairing is the Poisson integral
    itself, so the result is the canonical solution."""
    from .kernels import _slice_component

    m = params.m
    P = PolyXU(m)
    for s in f.degrees_present("x"):
        fs = f.homogeneous_part("x", s)
        for l in range(s % 2, s + 1, 2):
            P = P + _slice_component(fs, params, l, s)
    if not apply_Dk(P, params, check=False).is_zero():
        raise AssertionError("slice Dirichlet solve left a residual")
    # recover g from (1 - |x|^2) g = P - f, ascending degree by degree:
    # the degree-d slice reads R_d = g_d - |x|^2 g_{d-2}
    R = P - f
    xsq = PolyXU.norm_sq(m, "x")
    parts = {}
    g = PolyXU(m)
    for d in range(0, f.deg_x() + 1):
        gd = R.homogeneous_part("x", d)
        below = parts.get(d - 2)
        if below is not None:
            gd = gd + xsq * below
        if gd:
            parts[d] = gd
            g = g + gd
    if (g - xsq * g) != R:
        raise AssertionError("slice Dirichlet solve is not divisible")
    return g, P


def dirichlet_poly_many(fs, params):
    """Batched Dirichlet solves sharing cached solvers; returns a list
    of (g, P) pairs."""
    m, k = params.m, params.k
    for f in fs:
        if f.m != m:
            raise ValueError("dimension mismatch")
        ensure_hk_valued(f, params)
    lmax = max((f.deg_x() for f in fs), default=0)
    if any(_lift_degenerate(m, k, j) for j in range(0, max(lmax - 1, 0))):
        return [_dirichlet_via_slices(f, params) for f in fs]
    xsq = PolyXU.norm_sq(m, "x")
    Dfs = [apply_Dk(f, params, check=False) for f in fs]
    # solve D_k((1-|x|^2) g) = -D_k f degree by degree, descending:
    # the degree-j slice reads L_j(g_j) = (D_k f)_j + D_k(g_{j+2})
    g_parts = [{} for _ in fs]  # degree -> solved slice of g
    for j in range(lmax - 2, -1, -1):
        rhs = []
        idxs = []
        for i, Df in enumerate(Dfs):
            r = Df.homogeneous_part("x", j)
            above = g_parts[i].get(j + 2)
            if above is not None:
                r = r + apply_Dk(above, params, check=False)
            if r:
                rhs.append(r)
                idxs.append(i)
        if rhs:
            sols = _solve_lift_batch(rhs, m, k, j)
            for i, gj in zip(idxs, sols):
                g_parts[i][j] = gj
    gs = []
    for parts in g_parts:
        g = PolyXU(m)
        for gj in parts.values():
            g = g + gj
        gs.append(g)
    out = []
    for f, g in zip(fs, gs):
        P = g + f - xsq * g
        out.append((g, P))
    return out


def fischer_decompose(f, params, l=None):
    """Unique splitting f = sum |x|^(l-j) f_j with each f_j a
    degree-j homogeneous null solution; f must be x-homogeneous."""
    if l is None:
        l = f.deg_x()
    if not f.is_homogeneous("x", l):
        raise ValueError("input must be x-homogeneous of degree %d" % l)
    ensure_hk_valued(f, params)
    _, P = dirichlet_poly(f, params)
    comps = []
    for j in range(l, -1, -2):
        comps.append((j, P.homogeneous_part("x", j)))
    return FischerDecomposition(l=l, components=tuple(comps))


@lru_cache(maxsize=None)
def bl_basis(params, l):
    """Exact basis of B_l = (x-degree-l, H_k-valued) null solutions of
    D_k; cardinality dim H_l * dim H_k.

    Cardinality is dim H_l * dim H_k whenever the descending
    decomposition is direct; at degenerate configurations (m = 4 with
    small spin, where D_k(|x|^2 q) = 0 has nonzero solutions q) the
    null space is strictly larger and the basis is computed directly
    from the kernel of D_k, so the count exceeds the product.

    Generic construction: project each product h_a(x) h_b(u), with h_a
    ranging over a basis of H_l in x and h_b over H_k in u, onto its
    top component f - |x|^2 g where D_k(|x|^2 g) = D_k f.  The products
    are independent modulo |x|^2 times lower-degree space, so their
    projections form a basis of the right cardinality.
    """
    m, k = params.m, params.k
    if l < 0:
        raise ValueError("degree l must be non-negative")
    if l >= 2 and _lift_degenerate(m, k, l - 2):
        return _bl_basis_nullspace(params, l)
    hl = hk_basis(m, l)
    hk = hk_basis(m, k)
    zero = (0,) * m
    prods = []
    for ha in hl.vectors:
        ha_x = PolyXU(m, {(b, zero): c for (_, b), c in ha.terms.items()})
        for hb in hk.vectors:
            prods.append(ha_x * hb)
    if l <= 1:
        vectors = tuple(prods)
    else:
        rhs = [apply_Dk(p, params, check=False) for p in prods]
        gsols = _solve_lift_batch(rhs, m, k, l - 2)
        xsq = PolyXU.norm_sq(m, "x")
        vectors = tuple(p - xsq * g for p, g in zip(prods, gsols))
    basis = SubspaceBasis(m=m, k=k, l=l, space_tag="Bl", vectors=vectors)
    assert len(basis) == hk_dimension(m, l) * hk_dimension(m, k)
    return basis


def _bl_basis_nullspace(params, l):
    """Exact basis of ker D_k on x-degree-l, H_k-valued polynomials by
    direct nullspace computation; exact for every configuration,
    including the degenerate ones where the dimension exceeds
    dim H_l * dim H_k."""
    m, k = params.m, params.k
    alphas, hkb, keys_in = _space_meta(m, k, l)
    _, _, keys_out = _space_meta(m, k, l - 2)
    zero = (0,) * m
    cols = []
    for alpha in alphas:
        xa = PolyXU.monomial(m, alpha, zero, 1)
        for hv in hkb.vectors:
            img = apply_Dk(xa * hv, params, check=False)
            cols.append([img.coeff(a, b).value for a, b in keys_out])
    rows = [[cols[c][r] for c in range(len(cols))] for r in range(len(keys_out))]
    null = linalg.nullspace(rows, ncols=len(cols))
    vectors = tuple(_poly_from_coords(vec, m, k, l) for vec in null)
    basis = SubspaceBasis(m=m, k=k, l=l, space_tag="Bl", vectors=vectors)
    assert len(basis) >= hk_dimension(m, l) * hk_dimension(m, k)
    return basis


def check_nonvanishing(f, params):
    """D_k(|x|^2 f) is nonzero for every nonzero H_k-valued f."""
    if f.is_zero():
        raise ValueError("input must be nonzero")
    ensure_hk_valued(f, params)
    img = apply_Dk(PolyXU.norm_sq(params.m, "x") * f, params, check=False)
    return not img.is_zero()
