"""Exact inner products, Gram matrices, reproducing kernels J_{l,k},
Bergman kernel/projection, and the Poisson kernel calibration.

Conventions
-----------
* inner_ss / inner_bb integrate against the RAW (unnormalized) measures
  dS(x) dS(u) resp. dx du; results carry omega grade 2.
* Two kernel families live here and genuinely differ for k >= 1:
  jlk_kernel is the in-space reproducing kernel b(x,v)^T G^{-1}
  b(zeta,u) of B_l (raw double-sphere Gram, grade -2), while
  poisson_degree_kernel is the exact x-degree-l slice of the Poisson
  kernel, which reproduces B_l AND annihilates every B_s with s != l.
  The families coincide only when the spaces are orthogonal (k = 0 or
  opposite parity); component extraction and all series identities use
  the slices.
* The Poisson kernel is calibrated against NORMALIZED measures: with
  kappa = c_sigma the identity
      avg_zeta avg_u [ kappa * core(zeta,x,u,v) h(u) ] -> h(v)
  holds for x-independent harmonic h, where
      core = (1-|x|^2)/|x-zeta|^m * Z_k(R_{x-zeta}(u), v)
  and R_a(u) = u - 2<a,u>a/|a|^2 is the hyperplane reflection.  The
  raw-measure constant of the classical formulation is
  c/2 = c_sigma / omega_m.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from . import linalg
from .harmonic import _gegenbauer_coeffs, hk_basis, zonal_kernel
from .moments import ball_moment, sphere_moment
from .operator import OperatorParams, bl_basis, fischer_decompose
from .polynomials import PolyXU, term_order_key
from .quadrature import quad_rule
from .scalars import ScaledRational, ZERO, sphere_area


def moment(alpha, domain, m):
    """Raw monomial moment over the sphere or ball; omega grade 1."""
    alpha = tuple(alpha)
    if domain == "sphere":
        return sphere_moment(alpha, m)
    if domain == "ball":
        return ball_moment(alpha, m)
    raise ValueError("domain must be 'sphere' or 'ball'")


def _moment_fn(domain):
    if domain == "sphere":
        return sphere_moment
    if domain == "ball":
        return ball_moment
    raise ValueError("domain must be 'sphere' or 'ball'")


def _inner(f, g, domain):
    if f.m != g.m:
        raise ValueError("dimension mismatch")
    m = f.m
    mom = _moment_fn(domain)
    # bucket g terms by parity class so odd-moment pairs are skipped
    by_parity = {}
    for (a, b), c in g.terms.items():
        cls = (tuple(e % 2 for e in a), tuple(e % 2 for e in b))
        by_parity.setdefault(cls, []).append((a, b, c))
    acc = ZERO
    for (a1, b1), c1 in f.terms.items():
        cls = (tuple(e % 2 for e in a1), tuple(e % 2 for e in b1))
        for a2, b2, c2 in by_parity.get(cls, ()):
            mx = mom(tuple(p + q for p, q in zip(a1, a2)), m)
            if mx.is_zero():
                continue
            mu = mom(tuple(p + q for p, q in zip(b1, b2)), m)
            if mu.is_zero():
                continue
            acc = acc + c1 * c2 * mx * mu
    return acc


def inner_ss(f, g):
    """Double-sphere inner product, raw surface measure; grade 2."""
    return _inner(f, g, "sphere")


def inner_bb(f, g):
    """Double-ball inner product, raw volume measure; grade 2."""
    return _inner(f, g, "ball")


def integrate_block(p, block, domain):
    """Integrate one variable block out against the raw measure; the
    result is a polynomial in the remaining block (grade rises by 1)."""
    m = p.m
    mom = _moment_fn(domain)
    zero = (0,) * m
    out = PolyXU(m)
    terms = {}
    for (a, b), c in p.terms.items():
        w = mom(a if block == "x" else b, m)
        if w.is_zero():
            continue
        key = (zero, b) if block == "x" else (a, zero)
        cur = terms.get(key, ZERO) + c * w
        if cur.is_zero():
            terms.pop(key, None)
        else:
            terms[key] = cur
    return PolyXU(m, terms)


def gram_matrix(vectors, domain):
    """Gram matrix of grade-0 polynomials under the raw double measure.

    Entries are mpq values; the uniform omega grade 2 is implicit.
    Assembled through the monomial moment kernel, blocked by exponent
    parity class, which keeps the cost near the support size.
    """
    if not vectors:
        return []
    m = vectors[0].m
    mom = _moment_fn(domain)
    n = len(vectors)
    keys = sorted({key for v in vectors for key in v.terms}, key=term_order_key)
    by_class = {}
    for idx, (a, b) in enumerate(keys):
        cls = (tuple(e % 2 for e in a), tuple(e % 2 for e in b))
        by_class.setdefault(cls, []).append(idx)
    G = [[mpq(0)] * n for _ in range(n)]
    for idxs in by_class.values():
        cls_keys = [keys[i] for i in idxs]
        nk = len(cls_keys)
        V = [
            [
                vectors[j].terms.get(cls_keys[i], ZERO).value
                for j in range(n)
            ]
            for i in range(nk)
        ]
        K = [[mpq(0)] * nk for _ in range(nk)]
        for i, (a1, b1) in enumerate(cls_keys):
            for j in range(i, nk):
                a2, b2 = cls_keys[j]
                mx = mom(tuple(p + q for p, q in zip(a1, a2)), m)
                if mx.is_zero():
                    continue
                mu = mom(tuple(p + q for p, q in zip(b1, b2)), m)
                if mu.is_zero():
                    continue
                K[i][j] = K[j][i] = mx.value * mu.value
        # G += V^T K V with zero-skipping
        for i in range(nk):
            Wi = [mpq(0)] * n
            row = K[i]
            for t in range(nk):
                f = row[t]
                if f != 0:
                    Vt = V[t]
                    for j in range(n):
                        if Vt[j] != 0:
                            Wi[j] += f * Vt[j]
            Vi = V[i]
            for a_ in range(n):
                va = Vi[a_]
                if va != 0:
                    Ga = G[a_]
                    for j in range(n):
                        if Wi[j] != 0:
                            Ga[j] += va * Wi[j]
    return G


@lru_cache(maxsize=None)
def _bl_gram(params, l):
    basis = bl_basis(params, l)
    return gram_matrix(list(basis.vectors), "sphere")


@dataclass(frozen=True)
class Gram:
    basis: object
    inner_tag: str  # "SS" or "BB"
    entries: tuple  # rows of mpq; omega grade 2 implicit

    def check_positive_definite(self):
        return linalg.is_positive_definite([list(r) for r in self.entries])


def bl_gram(params, l, inner_tag="SS"):
    basis = bl_basis(params, l)
    if inner_tag == "SS":
        G = _bl_gram(params, l)
    elif inner_tag == "BB":
        G = gram_matrix(list(basis.vectors), "ball")
    else:
        raise ValueError("inner_tag must be SS or BB")
    return Gram(basis=basis, inner_tag=inner_tag, entries=tuple(tuple(r) for r in G))


# -- Kernel4 ----------------------------------------------------------


class Kernel4:
    """Polynomial in four m-variable blocks (zeta, x, u, v)."""

    __slots__ = ("m", "terms")

    def __init__(self, m, terms=None):
        self.m = int(m)
        clean = {}
        if terms:
            for key, c in terms.items():
                if not isinstance(c, ScaledRational):
                    c = ScaledRational(mpq(c))
                if c.is_zero():
                    continue
                clean[tuple(tuple(e) for e in key)] = c
        self.terms = clean

    def __eq__(self, other):
        if not isinstance(other, Kernel4):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def add_term(self, key, c):
        cur = self.terms.get(key, ZERO) + c
        if cur.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = cur

    def __add__(self, other):
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        out = Kernel4(self.m, dict(self.terms))
        for key, c in other.terms.items():
            out.add_term(key, c)
        return out

    def scale(self, c):
        if not isinstance(c, ScaledRational):
            c = ScaledRational(mpq(c))
        return Kernel4(self.m, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        out = Kernel4(self.m)
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(
                    tuple(p + q for p, q in zip(e1, e2))
                    for e1, e2 in zip(k1, k2)
                )
                out.add_term(key, c1 * c2)
        return out

    def x_slice(self, d):
        """Terms whose x-block total degree is exactly d."""
        return Kernel4(
            self.m,
            {key: c for key, c in self.terms.items() if sum(key[1]) == d},
        )

    def swap_symmetric(self):
        """True iff K(zeta,x,u,v) = K(x,zeta,v,u) coefficient-wise."""
        for (az, ax, bu, bv), c in self.terms.items():
            if self.terms.get((ax, az, bv, bu), ZERO) != c:
                return False
        return True

    def evaluate(self, zeta, x, u, v):
        pts = [list(map(float, p)) for p in (zeta, x, u, v)]
        total = 0.0
        for key, c in self.terms.items():
            val = c.numeric(self.m)
            for p, exps in zip(pts, key):
                for t, e in zip(p, exps):
                    if e:
                        val *= t**e
            total += val
        return total

    def pair_ss(self, f):
        """Contract the (zeta, u) blocks against f(zeta, u) with raw
        sphere measures; returns a PolyXU in (x, v) (stored with x in
        the x block and v in the u block)."""
        if f.m != self.m:
            raise ValueError("dimension mismatch")
        m = self.m
        out_terms = {}
        by_parity = {}
        for (a, b), c in f.terms.items():
            cls = (tuple(e % 2 for e in a), tuple(e % 2 for e in b))
            by_parity.setdefault(cls, []).append((a, b, c))
        for (az, ax, bu, bv), ck in self.terms.items():
            cls = (tuple(e % 2 for e in az), tuple(e % 2 for e in bu))
            for a, b, cf in by_parity.get(cls, ()):
                mz = sphere_moment(tuple(p + q for p, q in zip(az, a)), m)
                if mz.is_zero():
                    continue
                mu = sphere_moment(tuple(p + q for p, q in zip(bu, b)), m)
                if mu.is_zero():
                    continue
                key = (ax, bv)
                cur = out_terms.get(key, ZERO) + ck * cf * mz * mu
                if cur.is_zero():
                    out_terms.pop(key, None)
                else:
                    out_terms[key] = cur
        return PolyXU(m, out_terms)

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda kv: tuple(
                (sum(e), e) for e in kv[0]
            ),
        )

    def to_json(self):
        return {
            "m": self.m,
            "terms": [
                {
                    "zeta": list(az),
                    "x": list(ax),
                    "u": list(bu),
                    "v": list(bv),
                    **c.to_json(),
                }
                for (az, ax, bu, bv), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj):
        m = int(obj["m"])
        terms = {}
        for t in obj["terms"]:
            key = tuple(
                tuple(int(e) for e in t[name]) for name in ("zeta", "x", "u", "v")
            )
            terms[key] = ScaledRational.from_json(t)
        return cls(m, terms)


@lru_cache(maxsize=None)
def jlk_kernel(params, l):
    """Reproducing kernel J_{l,k}(zeta, x, u, v) of B_l under the raw
    double-sphere inner product; omega grade -2, no square roots."""
    basis = bl_basis(params, l)
    n = len(basis)
    G = _bl_gram(params, l)
    ident = [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)]
    Ginv = linalg.solve_batched([list(r) for r in G], ident)
    out = Kernel4(params.m)
    for i in range(n):
        bi = basis.vectors[i].terms  # (x, v) slot
        for j in range(n):
            g = Ginv[i][j]
            if g == 0:
                continue
            gj = ScaledRational(g, -2)
            for (ax, bv), ci in bi.items():
                for (az, bu), cj in basis.vectors[j].terms.items():
                    out.add_term((az, ax, bu, bv), ci * cj * gj)
    return out


# -- exact homogeneous slices of the Poisson kernel -------------------
#
# The Poisson kernel P(zeta,x,u,v) = (c/2) (1-|x|^2)/|x-zeta|^m
#                                    * Z_k(R_{x-zeta}(u), v)   (raw dS)
# is, for fixed zeta on the sphere, analytic in x around 0.  Its
# x-homogeneous slice of degree l is an exact polynomial in all four
# blocks (valid for |zeta| = 1), obtained from the Gegenbauer generating
# function (1 - 2<x,zeta> + |x|^2)^(-lam) = sum_n G_n(x, zeta) with
# lam = (m + 2k)/2, after clearing the reflection denominators:
#
#     P = (c/2) (1 - |x|^2) N(zeta,x,u,v) / |x-zeta|^(m+2k),
#     N = |x-zeta|^(2k) Z_k(R_{x-zeta}(u), v)   (a polynomial).
#
# These slices pairwise separate the spaces B_l: pairing the degree-l
# slice against any g in B_s gives g for s = l and exactly 0 otherwise,
# which is the identity powering component extraction and the series
# checks.  Note the slices are NOT the in-space Gram kernels of
# jlk_kernel: the spaces B_l are not mutually orthogonal under the
# double-sphere inner product (see project_Bl), so the two kernel
# families genuinely differ for k >= 1.


def _k4_monomial(m, block, exps, coeff):
    key = [(0,) * m] * 4
    key[block] = tuple(exps)
    return Kernel4(m, {tuple(key): coeff})


@lru_cache(maxsize=None)
def _k4_pair_xz(m):
    """<x, zeta> as a Kernel4."""
    out = Kernel4(m)
    for i in range(m):
        e = tuple(1 if j == i else 0 for j in range(m))
        zero = (0,) * m
        out.add_term((e, e, zero, zero), ScaledRational(mpq(1)))
    return out


@lru_cache(maxsize=None)
def _k4_xsq(m):
    """|x|^2 as a Kernel4."""
    out = Kernel4(m)
    zero = (0,) * m
    for i in range(m):
        e = tuple(2 if j == i else 0 for j in range(m))
        out.add_term((zero, e, zero, zero), ScaledRational(mpq(1)))
    return out


@lru_cache(maxsize=None)
def _k4_reflect_numerators(m):
    """W_i = |x-zeta|^2 u_i - 2 <x-zeta, u> (x-zeta)_i, the cleared
    numerator of the reflection R_{x-zeta}(u)."""
    zero = (0,) * m

    def unit(i):
        return tuple(1 if j == i else 0 for j in range(m))

    a = []  # a_i = x_i - zeta_i
    for i in range(m):
        t = Kernel4(m)
        t.add_term((zero, unit(i), zero, zero), ScaledRational(mpq(1)))
        t.add_term((unit(i), zero, zero, zero), ScaledRational(mpq(-1)))
        a.append(t)
    asq = Kernel4(m)
    for t in a:
        asq = asq + t * t
    au = Kernel4(m)
    for i in range(m):
        u_i = _k4_monomial(m, 2, unit(i), ScaledRational(mpq(1)))
        au = au + a[i] * u_i
    ws = []
    for i in range(m):
        u_i = _k4_monomial(m, 2, unit(i), ScaledRational(mpq(1)))
        ws.append(asq * u_i + (au * a[i]).scale(mpq(-2)))
    return tuple(ws)


@lru_cache(maxsize=None)
def _poisson_numerator(params):
    """N = |x-zeta|^(2k) Z_k(R_{x-zeta}(u), v) with raw-measure Z_k,
    as a polynomial (x-degree at most 2k); omega grade -1."""
    m, k = params.m, params.k
    z = zonal_kernel(m, k)  # first arg in x block, second in u block
    ws = _k4_reflect_numerators(m)
    one = Kernel4(m, {((0,) * m,) * 4: ScaledRational(mpq(1))})
    out = Kernel4(m)
    for (alpha, beta), c in z.terms.items():
        term = one.scale(c * ScaledRational(mpq(1), -1))
        for i, e in enumerate(alpha):
            for _ in range(e):
                term = term * ws[i]
        term = term * _k4_monomial(m, 3, beta, ScaledRational(mpq(1)))
        out = out + term
    return out


@lru_cache(maxsize=None)
def _expansion_slice(params, n):
    """Degree-n x-homogeneous slice of |x-zeta|^(-(m+2k)) for zeta on
    the unit sphere: sum_i c_i <x,zeta>^i (|x|^2)^((n-i)/2) with c_i the
    Gegenbauer coefficients at index lam = (m+2k)/2."""
    m, k = params.m, params.k
    coeffs = _gegenbauer_coeffs(n, mpq(m + 2 * k, 2))
    pair = _k4_pair_xz(m)
    xsq = _k4_xsq(m)
    out = Kernel4(m)
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        term = Kernel4(m, {((0,) * m,) * 4: ScaledRational(c)})
        for _ in range(i):
            term = term * pair
        for _ in range((n - i) // 2):
            term = term * xsq
        out = out + term
    return out


@lru_cache(maxsize=None)
def _poisson_product_slice(params, d):
    """Degree-d x-slice of N(zeta,x,u,v) * |x-zeta|^(-(m+2k))."""
    if d < 0:
        return Kernel4(params.m)
    n_parts = _poisson_numerator(params)
    out = Kernel4(params.m)
    for d2 in range(0, min(d, 2 * params.k) + 1):
        part = n_parts.x_slice(d2)
        if part.is_zero():
            continue
        out = out + part * _expansion_slice(params, d - d2)
    return out


@lru_cache(maxsize=None)
def poisson_degree_kernel(params, l):
    """Exact x-homogeneous degree-l slice of the Poisson kernel (raw
    double-dS convention, valid for zeta on the unit sphere).

    Pairing it over (zeta, u) against g in B_s returns g exactly when
    s = l and the zero polynomial otherwise; the slices sum to the full
    Poisson kernel.  Coefficients carry omega grade -2.
    """
    m, k = params.m, params.k
    c_half = ScaledRational(mpq(m + 2 * k - 2, m - 2), -1)
    sl = _poisson_product_slice(params, l)
    sl2 = _poisson_product_slice(params, l - 2)
    if not sl2.is_zero():
        sl = sl + (_k4_xsq(m) * sl2).scale(mpq(-1))
    return sl.scale(c_half)


@lru_cache(maxsize=None)
def _slice_component_matrix(params, l, s):
    """Exact matrix of f |-> pairing of f against the degree-l Poisson
    slice, from the monomial-times-harmonic coordinates of x-degree-s
    input to those of the x-degree-l output; entries are plain mpq
    (the omega grades of the slice and the two moments cancel)."""
    from .operator import _coords, _space_meta

    m, k = params.m, params.k
    J = poisson_degree_kernel(params, l)
    alphas, hkb, keys_in = _space_meta(m, k, s)
    zero = (0,) * m
    cols = []
    for alpha in alphas:
        xa = PolyXU.monomial(m, alpha, zero, 1)
        for hv in hkb.vectors:
            img = J.pair_ss(xa * hv)
            cols.append(_coords(img, m, k, l))
    n_out = len(cols[0]) if cols else 0
    return tuple(
        tuple(cols[c][r] for c in range(len(cols))) for r in range(n_out)
    )


def _slice_component(f, params, l, s):
    """Degree-l slice component of x-homogeneous f of degree s through
    the cached coordinate matrix."""
    from .operator import _coords, _poly_from_coords

    if l > s or (s - l) % 2:
        return PolyXU(params.m)
    M = _slice_component_matrix(params, l, s)
    vec = _coords(f, params.m, params.k, s)
    out = []
    for row in M:
        acc = mpq(0)
        for a, b in zip(row, vec):
            if a and b:
                acc += a * b
        out.append(acc)
    return _poly_from_coords(out, params.m, params.k, l)


def project_Bl(f, params, l):
    """Degree-l component map: the pairing of f over (zeta, u) against
    the degree-l Poisson slice kernel.

    For x-homogeneous f of degree s this returns the degree-l piece of
    the descending decomposition (zero when parity or degree rules it
    out).  This is NOT the orthogonal projection onto B_l: the spaces
    B_s with the same k are not mutually orthogonal under the
    double-sphere inner product (e.g. at m=3, k=1 the pairing of u1
    against x1^2 u1 + |x|^2 u1 / 5 is 8 omega^2 / 45, both being null
    solutions), so the component map and the Gram projection disagree
    on inputs outside B_l.
    """
    s = f.deg_x()
    if f.is_homogeneous("x", s):
        return _slice_component(f, params, l, s)
    return poisson_degree_kernel(params, l).pair_ss(f)


def bergman_project(f, params):
    """Projection of an x-homogeneous f onto the null solutions of the
    ball Bergman space, computed two independent ways; both must agree
    exactly.

    Route A contracts f against the kernel series: the degree-l slice
    term carries ball weight (m+2k)^-1 (m+l+s)^-1 times the sphere
    pairing (polar reduction of the l-homogeneous slice against the
    s-homogeneous input) and series weight (m+2l)(m+2k).  Route B
    rescales the descending decomposition components by
    (m+2l)/(m+l+s).  Returns (routeA, routeB).
    """
    m, k = params.m, params.k
    s = f.deg_x()
    if not f.is_homogeneous("x", s):
        raise ValueError("input must be x-homogeneous")
    routeA = PolyXU(m)
    for l in range(s % 2, s + 1, 2):
        comp = _slice_component(f, params, l, s)
        if comp:
            routeA = routeA + comp.scale(ScaledRational(mpq(m + 2 * l, m + l + s)))
    routeB = PolyXU(m)
    fd = fischer_decompose(f, params, s)
    for j, comp in fd.components:
        if comp:
            routeB = routeB + comp.scale(ScaledRational(mpq(m + 2 * j, m + j + s)))
    if routeA != routeB:
        raise AssertionError("projection routes disagree; invariant breach")
    return routeA, routeB


def bergman_kernel_truncated(params, L):
    """Partial sum sum_{l<=L} (m+2l)(m+2k) * (degree-l Poisson slice);
    exact.  Ball contractions against the (zeta, u) slots of this
    kernel must go through the polar reduction per slice degree (see
    bergman_kernel_apply); the slice representations are only valid for
    zeta on the unit sphere."""
    if L < 0:
        raise ValueError("truncation level must be non-negative")
    m, k = params.m, params.k
    out = Kernel4(m)
    for l in range(L + 1):
        out = out + poisson_degree_kernel(params, l).scale(
            mpq((m + 2 * l) * (m + 2 * k))
        )
    return out


def bergman_kernel_apply(params, L, f):
    """Ball contraction of the truncated kernel series against an
    x-homogeneous f: each degree-l slice term is reduced to a sphere
    pairing with the polar factor (m+2k)^-1 (m+l+s)^-1.  For f in B_s
    with s <= L this reproduces f exactly."""
    m, k = params.m, params.k
    s = f.deg_x()
    if not f.is_homogeneous("x", s):
        raise ValueError("input must be x-homogeneous")
    out = PolyXU(m)
    for l in range(L + 1):
        comp = _slice_component(f, params, l, s)
        if comp:
            out = out + comp.scale(ScaledRational(mpq(m + 2 * l, m + l + s)))
    return out


# -- Poisson kernel ----------------------------------------------------


def vector_reflect(a, u):
    """Reflection u - 2<a,u>a/|a|^2 across the hyperplane orthogonal to
    a (numeric); matches PolyXU.reflect_u."""
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    n2 = float(np.dot(a, a))
    return u - 2.0 * float(np.dot(a, u)) / n2 * a


@dataclass(frozen=True)
class PoissonKernelSpec:
    m: int
    k: int
    c_sigma: float  # constant in the normalized-measure convention
    c_mk: ScaledRational  # exact c_{m,k} in the raw-dS convention (grade -1)
    kappa_numeric: float  # raw value from the scaling equation
    residual: float  # calibration residual


class _ZonalEvaluator:
    """Vectorized numeric evaluation of Z_k over batches of u points."""

    def __init__(self, m, k):
        z = zonal_kernel(m, k)
        keys = list(z.terms)
        self.A = np.array([key[0] for key in keys], dtype=float)
        self.B = np.array([key[1] for key in keys], dtype=float)
        self.c = np.array([z.terms[key].numeric(m) for key in keys])
        self.m = m

    def eval_many(self, U, v):
        """Z(U_i, v) for U of shape (N, m)."""
        v = np.asarray(v, dtype=float)
        vb = np.prod(v[None, :] ** self.B, axis=1)
        ua = np.prod(U[:, None, :] ** self.A[None, :, :], axis=2)
        return ua @ (self.c * vb)

    def eval_grid(self, U, V):
        """Z(U_i, V_j) as an (NU, NV) matrix."""
        ua = np.prod(U[:, None, :] ** self.A[None, :, :], axis=2)
        vb = np.prod(V[:, None, :] ** self.B[None, :, :], axis=2)
        return (ua * self.c[None, :]) @ vb.T


@lru_cache(maxsize=None)
def _zonal_evaluator(m, k):
    return _ZonalEvaluator(m, k)


def poisson_core_many(m, k, zetas, x, U, v):
    """core(zeta_i, x, U_i, v) for paired arrays of zeta and u points:
    (1-|x|^2)/|x-zeta|^m * Z_k(R_{x-zeta}(u), v)."""
    x = np.asarray(x, dtype=float)
    zetas = np.asarray(zetas, dtype=float)
    U = np.asarray(U, dtype=float)
    a = x[None, :] - zetas
    n2 = np.sum(a * a, axis=1)
    refl = U - 2.0 * (np.sum(a * U, axis=1) / n2)[:, None] * a
    zvals = _zonal_evaluator(m, k).eval_many(refl, v)
    pk = (1.0 - float(np.dot(x, x))) / n2 ** (m / 2.0)
    return pk * zvals


def poisson_sigma_value(spec, zeta, x, u, v):
    """Calibrated kernel in the normalized-measure convention."""
    core = poisson_core_many(
        spec.m,
        spec.k,
        np.asarray([zeta], dtype=float),
        x,
        np.asarray([u], dtype=float),
        v,
    )[0]
    return spec.c_sigma * core


def calibrate_cmk(params, degree=None):
    """Determine the Poisson constant by requiring x-independent
    harmonic boundary data h(u) to reproduce as h(v).

    Solves the single scaling equation at x = 0 and validates the
    result at several v and all basis h; the residual must be tiny, or
    the configuration is broken.
    """
    m, k = params.m, params.k
    if degree is None:
        degree = max(2 * k + 4, 6)
    rule = quad_rule(m, degree)
    basis = hk_basis(m, k)
    nodes = rule.nodes
    wts = rule.weights
    nz = len(nodes)
    x0 = np.zeros(m)

    def avg_core(h, v):
        # double normalized average of core * h(u)
        hvals = np.array(
            [h.evaluate((0.0,) * m, tuple(p)) for p in nodes], dtype=float
        )
        total = 0.0
        for zi in range(nz):
            Z = np.repeat(nodes[zi : zi + 1], nz, axis=0)
            core = poisson_core_many(m, k, Z, x0, nodes, v)
            total += wts[zi] * float(np.dot(wts, core * hvals))
        return total

    v0 = np.zeros(m)
    v0[0] = 0.7
    if k == 0:
        v0 = np.zeros(m)
    alt0 = np.zeros(m)
    alt0[:2] = (0.4, -0.3)
    # the scaling equation needs data with a well-separated target
    # value; some basis vectors vanish at a given v, so scan for one
    h0, target = None, 0.0
    for v_try in (v0, alt0):
        for h in basis.vectors:
            t = h.evaluate((0.0,) * m, tuple(v_try))
            if abs(t) > 0.05:
                h0, v0, target = h, v_try, t
                break
        if h0 is not None:
            break
    if h0 is None:
        raise AssertionError("no usable calibration data found")
    got = avg_core(h0, v0)
    kappa = target / got
    # validate against the closed form and other data
    expected = mpq(m + 2 * k - 2, m - 2)
    residual = abs(kappa - float(expected)) / float(expected)
    vs = [v0]
    alt = np.zeros(m)
    alt[: 2] = (0.4, -0.3)
    vs.append(alt)
    for h in basis.vectors[: min(2, len(basis))]:
        for v in vs:
            tgt = h.evaluate((0.0,) * m, tuple(v))
            res = abs(kappa * avg_core(h, v) - tgt)
            residual = max(residual, res)
    if residual > 1e-9:
        raise AssertionError(
            "Poisson calibration residual %.3e exceeds tolerance" % residual
        )
    c_mk = ScaledRational(2 * expected, -1)  # c/2 = kappa / omega, raw dS
    return PoissonKernelSpec(
        m=m,
        k=k,
        c_sigma=float(expected),
        c_mk=c_mk,
        kappa_numeric=kappa,
        residual=residual,
    )


def poisson_series_gap(params, spec, L, sample_points):
    """Max absolute gap between the direct kernel (raw-dS convention)
    and the partial sum of the J_{l,k} series at the given
    (zeta, x, u, v) samples; |x| <= 0.3 enforced."""
    m = params.m
    area = sphere_area(m)
    slices = [poisson_degree_kernel(params, l) for l in range(L + 1)]
    worst = 0.0
    for zeta, x, u, v in sample_points:
        if float(np.dot(x, x)) > 0.3**2 + 1e-12:
            raise ValueError("sample x must satisfy |x| <= 0.3")
        core = poisson_core_many(
            m,
            params.k,
            np.asarray([zeta], dtype=float),
            np.asarray(x, dtype=float),
            np.asarray([u], dtype=float),
            v,
        )[0]
        direct = spec.c_sigma * core / area**2
        series = sum(sl.evaluate(zeta, x, u, v) for sl in slices)
        worst = max(worst, abs(direct - series))
    return worst
