"""Sparse exact polynomials in two m-variable blocks x and u.

Terms are keyed by a pair of multi-indices (alpha for x, beta for u) and
carry ScaledRational coefficients.  Canonical term order is graded lex on
(alpha, beta): total degree first, then x-degree, then the exponent
tuples lexicographically.  All operations are pure; instances should be
treated as immutable.
"""

from gmpy2 import mpq

from .scalars import ScaledRational, ZERO, sphere_area


def _as_coeff(c):
    if isinstance(c, ScaledRational):
        return c
    return ScaledRational(mpq(c))


def term_order_key(key):
    alpha, beta = key
    return (sum(alpha) + sum(beta), sum(alpha), alpha, beta)


class PolyXU:
    """Polynomial in x = (x_1..x_m) and u = (u_1..u_m), exact coefficients.

    terms maps (alpha, beta) -> ScaledRational; zero coefficients are
    never stored.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m, terms=None):
        self.m = int(m)
        clean = {}
        if terms:
            for key, c in terms.items():
                c = _as_coeff(c)
                if c.is_zero():
                    continue
                alpha, beta = key
                if len(alpha) != self.m or len(beta) != self.m:
                    raise ValueError("multi-index length must equal m")
                clean[(tuple(alpha), tuple(beta))] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, m):
        return cls(m)

    @classmethod
    def constant(cls, m, c):
        z = (0,) * m
        return cls(m, {(z, z): _as_coeff(c)})

    @classmethod
    def variable(cls, m, block, index):
        """Monomial x_index or u_index (index is 1-based)."""
        if not 1 <= index <= m:
            raise IndexError("variable index out of range")
        z = (0,) * m
        e = tuple(1 if i == index - 1 else 0 for i in range(m))
        key = (e, z) if block == "x" else (z, e)
        return cls(m, {key: ScaledRational(1)})

    @classmethod
    def monomial(cls, m, alpha, beta, c=1):
        return cls(m, {(tuple(alpha), tuple(beta)): _as_coeff(c)})

    @classmethod
    def norm_sq(cls, m, block):
        """|x|^2 or |u|^2."""
        terms = {}
        z = (0,) * m
        for i in range(m):
            e = tuple(2 if j == i else 0 for j in range(m))
            key = (e, z) if block == "x" else (z, e)
            terms[key] = ScaledRational(1)
        return cls(m, terms)

    @classmethod
    def pairing(cls, m):
        """The bilinear form <x, u>."""
        terms = {}
        for i in range(m):
            e = tuple(1 if j == i else 0 for j in range(m))
            terms[(e, e)] = ScaledRational(1)
        return cls(m, terms)

    # -- basic queries ------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, alpha, beta):
        return self.terms.get((tuple(alpha), tuple(beta)), ZERO)

    def deg_x(self):
        return max((sum(a) for a, _ in self.terms), default=0)

    def deg_u(self):
        return max((sum(b) for _, b in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: term_order_key(kv[0]))

    def __eq__(self, other):
        if not isinstance(other, PolyXU):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    # -- ring operations ----------------------------------------------

    def _check_m(self, other):
        if self.m != other.m:
            raise ValueError("dimension mismatch: %d vs %d" % (self.m, other.m))

    def __add__(self, other):
        self._check_m(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            s = terms.get(key, ZERO) + c
            if s.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = s
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = terms
        return out

    def __neg__(self):
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = {key: -c for key, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (ScaledRational, int, mpq)):
            return self.scale(other)
        self._check_m(other)
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (
                    tuple(p + q for p, q in zip(a1, a2)),
                    tuple(p + q for p, q in zip(b1, b2)),
                )
                s = terms.get(key, ZERO) + c1 * c2
                if s.is_zero():
                    terms.pop(key, None)
                else:
                    terms[key] = s
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = terms
        return out

    __rmul__ = __mul__

    def scale(self, c):
        c = _as_coeff(c)
        if c.is_zero():
            return PolyXU(self.m)
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = {key: v * c for key, v in self.terms.items()}
        return out

    # -- calculus -----------------------------------------------------

    def diff(self, block, index):
        """Exact partial derivative, index 1-based."""
        if not 1 <= index <= self.m:
            raise IndexError("derivative index out of range")
        i = index - 1
        pos = 0 if block == "x" else 1
        terms = {}
        for (a, b), c in self.terms.items():
            mi = (a, b)[pos]
            e = mi[i]
            if e == 0:
                continue
            new = list(mi)
            new[i] = e - 1
            new = tuple(new)
            key = (new, b) if pos == 0 else (a, new)
            s = terms.get(key, ZERO) + c * e
            if s.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = s
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = terms
        return out

    def homogeneous_part(self, block, degree):
        pos = 0 if block == "x" else 1
        terms = {
            key: c for key, c in self.terms.items() if sum(key[pos]) == degree
        }
        out = PolyXU.__new__(PolyXU)
        out.m = self.m
        out.terms = terms
        return out

    def degrees_present(self, block):
        pos = 0 if block == "x" else 1
        return sorted({sum(key[pos]) for key in self.terms})

    def is_homogeneous(self, block, degree):
        pos = 0 if block == "x" else 1
        return all(sum(key[pos]) == degree for key in self.terms)

    # -- evaluation and substitution ----------------------------------

    def evaluate(self, x_point, u_point):
        """Value at a point.

        Exact (mpq) when all inputs are exact and every coefficient has
        omega grade zero; float otherwise, with omega_m substituted
        numerically.
        """
        if len(x_point) != self.m or len(u_point) != self.m:
            raise ValueError("point length must equal m")
        exact_in = all(
            not isinstance(t, float) for t in tuple(x_point) + tuple(u_point)
        )
        graded = any(c.omega_pow != 0 for c in self.terms.values())
        if exact_in and not graded:
            xs = [mpq(t) for t in x_point]
            us = [mpq(t) for t in u_point]
            total = mpq(0)
            for (a, b), c in self.terms.items():
                v = c.value
                for t, e in zip(xs, a):
                    if e:
                        v *= t**e
                for t, e in zip(us, b):
                    if e:
                        v *= t**e
                total += v
            return total
        xs = [float(t) for t in x_point]
        us = [float(t) for t in u_point]
        total = 0.0
        for (a, b), c in self.terms.items():
            v = c.numeric(self.m)
            for t, e in zip(xs, a):
                if e:
                    v *= t**e
            for t, e in zip(us, b):
                if e:
                    v *= t**e
            total += v
        return total

    def substitute_u(self, images):
        """Replace each u_i by images[i] (a PolyXU); x is untouched."""
        if len(images) != self.m:
            raise ValueError("need one image per u variable")
        # group by beta so each substituted monomial is built once
        out = PolyXU(self.m)
        by_beta = {}
        for (a, b), c in self.terms.items():
            by_beta.setdefault(b, []).append((a, c))
        for b, parts in by_beta.items():
            prod = PolyXU.constant(self.m, 1)
            for i, e in enumerate(b):
                for _ in range(e):
                    prod = prod * images[i]
            base = PolyXU(self.m)
            for a, c in parts:
                base = base + PolyXU.monomial(self.m, a, (0,) * self.m, c)
            out = out + base * prod
        return out

    def reflect_u(self, a):
        """Substitute u -> u - 2<a,u>a/|a|^2, the reflection across a's
        orthogonal hyperplane composed with the identity on a-perp.

        a must be a nonzero exact rational vector.
        """
        a = [mpq(t) for t in a]
        if len(a) != self.m:
            raise ValueError("direction length must equal m")
        norm = sum(t * t for t in a)
        if norm == 0:
            raise ValueError("direction vector must be nonzero")
        images = []
        for i in range(self.m):
            img = PolyXU.variable(self.m, "u", i + 1)
            for j in range(self.m):
                c = -2 * a[i] * a[j] / norm
                if c != 0:
                    img = img + PolyXU.variable(self.m, "u", j + 1).scale(c)
            images.append(img)
        return self.substitute_u(images)

    # -- serialization ------------------------------------------------

    def to_json(self):
        return {
            "m": self.m,
            "terms": [
                {"x": list(a), "u": list(b), **c.to_json()}
                for (a, b), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj):
        m = int(obj["m"])
        terms = {}
        for t in obj["terms"]:
            key = (tuple(int(e) for e in t["x"]), tuple(int(e) for e in t["u"]))
            c = ScaledRational.from_json(t)
            if key in terms:
                raise ValueError("duplicate term in serialized polynomial")
            if not c.is_zero():
                terms[key] = c
        return cls(m, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.sorted_terms():
            factors = []
            for i, e in enumerate(a):
                if e:
                    factors.append("x%d" % (i + 1) + ("^%d" % e if e > 1 else ""))
            for i, e in enumerate(b):
                if e:
                    factors.append("u%d" % (i + 1) + ("^%d" % e if e > 1 else ""))
            body = "*".join(factors)
            cs = str(c)
            if body:
                parts.append(cs + "*" + body if cs != "1" else body)
            else:
                parts.append(cs)
        return " + ".join(parts)

    __repr__ = __str__


def laplacian(p, block):
    """Sum of second partials over the chosen block."""
    out = PolyXU(p.m)
    for i in range(1, p.m + 1):
        out = out + p.diff(block, i).diff(block, i)
    return out


def euler_pairing_x(p):
    """<u, D_x> p = sum_i u_i d(p)/dx_i."""
    out = PolyXU(p.m)
    for i in range(1, p.m + 1):
        out = out + PolyXU.variable(p.m, "u", i) * p.diff("x", i)
    return out


def mixed_pairing(p):
    """<D_u, D_x> p = sum_i d2(p)/du_i dx_i."""
    out = PolyXU(p.m)
    for i in range(1, p.m + 1):
        out = out + p.diff("u", i).diff("x", i)
    return out
