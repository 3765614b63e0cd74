"""Exact rational scalars graded by a power of the sphere area.

Every coefficient in this package is a rational number times an integer
power of omega_m, the surface area of the unit sphere in R^m.  Keeping
the omega power symbolic lets sphere and ball integrals stay exact:
a raw surface moment carries grade 1, a normalized one grade 0, the
reproducing kernels grade -2, and so on.  The grade only turns into a
float at the very end, via numeric().
"""

import math

from gmpy2 import mpq


class ScaledRational:
    """A rational number times omega_m**omega_pow.

    Canonical form: value 0 always has omega_pow 0.  Addition requires
    both operands to sit at the same grade (or be zero); multiplication
    adds grades.  Instances are immutable.
    """

    __slots__ = ("value", "omega_pow")

    def __init__(self, value=0, omega_pow=0):
        value = mpq(value)
        if value == 0:
            omega_pow = 0
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "omega_pow", int(omega_pow))

    def __setattr__(self, name, val):
        raise AttributeError("ScaledRational is immutable")

    def is_zero(self):
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __add__(self, other):
        other = _coerce(other)
        if self.value == 0:
            return other
        if other.value == 0:
            return self
        if self.omega_pow != other.omega_pow:
            raise ValueError(
                "cannot add scalars of omega grade %d and %d"
                % (self.omega_pow, other.omega_pow)
            )
        return ScaledRational(self.value + other.value, self.omega_pow)

    __radd__ = __add__

    def __neg__(self):
        return ScaledRational(-self.value, self.omega_pow)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return ScaledRational(self.value * other.value, self.omega_pow + other.omega_pow)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.value == 0:
            raise ZeroDivisionError("division by zero ScaledRational")
        return ScaledRational(self.value / other.value, self.omega_pow - other.omega_pow)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.value == other.value and self.omega_pow == other.omega_pow

    def __hash__(self):
        return hash((self.value, self.omega_pow))

    def __repr__(self):
        if self.omega_pow == 0:
            return "ScaledRational(%s)" % self.value
        return "ScaledRational(%s, omega_pow=%d)" % (self.value, self.omega_pow)

    def __str__(self):
        if self.omega_pow == 0:
            return str(self.value)
        return "%s*w^%d" % (self.value, self.omega_pow)

    @property
    def num(self):
        return self.value.numerator

    @property
    def den(self):
        return self.value.denominator

    def numeric(self, m=None):
        """Float value, substituting omega_m = 2*pi^(m/2)/Gamma(m/2).

        m may be omitted when the grade is zero.
        """
        if self.omega_pow == 0:
            return float(self.value)
        if m is None:
            raise ValueError("omega grade %d needs m to evaluate" % self.omega_pow)
        return float(self.value) * sphere_area(m) ** self.omega_pow

    def to_json(self):
        return {
            "num": str(self.num),
            "den": str(self.den),
            "omega": self.omega_pow,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(mpq(int(obj["num"]), int(obj["den"])), int(obj.get("omega", 0)))


def _coerce(x):
    if isinstance(x, ScaledRational):
        return x
    return ScaledRational(mpq(x))


ZERO = ScaledRational(0)
ONE = ScaledRational(1)


def sphere_area(m):
    """Surface area of the unit sphere S^{m-1} as a float."""
    if m < 2:
        raise ValueError("m must be at least 2")
    return 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)
