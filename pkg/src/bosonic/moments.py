"""Exact monomial moments over the unit sphere and ball.

The raw surface moment of x^alpha over S^{m-1} is

    omega_m * prod_i (alpha_i - 1)!! / prod_{j=0}^{|alpha|/2 - 1} (m + 2j)

when every alpha_i is even, and zero otherwise; ball moments divide by
m + |alpha|.  Results carry omega grade 1 so they combine exactly with
graded coefficients.
"""

from functools import lru_cache

from gmpy2 import mpq

from .scalars import ScaledRational, ZERO


def _double_factorial(n):
    # (-1)!! = 1 by convention
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def sphere_moment(alpha, m):
    """Integral of x^alpha over S^{m-1} with respect to raw surface
    measure dS; ScaledRational of omega grade 1 (zero if any exponent is
    odd)."""
    if len(alpha) != m:
        raise ValueError("multi-index length must equal m")
    if any(a % 2 for a in alpha):
        return ZERO
    total = sum(alpha)
    num = 1
    for a in alpha:
        num *= _double_factorial(a - 1)
    den = 1
    for j in range(total // 2):
        den *= m + 2 * j
    return ScaledRational(mpq(num, den), 1)


@lru_cache(maxsize=None)
def ball_moment(alpha, m):
    """Integral of x^alpha over the unit ball; omega grade 1."""
    s = sphere_moment(alpha, m)
    if s.is_zero():
        return ZERO
    return ScaledRational(s.value / (m + sum(alpha)), 1)
