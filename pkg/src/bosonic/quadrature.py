"""Deterministic quadrature on spheres and balls.

Sphere rules are recursive Gauss products: the polar angle of S^{m-1}
uses Gauss nodes for the weight (1 - t^2)^((m-3)/2) and the remaining
factor is an S^{m-2} rule, bottoming out at equally spaced points on
the circle.  Rules are normalized (weights sum to 1, i.e. they compute
averages); raw-measure integrals multiply by the numeric sphere area or
ball volume.

Every constructed rule self-validates against the exact monomial
moments.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_gegenbauer, roots_jacobi

from .moments import ball_moment, sphere_moment
from .scalars import sphere_area

MAX_EXACTNESS = 30


@dataclass(frozen=True)
class QuadRule:
    m: int
    nodes: np.ndarray  # shape (n, m)
    weights: np.ndarray  # shape (n,), sums to 1
    exactness_degree: int
    domain: str  # "sphere" or "ball"

    def integrate(self, func):
        """Average of func over the domain: sum_i w_i func(node_i)."""
        vals = np.array([func(p) for p in self.nodes], dtype=float)
        return float(np.dot(self.weights, vals))

    def integrate_values(self, values):
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def _circle(degree):
    n = max(degree + 1, 3)
    ang = 2.0 * np.pi * np.arange(n) / n
    nodes = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    weights = np.full(n, 1.0 / n)
    return nodes, weights


def _sphere_nodes(m, degree):
    if m == 2:
        return _circle(degree)
    sub_nodes, sub_weights = _sphere_nodes(m - 1, degree)
    n_t = degree // 2 + 1
    t, wt = roots_gegenbauer(n_t, (m - 2) / 2.0)
    wt = wt / wt.sum()
    nodes = []
    weights = []
    for ti, wi in zip(t, wt):
        s = np.sqrt(max(0.0, 1.0 - ti * ti))
        block = np.concatenate(
            [s * sub_nodes, np.full((len(sub_nodes), 1), ti)], axis=1
        )
        nodes.append(block)
        weights.append(wi * sub_weights)
    return np.concatenate(nodes), np.concatenate(weights)


def _validate(rule):
    m = rule.m
    deg = rule.exactness_degree
    area = sphere_area(m)
    checks = []
    for d in range(0, min(deg, 8) + 1, 2):
        alpha = [0] * m
        alpha[0] = d
        checks.append(tuple(alpha))
        if m >= 2 and d >= 2:
            alpha = [0] * m
            alpha[0] = d - 2
            alpha[-1] = 2
            checks.append(tuple(alpha))
    for alpha in checks:
        if rule.domain == "sphere":
            exact = sphere_moment(alpha, m).numeric(m) / area
        else:
            exact = ball_moment(alpha, m).numeric(m) / (area / m)
        got = float(
            np.dot(
                rule.weights,
                np.prod(rule.nodes ** np.array(alpha), axis=1),
            )
        )
        scale = max(abs(exact), 1.0)
        if abs(got - exact) > 1e-12 * scale:
            raise AssertionError(
                "quadrature self-validation failed for %s: %r vs %r"
                % (alpha, got, exact)
            )
    return rule


@lru_cache(maxsize=None)
def quad_rule(m, exactness_degree):
    """Normalized sphere rule on S^{m-1} exact to the given degree."""
    if m not in (3, 4, 5):
        raise ValueError("sphere rules support m in {3,4,5}")
    if not 0 <= exactness_degree <= MAX_EXACTNESS:
        raise ValueError("exactness degree must be in [0, %d]" % MAX_EXACTNESS)
    nodes, weights = _sphere_nodes(m, max(exactness_degree, 2))
    weights = weights / weights.sum()
    rule = QuadRule(
        m=m,
        nodes=nodes,
        weights=weights,
        exactness_degree=exactness_degree,
        domain="sphere",
    )
    return _validate(rule)


@lru_cache(maxsize=None)
def ball_rule(m, exactness_degree):
    """Normalized ball rule (weights sum to 1; multiply by volume
    omega_m / m for raw integrals)."""
    sphere = quad_rule(m, exactness_degree)
    n_r = exactness_degree // 2 + 1
    # int_0^1 r^{m-1} g(r) dr via Gauss-Jacobi with weight (1+x)^{m-1}
    xs, ws = roots_jacobi(n_r, 0.0, float(m - 1))
    r = (xs + 1.0) / 2.0
    wr = ws / (2.0**m)
    wr = wr / wr.sum() * (1.0)  # normalized against int r^{m-1} dr = 1/m
    nodes = []
    weights = []
    for ri, wi in zip(r, wr):
        nodes.append(ri * sphere.nodes)
        weights.append(wi * sphere.weights)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    weights = weights / weights.sum()
    rule = QuadRule(
        m=m,
        nodes=nodes,
        weights=weights,
        exactness_degree=exactness_degree,
        domain="ball",
    )
    return _validate(rule)
