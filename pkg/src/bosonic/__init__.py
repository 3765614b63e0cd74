"""Exact arithmetic for a second-order conformally invariant operator
on harmonic-polynomial-valued functions: null-solution spaces,
Dirichlet solves, descending decompositions, reproducing and Bergman
kernels, plus quadrature numerics for Poisson integrals and Hardy-type
growth bounds.
"""

from .scalars import ScaledRational, sphere_area
from .polynomials import PolyXU, laplacian
from .expr import ParseError, parse_poly
from .moments import ball_moment, sphere_moment
from .harmonic import (
    SubspaceBasis,
    harmonic_project_u,
    hk_basis,
    hk_dimension,
    zonal_kernel,
)
from .operator import (
    FischerDecomposition,
    OperatorParams,
    apply_Dk,
    bl_basis,
    check_nonvanishing,
    dirichlet_poly,
    dirichlet_poly_many,
    fischer_decompose,
)
from .kernels import (
    Kernel4,
    PoissonKernelSpec,
    bergman_kernel_apply,
    bergman_kernel_truncated,
    bergman_project,
    bl_gram,
    calibrate_cmk,
    inner_bb,
    inner_ss,
    jlk_kernel,
    poisson_degree_kernel,
    poisson_series_gap,
    project_Bl,
)
from .quadrature import ball_rule, quad_rule
from .hardy import (
    ProductMeasure,
    growth_report,
    hp_norm,
    lp_ball_norm,
    point_growth_check,
    poisson_boundary_integral,
    poisson_extension,
    poisson_integral,
    total_variation,
    weak_star_gap,
)

__version__ = "0.1.0"

__all__ = [
    "ScaledRational",
    "sphere_area",
    "PolyXU",
    "laplacian",
    "ParseError",
    "parse_poly",
    "sphere_moment",
    "ball_moment",
    "SubspaceBasis",
    "hk_basis",
    "hk_dimension",
    "harmonic_project_u",
    "zonal_kernel",
    "OperatorParams",
    "FischerDecomposition",
    "apply_Dk",
    "bl_basis",
    "check_nonvanishing",
    "dirichlet_poly",
    "dirichlet_poly_many",
    "fischer_decompose",
    "Kernel4",
    "PoissonKernelSpec",
    "inner_ss",
    "inner_bb",
    "bl_gram",
    "jlk_kernel",
    "poisson_degree_kernel",
    "project_Bl",
    "bergman_project",
    "bergman_kernel_truncated",
    "bergman_kernel_apply",
    "calibrate_cmk",
    "poisson_series_gap",
    "quad_rule",
    "ball_rule",
    "ProductMeasure",
    "poisson_integral",
    "poisson_boundary_integral",
    "poisson_extension",
    "total_variation",
    "growth_report",
    "hp_norm",
    "lp_ball_norm",
    "point_growth_check",
    "weak_star_gap",
]
