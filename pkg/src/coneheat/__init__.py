"""Desk-scale numerical laboratory for weighted-Sobolev estimates of
parabolic problems on conic domains: exact wedge/cap geometry, critical
exponent calculators, a series heat kernel, a measurable-in-time
finite-difference solver, mixed-weight norm evaluators, and oracles for the
quantitative integral inequalities behind the estimates."""

from .exponents import (
    CriticalExponents,
    EllipticityPair,
    WeightWindow,
    beltrami_eigenvalue,
    lambda_from_Lambda,
    lambda_lower_bound,
    theta_equals_Theta_feasible,
    weight_windows,
)
from .geometry import (
    CapCone3D,
    ConeDomain,
    ConePoint,
    DyadicCutoffs,
    RegularizedDistance,
    Wedge2D,
    flatten,
    psi_eval,
    rho_boundary,
    rho_vertex,
    sphere_distance_pair,
    stereographic,
    zeta_k_eval,
)
from .kernel import KernelBoundParams, WedgeHeatKernel, bound_ratio, kernel_mass
from .mesh import GradedMesh, ScalarField, uniform_times
from .norms import (
    WeightParams,
    dyadic_norm,
    kn_norm,
    lp_weighted_norm,
    norm_property_checks,
    solution_norm,
    spacetime_norm,
)
from .oracles import IntegralBoundParams, scaled_time_integral, gaussian_halfspace_ratio, gaussian_wedge_ratio
from .solver import (
    CoefficientPath,
    SeparableBump,
    SingularSolution,
    SolveConfig,
    estimate_ratio,
    manufactured_singular,
    regularity_ratio,
    solve_fd,
    solve_green,
    time_derivative,
)

__version__ = "0.1.0"
