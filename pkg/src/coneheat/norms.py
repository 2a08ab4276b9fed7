"""Mixed-weight Lebesgue/Sobolev norms on the truncated wedge.

The building block is the weighted integral with density
``rho_o^(theta-Theta) * rho^(Theta-d)`` where ``rho_o`` is the distance to
the vertex and ``rho`` the distance to the boundary; on top of it sit the
graded Sobolev norms (sums of ``rho^|a| D^a f`` terms), the space-time
norms, the shell-decomposition norm, and empirical checks of the norm
identities relating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapabilityError, CoverageError, DataError, ShapeError
from .geometry import DyadicCutoffs, RegularizedDistance
from .mesh import GradedMesh, ScalarField, cartesian_gradient, cartesian_hessian

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class WeightParams:
    """Summability exponent and the two weight powers (vertex, boundary)."""

    p: float
    theta: float
    Theta: float
    n: int = 0
    d: int = 2

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError("p must exceed 1")
        if self.n < 0:
            raise ValueError("derivative order n must be nonnegative")

    @property
    def mu(self) -> float:
        return 1.0 + (self.theta - self.d) / self.p

    @property
    def alpha(self) -> float:
        return 1.0 + (self.Theta - self.d) / self.p

    def shifted(self, dtheta: float = 0.0, dTheta: float = 0.0, n: int | None = None):
        return replace(self, theta=self.theta + dtheta, Theta=self.Theta + dTheta,
                       n=self.n if n is None else n)


def _weight_density(w: WeightParams, mesh: GradedMesh) -> np.ndarray:
    """rho_o^(theta-Theta) * rho^(Theta-d) on the nodes, with the boundary
    limit taken literally: 0 for positive boundary power, 1 for zero, inf
    for negative (the caller masks where the integrand vanishes)."""
    a = w.theta - w.Theta
    b = w.Theta - w.d
    vert = mesh.R ** a
    with np.errstate(divide="ignore"):
        if b == 0.0:
            bdry = np.ones_like(mesh.rho)
        else:
            bdry = np.where(mesh.rho > 0.0, mesh.rho, np.nan) ** b
            bdry = np.nan_to_num(bdry, nan=(0.0 if b > 0.0 else np.inf))
    return vert * bdry


def lp_weighted_norm(values: np.ndarray, w: WeightParams, mesh: GradedMesh) -> float:
    """Mixed-weight L_p norm of one time slice by mesh quadrature."""
    values = np.asarray(values, dtype=float)
    if values.shape != mesh.R.shape:
        raise ShapeError(f"slice shape {values.shape} != mesh shape {mesh.R.shape}")
    if not np.all(np.isfinite(values)):
        raise DataError("non-finite samples in norm evaluation")
    dens = _weight_density(w, mesh)
    apow = np.abs(values) ** w.p
    with np.errstate(invalid="ignore"):
        integrand = np.where(apow == 0.0, 0.0, mesh.weights * apow * dens)
    return float(np.sum(integrand) ** (1.0 / w.p))


def _multi_indices(order: int) -> list[tuple[int, int]]:
    return [(a, m - a) for m in range(order + 1) for a in range(m, -1, -1)]


def grid_derivatives(values: np.ndarray, mesh: GradedMesh, order: int) -> dict:
    """All Cartesian D^a f for |a| <= order, keyed by (ax, ay).

    Orders 1 and 2 use direct mapped-coordinate stencils; higher orders
    apply the first-derivative operators recursively.
    """
    if order > MAX_DERIVATIVE_ORDER:
        raise CapabilityError(f"derivative order {order} beyond stencil support "
                              f"(max {MAX_DERIVATIVE_ORDER})")
    out = {(0, 0): np.asarray(values, dtype=float)}
    if order >= 1:
        fx, fy = cartesian_gradient(values, mesh)
        out[(1, 0)], out[(0, 1)] = fx, fy
    if order >= 2:
        fxx, fxy, fyy = cartesian_hessian(values, mesh)
        out[(2, 0)], out[(1, 1)], out[(0, 2)] = fxx, fxy, fyy
    for m in range(3, order + 1):
        for ax in range(m, -1, -1):
            ay = m - ax
            if ax > 0:
                out[(ax, ay)] = cartesian_gradient(out[(ax - 1, ay)], mesh)[0]
            else:
                out[(ax, ay)] = cartesian_gradient(out[(ax, ay - 1)], mesh)[1]
    return out


def kn_norm(values: np.ndarray, w: WeightParams, mesh: GradedMesh,
            order: int | None = None) -> float:
    """Weighted Sobolev norm: sum over |a| <= n of the mixed-weight norm of
    ``rho^|a| D^a f``."""
    order = w.n if order is None else order
    derivs = grid_derivatives(values, mesh, order)
    total = 0.0
    for (ax, ay), arr in derivs.items():
        m = ax + ay
        total += lp_weighted_norm(mesh.rho ** m * arr if m else arr, w, mesh)
    return total


def spacetime_norm(f: ScalarField, w: WeightParams, order: int | None = None) -> float:
    """L_p-in-time of the spatial norm (trapezoid in t, p-th root at the end)."""
    order = w.n if order is None else order
    per_slice = np.array([kn_norm(f.values[m], w, f.mesh, order=order)
                          for m in range(f.times.size)])
    return float(np.trapezoid(per_slice ** w.p, f.times) ** (1.0 / w.p))


def solution_norm(u: ScalarField, u_t: ScalarField, w: WeightParams) -> float:
    """Solution-space norm: the (n+2)-order norm of u at down-shifted weights
    plus the n-order norm of u_t at up-shifted weights."""
    if not u.compatible_with(u_t):
        raise ShapeError("u and u_t live on different grids")
    term_u = spacetime_norm(u, w.shifted(-w.p, -w.p), order=w.n + 2)
    term_t = spacetime_norm(u_t, w.shifted(+w.p, +w.p), order=w.n)
    return term_u + term_t


# ---------------------------------------------------------------------------
# shell-decomposition norm
# ---------------------------------------------------------------------------

def _sobolev_p_power(values: np.ndarray, mesh: GradedMesh, p: float, order: int,
                     r: np.ndarray, eta: np.ndarray, weights: np.ndarray) -> float:
    """Unweighted W^n_p norm (p-th power) on a rescaled copy of the mesh."""
    total = 0.0
    arrs = {(0, 0): values}
    if order >= 1:
        fx, fy = cartesian_gradient(values, mesh, r=r, eta=eta)
        arrs[(1, 0)], arrs[(0, 1)] = fx, fy
    if order >= 2:
        fxx, fxy, fyy = cartesian_hessian(values, mesh, r=r, eta=eta)
        arrs[(2, 0)], arrs[(1, 1)], arrs[(0, 2)] = fxx, fxy, fyy
    for m in range(3, order + 1):
        for ax in range(m, -1, -1):
            ay = m - ax
            src = arrs[(ax - 1, ay)] if ax > 0 else arrs[(ax, ay - 1)]
            comp = 0 if ax > 0 else 1
            arrs[(ax, ay)] = cartesian_gradient(src, mesh, r=r, eta=eta)[comp]
    for arr in arrs.values():
        total += float(np.sum(weights * np.abs(arr) ** p))
    return total


def dyadic_support_range(values: np.ndarray, mesh: GradedMesh,
                         psi: RegularizedDistance) -> tuple[int, int] | None:
    """Smallest integer k-range whose shells cover the support of the field."""
    nz = np.abs(np.asarray(values)) > 0.0
    if not nz.any():
        return None
    s = psi.profile(mesh.ETA)
    with np.errstate(divide="ignore"):
        t = np.where(nz & (s > 0.0), np.log(np.where(s > 0.0, mesh.R * s, 1.0)), np.nan)
    t_min, t_max = np.nanmin(t), np.nanmax(t)
    # shell k (dilation convention) touches the support iff k is within one
    # unit of log(psi) somewhere on it
    return math.floor(t_min) - 1, math.ceil(t_max) + 1


def dyadic_norm(values: np.ndarray, w: WeightParams, mesh: GradedMesh,
                psi: RegularizedDistance | None = None,
                cutoffs: DyadicCutoffs | None = None,
                k_range: tuple[int, int] | None = None) -> float:
    """Shell-decomposition norm: rescaled cutoff pieces of
    ``|x|^((theta-Theta)/p) f`` measured in unweighted Sobolev norms and
    recombined with the geometric factor ``e^(k Theta)``.

    Thanks to the homogeneity of the regularized distance, the k-th piece
    evaluated on the mesh dilated by ``e^-k`` samples the field exactly at
    the original nodes, so no interpolation enters.
    """
    if w.n > MAX_DERIVATIVE_ORDER:
        raise CapabilityError(f"derivative order {w.n} beyond stencil support")
    psi = psi or RegularizedDistance(mesh.domain)
    cutoffs = cutoffs or DyadicCutoffs(psi)
    values = np.asarray(values, dtype=float)

    support = dyadic_support_range(values, mesh, psi)
    if support is None:
        return 0.0
    if k_range is None:
        k_range = support
    elif k_range[0] > support[0] or k_range[1] < support[1]:
        raise CoverageError(
            f"k-range {k_range} misses shells of the support range {support}")

    g = mesh.R ** ((w.theta - w.Theta) / w.p) * values
    s_eta = psi.profile(mesh.ETA)
    total = 0.0
    for k in range(k_range[0], k_range[1] + 1):
        scale = math.exp(-k)
        h = cutoffs.zeta(scale * mesh.R * s_eta) * g
        if not h.any():
            continue
        r_k = mesh.R * scale
        w_k = mesh.weights * scale ** 2
        total += math.exp(k * w.Theta) * _sobolev_p_power(
            h, mesh, w.p, w.n, r=r_k, eta=mesh.ETA, weights=w_k)
    return float(total ** (1.0 / w.p))


# ---------------------------------------------------------------------------
# empirical checks of the norm identities
# ---------------------------------------------------------------------------

@dataclass
class PropertyCheck:
    name: str
    one_sided: bool
    ratios: list = field(default_factory=list)

    @property
    def min_ratio(self) -> float:
        return float(min(self.ratios))

    @property
    def max_ratio(self) -> float:
        return float(max(self.ratios))

    def violated(self, tol: float = 1e-10) -> bool:
        return self.one_sided and self.max_ratio > 1.0 + tol


def norm_property_checks(slices: Sequence[np.ndarray], w: WeightParams,
                         mesh: GradedMesh) -> dict[str, PropertyCheck]:
    """Empirical two-sided ratios for the weight-shift identities over a
    suite of smooth compactly supported slices.

    Checks, per slice: the derivative embedding (one-sided, exact sub-sum of
    the same quadrature), the vertex-weight shift with mu = 1, and the
    regularized-distance shift with mu = -1.
    """
    psi = RegularizedDistance(mesh.domain)
    n = max(w.n, 1)
    report = {
        "derivative_embedding": PropertyCheck("derivative_embedding", one_sided=True),
        "vertex_power_shift": PropertyCheck("vertex_power_shift", one_sided=False),
        "psi_power_shift": PropertyCheck("psi_power_shift", one_sided=False),
    }
    psi_vals = psi.value_polar(mesh.R, mesh.ETA)
    for f in slices:
        f = np.asarray(f, dtype=float)
        d1f = grid_derivatives(f, mesh, 1)[(1, 0)]
        lhs = kn_norm(d1f, w.shifted(+w.p, +w.p), mesh, order=n - 1)
        rhs = kn_norm(f, w, mesh, order=n)
        report["derivative_embedding"].ratios.append(lhs / rhs)

        num = kn_norm(mesh.R * f, w.shifted(dtheta=-w.p), mesh, order=n)
        report["vertex_power_shift"].ratios.append(num / rhs)

        num = kn_norm(f / psi_vals, w, mesh, order=n)
        den = kn_norm(f, w.shifted(-w.p, -w.p), mesh, order=n)
        report["psi_power_shift"].ratios.append(num / den)
    return report


