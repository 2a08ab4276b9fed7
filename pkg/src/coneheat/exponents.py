"""Critical exponents and admissible weight windows.

The boundary-growth exponent of caloric functions near the vertex is
controlled by the first Dirichlet eigenvalue of the Laplace-Beltrami
operator on the spherical base: an arc eigenvalue ``(pi/kappa)^2`` for the
wedge, and ``nu (nu + 1)`` for the circular cap, where ``nu`` is the
smallest positive degree at which the Legendre function vanishes at the cap
edge.  From it follow the admissible exponent windows for the vertex and
boundary weight powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .geometry import CapCone3D, ConeDomain, Wedge2D

_SERIES_RTOL = 1e-15
_BISECT_TOL = 1e-10


@dataclass(frozen=True)
class EllipticityPair:
    """Uniform parabolicity constants 0 < nu1 <= nu2."""

    nu1: float
    nu2: float

    def __post_init__(self):
        if not 0.0 < self.nu1 <= self.nu2:
            raise ValueError("need 0 < nu1 <= nu2")

    @property
    def ratio(self) -> float:
        return self.nu1 / self.nu2


def legendre_p(nu: float, x: float) -> float:
    """Legendre function of real degree via the Gauss hypergeometric series
    in (1 - x)/2, truncated at relative level 1e-15."""
    z = 0.5 * (1.0 - x)
    term = 1.0
    total = 1.0
    m = 0
    small = 0
    while m < 200_000:
        term *= z * (m - nu) * (m + nu + 1.0) / (m + 1.0) ** 2
        total += term
        m += 1
        if abs(term) < _SERIES_RTOL * max(abs(total), 1e-30):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise NumericalFailure("hypergeometric series did not settle",
                           {"nu": nu, "x": x, "terms": m, "last_term": term})


def cap_eigenvalue_degree(alpha_cap: float) -> float:
    """Smallest positive degree nu with P_nu(cos(alpha_cap)) = 0, by
    bracket scan plus bisection."""
    x = math.cos(alpha_cap)
    f_lo, nu_lo = 1.0, 0.0
    nu_hi = None
    step = 0.25
    nu = step
    while nu <= 400.0:
        f = legendre_p(nu, x)
        if f <= 0.0:
            nu_hi, f_hi = nu, f
            break
        f_lo, nu_lo = f, nu
        nu += step
    if nu_hi is None:
        raise NumericalFailure(
            "failed to bracket the Legendre root",
            {"alpha_cap": alpha_cap, "last_nu": nu - step, "last_value": f_lo})
    while nu_hi - nu_lo > _BISECT_TOL:
        mid = 0.5 * (nu_lo + nu_hi)
        if legendre_p(mid, x) <= 0.0:
            nu_hi = mid
        else:
            nu_lo = mid
    return 0.5 * (nu_lo + nu_hi)


def beltrami_eigenvalue(domain: ConeDomain) -> float:
    """First Dirichlet eigenvalue of the Laplace-Beltrami operator on the base."""
    if isinstance(domain, Wedge2D):
        return (math.pi / domain.kappa) ** 2
    nu = cap_eigenvalue_degree(domain.alpha_cap)
    return nu * (nu + 1.0)


def lambda_from_Lambda(Lambda: float, d: int) -> float:
    """Critical boundary-growth exponent for the Laplacian."""
    if Lambda <= 0.0 or d < 2:
        raise ValueError("need Lambda > 0 and d >= 2")
    h = 0.5 * (d - 2)
    return -h + math.sqrt(Lambda + h * h)


def lambda_lower_bound(nu: EllipticityPair, Lambda: float, d: int) -> float:
    """Ellipticity-robust lower bound for the critical exponent, clamped at 0."""
    h = 0.5 * (d - 2)
    return max(0.0, -h + math.sqrt(nu.ratio) * math.sqrt(Lambda + h * h))


@dataclass(frozen=True)
class CriticalExponents:
    """Eigenvalue, the two critical exponents, and the robust lower bound."""

    Lambda: float
    lambda_plus: float
    lambda_minus: float
    d: int
    lambda_robust: float

    @classmethod
    def for_laplacian(cls, domain: ConeDomain,
                      nu: EllipticityPair | None = None) -> "CriticalExponents":
        Lambda = beltrami_eigenvalue(domain)
        lam = lambda_from_Lambda(Lambda, domain.dim)
        robust = lam if nu is None else lambda_lower_bound(nu, Lambda, domain.dim)
        return cls(Lambda=Lambda, lambda_plus=lam, lambda_minus=lam,
                   d=domain.dim, lambda_robust=robust)


@dataclass(frozen=True)
class WeightWindow:
    """Open admissibility windows for the two weight powers at summability p."""

    p: float
    theta_lo: float
    theta_hi: float
    Theta_lo: float
    Theta_hi: float

    def contains_theta(self, theta: float) -> bool:
        return self.theta_lo < theta < self.theta_hi

    def contains_Theta(self, Theta: float) -> bool:
        return self.Theta_lo < Theta < self.Theta_hi

    def feasible(self, theta: float, Theta: float) -> bool:
        return self.contains_theta(theta) and self.contains_Theta(Theta)

    def violated_inequalities(self, theta: float, Theta: float) -> list[str]:
        """Names of the strict inequalities a requested pair breaks."""
        out = []
        if not theta > self.theta_lo:
            out.append(f"theta > p(1-lambda+) = {self.theta_lo:.6g}")
        if not theta < self.theta_hi:
            out.append(f"theta < p(d-1+lambda-) = {self.theta_hi:.6g}")
        if not Theta > self.Theta_lo:
            out.append(f"Theta > d-1 = {self.Theta_lo:.6g}")
        if not Theta < self.Theta_hi:
            out.append(f"Theta < d-1+p = {self.Theta_hi:.6g}")
        return out


def weight_windows(p: float, exps: CriticalExponents) -> WeightWindow:
    """Admissible open (theta, Theta) windows at summability exponent p."""
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    d = exps.d
    return WeightWindow(
        p=p,
        theta_lo=p * (1.0 - exps.lambda_plus),
        theta_hi=p * (d - 1.0 + exps.lambda_minus),
        Theta_lo=d - 1.0,
        Theta_hi=d - 1.0 + p,
    )


def theta_equals_Theta_feasible(window: WeightWindow, Theta: float) -> bool:
    """Whether the pure boundary-weight choice theta = Theta is admissible."""
    return window.feasible(Theta, Theta)
