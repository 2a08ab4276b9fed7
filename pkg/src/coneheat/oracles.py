"""Independent numerical verification of the quantitative integral bounds.

Three families are covered: the one-dimensional kernel-time integral with
two algebraic factors, the Gaussian-weighted plane integral with a
half-space distance factor, and its wedge version with the true boundary
distance.  Each oracle returns the left-hand side scaled by the claimed
right-hand side (unit constant), so finiteness and stability of the
returned ratios over samples is exactly the content of the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DivergenceError, PreconditionError
from .geometry import ConePoint, Wedge2D, wedge_boundary_distance

_EPSREL = 1e-10


@dataclass(frozen=True)
class IntegralBoundParams:
    """Exponent tuple of the integral bounds; hypothesis flags are always
    recomputed from the exponents."""

    alpha: float
    beta: float
    gamma: float
    omega: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    @property
    def time_integral_ok(self) -> bool:
        return self.alpha + self.beta > 0.0 and self.beta > 0.0 and self.gamma > 0.0

    def gaussian_integral_ok(self, d: int = 2) -> bool:
        return self.alpha + self.gamma > -d and self.gamma > -1.0


def scaled_time_integral(params: IntegralBoundParams, a: float, b: float,
                   epsrel: float = _EPSREL) -> float:
    """a^alpha b^beta times the two-factor time integral.

    After substituting t = b^2 s the value is a function of a/b alone:
    integral of (1 + (b/a) sqrt(s))^-alpha (sqrt(s)+1)^-(beta+gamma)
    s^(gamma/2 - 1) over (0, inf).
    """
    al, be, ga = params.alpha, params.beta, params.gamma
    if ga <= 0.0:
        raise DivergenceError("integral diverges at t = 0 (needs gamma > 0)",
                              endpoint="0")
    if al + be <= 0.0:
        raise DivergenceError("integral diverges at t = inf (needs alpha+beta > 0)",
                              endpoint="inf")
    if be <= 0.0:
        raise PreconditionError("hypothesis beta > 0 violated")
    if not a >= b > 0.0:
        raise PreconditionError("need a >= b > 0")
    q = b / a

    def integrand(s):
        rs = math.sqrt(s)
        return (1.0 + q * rs) ** (-al) * (rs + 1.0) ** (-be - ga) * s ** (0.5 * ga - 1.0)

    splits = sorted({1.0, (a / b) ** 2})
    total = 0.0
    lo = 0.0
    for hi in splits:
        if hi > lo:
            total += quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)[0]
            lo = hi
    total += quad(integrand, lo, np.inf, epsabs=0.0, epsrel=epsrel, limit=200)[0]
    return total


def _split_at(lo: float, hi: float, knots) -> list[tuple[float, float]]:
    pts = [lo] + sorted(k for k in knots if lo < k < hi) + [hi]
    return list(zip(pts, pts[1:]))


def gaussian_halfspace_ratio(params: IntegralBoundParams, x, epsrel: float = _EPSREL,
                   d: int = 2) -> float:
    """Gaussian-weighted plane integral with vertex and half-space factors,
    divided by its claimed envelope (unit constant)."""
    if d != 2:
        raise PreconditionError("the plane oracle is implemented for d = 2")
    if not params.gaussian_integral_ok(d):
        raise PreconditionError("need alpha + gamma > -d and gamma > -1")
    al, be, ga, om, sg = (params.alpha, params.beta, params.gamma,
                          params.omega, params.sigma)
    x = np.asarray(x, dtype=float)
    L = 8.0 / math.sqrt(sg)

    def integrand(y1, y2):
        ry = math.hypot(y1, y2)
        a1 = ry ** al if ry > 0.0 else (1.0 if al == 0.0 else 0.0)
        g1 = abs(y1) ** ga if y1 != 0.0 else (1.0 if ga == 0.0 else 0.0)
        return (a1 / (ry + 1.0) ** be * g1 / (abs(y1) + 1.0) ** om
                * math.exp(-sg * ((x[0] - y1) ** 2 + (x[1] - y2) ** 2)))

    def inner(y1):
        total = 0.0
        for lo, hi in _split_at(x[1] - L, x[1] + L, [0.0]):
            total += quad(lambda y2: integrand(y1, y2), lo, hi,
                          epsabs=0.0, epsrel=epsrel, limit=100)[0]
        return total

    value = 0.0
    for lo, hi in _split_at(x[0] - L, x[0] + L, [0.0]):
        value += quad(inner, lo, hi, epsabs=0.0, epsrel=epsrel, limit=100)[0]
    env = (np.linalg.norm(x) + 1.0) ** (al - be) * (abs(x[0]) + 1.0) ** (ga - om)
    return value / env


def gaussian_wedge_ratio(params: IntegralBoundParams, x, domain: Wedge2D,
                   epsrel: float = _EPSREL) -> float:
    """Wedge version of the Gaussian-weighted integral with the true
    boundary distance, divided by its envelope (unit constant)."""
    if not params.gaussian_integral_ok(2):
        raise PreconditionError("need alpha + gamma > -d and gamma > -1")
    al, be, ga, om, sg = (params.alpha, params.beta, params.gamma,
                          params.omega, params.sigma)
    px = x if isinstance(x, ConePoint) else ConePoint(x)
    kappa = domain.kappa
    half = 0.5 * kappa
    L = 8.0 / math.sqrt(sg)
    r_hi = px.r + L + 1.0

    def integrand_polar(r, eta):
        rho = float(wedge_boundary_distance(r, eta, kappa))
        a1 = r ** al if r > 0.0 else (1.0 if al == 0.0 else 0.0)
        g1 = rho ** ga if rho > 0.0 else (1.0 if ga == 0.0 else 0.0)
        d2 = r * r + px.r ** 2 - 2.0 * r * px.r * math.cos(eta - px.angle)
        return (a1 / (r + 1.0) ** be * g1 / (rho + 1.0) ** om
                * math.exp(-sg * d2) * r)

    def radial(eta):
        return quad(lambda r: integrand_polar(r, eta), 0.0, r_hi,
                    epsabs=0.0, epsrel=epsrel, limit=150,
                    points=[px.r] if 0.0 < px.r < r_hi else None)[0]

    kinks = [k for k in (-(half - 0.5 * math.pi), half - 0.5 * math.pi)
             if abs(k) < half]
    value = 0.0
    for lo, hi in _split_at(-half, half, kinks):
        value += quad(radial, lo, hi, epsabs=0.0, epsrel=epsrel, limit=100)[0]
    rho_x = float(wedge_boundary_distance(px.r, px.angle, kappa))
    env = (px.r + 1.0) ** (al - be) * (rho_x + 1.0) ** (ga - om)
    return value / env


# ---------------------------------------------------------------------------
# fast fixed-order quadrature path for dense sample scans
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_on(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * _GL_NODES, half * _GL_WEIGHTS


def _graded_panels(a: float, b: float, toward: float, levels: int = 12,
                   ratio: float = 4.0) -> list[tuple[float, float]]:
    """Panels of [a, b] geometrically refined toward the endpoint `toward`."""
    span = b - a
    if toward == a:
        edges = [a + span * ratio ** (-j) for j in range(levels + 1)] + [a]
    elif toward == b:
        edges = [b - span * ratio ** (-j) for j in range(levels + 1)] + [b]
    else:
        raise ValueError("grading endpoint must be an interval endpoint")
    edges = sorted(set(edges))
    return list(zip(edges[:-1], edges[1:]))


def _axis_nodes(lo: float, hi: float, singular: tuple[float, ...] = (),
                cuts: tuple[float, ...] = (),
                plain_panels: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes on [lo, hi]: panels split at the given
    cuts and geometrically graded toward singular abscissae."""
    edges = sorted({lo, hi,
                    *(s for s in singular if lo < s < hi),
                    *(c for c in cuts if lo < c < hi)})
    nodes, weights = [], []
    for a, b in zip(edges, edges[1:]):
        sing_a = a in singular
        sing_b = b in singular
        if sing_a and sing_b:
            mid = 0.5 * (a + b)
            panels = _graded_panels(a, mid, a) + _graded_panels(mid, b, b)
        elif sing_a:
            panels = _graded_panels(a, b, a)
        elif sing_b:
            panels = _graded_panels(a, b, b)
        else:
            step = (b - a) / plain_panels
            panels = [(a + i * step, a + (i + 1) * step) for i in range(plain_panels)]
        for pa, pb in panels:
            x, w = _gl_on(pa, pb)
            nodes.append(x)
            weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def gaussian_halfspace_ratio_fast(params: IntegralBoundParams, x) -> float:
    """Graded fixed-order quadrature version of the plane oracle; ~1e-8
    accurate and vectorized, intended for dense sample scans."""
    if not params.gaussian_integral_ok(2):
        raise PreconditionError("need alpha + gamma > -d and gamma > -1")
    al, be, ga, om, sg = (params.alpha, params.beta, params.gamma,
                          params.omega, params.sigma)
    x = np.asarray(x, dtype=float)
    L = 8.0 / math.sqrt(sg)
    y1, w1 = _axis_nodes(x[0] - L, x[0] + L, singular=(0.0,))
    y2, w2 = _axis_nodes(x[1] - L, x[1] + L, singular=(0.0,))
    Y1, Y2 = y1[:, None], y2[None, :]
    RY = np.hypot(Y1, Y2)
    vals = (RY ** al / (RY + 1.0) ** be
            * np.abs(Y1) ** ga / (np.abs(Y1) + 1.0) ** om
            * np.exp(-sg * ((x[0] - Y1) ** 2 + (x[1] - Y2) ** 2)))
    value = float(w1 @ vals @ w2)
    env = (np.linalg.norm(x) + 1.0) ** (al - be) * (abs(x[0]) + 1.0) ** (ga - om)
    return value / env


def gaussian_wedge_ratio_fast(params: IntegralBoundParams, x, domain: Wedge2D) -> float:
    """Graded fixed-order quadrature version of the wedge oracle."""
    if not params.gaussian_integral_ok(2):
        raise PreconditionError("need alpha + gamma > -d and gamma > -1")
    al, be, ga, om, sg = (params.alpha, params.beta, params.gamma,
                          params.omega, params.sigma)
    px = x if isinstance(x, ConePoint) else ConePoint(x)
    kappa = domain.kappa
    half = 0.5 * kappa
    L = 8.0 / math.sqrt(sg)
    r, wr = _axis_nodes(0.0, px.r + L + 1.0, singular=(0.0,), cuts=(px.r,),
                        plain_panels=10)
    kinks = tuple(k for k in (-(half - 0.5 * math.pi), half - 0.5 * math.pi)
                  if abs(k) < half)
    eta, we = _axis_nodes(-half, half, singular=(-half, half),
                          cuts=(*kinks, px.angle))
    Rg, Eg = r[:, None], eta[None, :]
    rho = wedge_boundary_distance(Rg, Eg, kappa)
    d2 = Rg ** 2 + px.r ** 2 - 2.0 * Rg * px.r * np.cos(Eg - px.angle)
    vals = (Rg ** (al + 1.0) / (Rg + 1.0) ** be
            * rho ** ga / (rho + 1.0) ** om * np.exp(-sg * d2))
    value = float(wr @ vals @ we)
    rho_x = float(wedge_boundary_distance(px.r, px.angle, kappa))
    env = (px.r + 1.0) ** (al - be) * (rho_x + 1.0) ** (ga - om)
    return value / env


def time_integral_bruteforce(params: IntegralBoundParams, a: float, b: float,
                       panels: int = 1_000_000, s_max: float = 1e6) -> float:
    """Composite-midpoint check of the scaled time integral on a log grid;
    a deliberately unsophisticated cross-check of the adaptive result."""
    al, be, ga = params.alpha, params.beta, params.gamma
    q = b / a
    edges = np.exp(np.linspace(math.log(1e-12), math.log(s_max), panels + 1))
    mids = 0.5 * (edges[1:] + edges[:-1])
    widths = np.diff(edges)
    rs = np.sqrt(mids)
    vals = (1.0 + q * rs) ** (-al) * (rs + 1.0) ** (-be - ga) * mids ** (0.5 * ga - 1.0)
    return float(np.sum(vals * widths))
