"""Exact cone geometry: wedge and cap-cone domains, distance functions,
stereographic projection, boundary-flattening charts, the regularized
distance and its dyadic cutoffs.

Two domain shapes are supported: a planar wedge of opening ``kappa`` whose
bisector is the positive x-axis, and a three-dimensional cone over a
circular spherical cap of polar half-angle ``alpha_cap`` around the +z
axis.  All objects are immutable and every operation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import (
    ChartDomainError,
    DomainMembershipError,
    PositivityError,
    SingularInputError,
)

_MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class Wedge2D:
    """Planar cone ``{(r cos eta, r sin eta) : r > 0, |eta| < kappa/2}``."""

    kappa: float

    def __post_init__(self):
        if not 0.0 < self.kappa < 2.0 * math.pi:
            raise ValueError(f"wedge opening must lie in (0, 2*pi), got {self.kappa}")

    @property
    def dim(self) -> int:
        return 2

    @property
    def half_aperture(self) -> float:
        return 0.5 * self.kappa


@dataclass(frozen=True)
class CapCone3D:
    """Cone over the spherical cap of polar half-angle ``alpha_cap`` about +z."""

    alpha_cap: float

    def __post_init__(self):
        if not 0.0 < self.alpha_cap < math.pi:
            raise ValueError(f"cap half-angle must lie in (0, pi), got {self.alpha_cap}")

    @property
    def dim(self) -> int:
        return 3

    @property
    def half_aperture(self) -> float:
        return self.alpha_cap


ConeDomain = Union[Wedge2D, CapCone3D]


class ConePoint:
    """A point of a conic domain with cached polar data.

    ``coords`` is Cartesian; ``r`` is the distance to the vertex and
    ``angle`` the angular coordinate (signed angle off the bisector for a
    wedge, polar angle off the axis for a cap cone).
    """

    __slots__ = ("coords", "r", "angle")

    def __init__(self, coords):
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 1 or coords.size not in (2, 3):
            raise ValueError("ConePoint needs a flat 2- or 3-vector")
        if not np.all(np.isfinite(coords)):
            raise ValueError("ConePoint coordinates must be finite")
        object.__setattr__(self, "coords", coords)
        r = float(np.linalg.norm(coords))
        object.__setattr__(self, "r", r)
        if coords.size == 2:
            ang = math.atan2(coords[1], coords[0])
        else:
            ang = math.acos(np.clip(coords[2] / r, -1.0, 1.0)) if r > 0 else 0.0
        object.__setattr__(self, "angle", ang)

    @classmethod
    def from_polar(cls, r: float, eta: float) -> "ConePoint":
        return cls((r * math.cos(eta), r * math.sin(eta)))

    @classmethod
    def from_cap_angles(cls, r: float, polar: float, azimuth: float = 0.0) -> "ConePoint":
        sp = math.sin(polar)
        return cls((r * sp * math.cos(azimuth), r * sp * math.sin(azimuth), r * math.cos(polar)))

    def __repr__(self):
        return f"ConePoint({tuple(self.coords)})"


def _coords(x) -> np.ndarray:
    if isinstance(x, ConePoint):
        return x.coords
    return np.asarray(x, dtype=float)


def rho_vertex(x) -> float:
    """Distance to the vertex: the Euclidean norm of ``x``."""
    c = _coords(x)
    if not np.all(np.isfinite(c)):
        raise ValueError("point must be finite")
    return float(np.linalg.norm(c))


def _angle_in(domain: ConeDomain, x) -> tuple[float, float]:
    """Return (r, angular coordinate) of x, checking domain membership."""
    p = x if isinstance(x, ConePoint) else ConePoint(_coords(x))
    if isinstance(domain, Wedge2D) and p.coords.size != 2:
        raise DomainMembershipError("wedge points live in R^2")
    if isinstance(domain, CapCone3D) and p.coords.size != 3:
        raise DomainMembershipError("cap-cone points live in R^3")
    if p.r > 0 and abs(p.angle) > domain.half_aperture + _MEMBERSHIP_TOL:
        raise DomainMembershipError(
            f"angle {p.angle:.6g} outside closed aperture +-{domain.half_aperture:.6g}"
        )
    return p.r, p.angle


def wedge_boundary_distance(r, eta, kappa):
    """Vectorized d(x, boundary) for wedge points given in polar form.

    The nearest boundary point is the foot of the perpendicular on the
    closer edge ray when the angular separation kappa/2 - |eta| is at most
    pi/2, and the vertex otherwise.
    """
    r = np.asarray(r, dtype=float)
    sep = 0.5 * kappa - np.abs(np.asarray(eta, dtype=float))
    return np.where(sep <= 0.5 * math.pi, r * np.sin(np.clip(sep, 0.0, None)), r)


def cap_boundary_distance(r, polar, alpha_cap):
    """Vectorized d(x, boundary) for cap-cone points, by meridian-plane reduction."""
    r = np.asarray(r, dtype=float)
    sep = alpha_cap - np.asarray(polar, dtype=float)
    return np.where(sep <= 0.5 * math.pi, r * np.sin(np.clip(sep, 0.0, None)), r)


def rho_boundary(x, domain: ConeDomain) -> float:
    """Exact Euclidean distance from ``x`` (in the closure of D) to the boundary."""
    r, ang = _angle_in(domain, x)
    if isinstance(domain, Wedge2D):
        return float(wedge_boundary_distance(r, ang, domain.kappa))
    return float(cap_boundary_distance(r, ang, domain.alpha_cap))


def stereographic(x) -> np.ndarray:
    """Stereographic projection 2 x' / (1 + x^d) of a unit vector, singular at the south pole."""
    c = _coords(x)
    xd = c[-1]
    if abs(1.0 + xd) < 1e-15:
        raise SingularInputError("projection is singular at (0, ..., 0, -1)")
    return 2.0 * c[:-1] / (1.0 + xd)


def sphere_distance_pair(x, domain: ConeDomain) -> tuple[float, float]:
    """For a unit vector in the closure of the spherical base, return
    (distance to the cone boundary, chordal distance to the base's boundary).

    The two are comparable within a factor 2 on the sphere.
    """
    r, ang = _angle_in(domain, x)
    if abs(r - 1.0) > 1e-9:
        raise DomainMembershipError("sphere_distance_pair expects a unit vector")
    d_cone = rho_boundary(x, domain)
    sep = domain.half_aperture - abs(ang)
    if isinstance(domain, Wedge2D):
        # chord to the nearer of the two edge directions
        d_sphere = 2.0 * math.sin(0.5 * min(domain.kappa / 2 - ang, domain.kappa / 2 + ang))
    else:
        d_sphere = 2.0 * math.sin(0.5 * sep)
    return d_cone, max(d_sphere, 0.0)


# ---------------------------------------------------------------------------
# boundary-flattening chart for the cap cone
# ---------------------------------------------------------------------------

def chart_radius(domain: CapCone3D) -> float:
    """Chart radius: a quarter of the chordal distance from the cap edge to the south pole."""
    return 0.5 * math.cos(0.5 * domain.alpha_cap)


def cap_image_radius(domain: CapCone3D) -> float:
    """Radius of the stereographic image circle of the cap boundary."""
    return 2.0 * math.tan(0.5 * domain.alpha_cap)


def flatten(p, x, domain: CapCone3D) -> np.ndarray:
    """Boundary-flattening map near the edge point ``p`` of the spherical cap.

    Composes the radial graph coordinates with a signed-distance /
    arc-length straightening of the image circle of the cap boundary:
    returns ``(|x| * s(y), |x| * a(y), |x|)`` where ``y`` is the projected
    direction, ``s`` its signed distance to the image circle (positive
    inside) and ``a`` the arc length along the circle from the image of
    ``p``.  The first coordinate is comparable to the boundary distance and
    the norm to ``|x|``.
    """
    if not isinstance(domain, CapCone3D):
        raise ChartDomainError("flattening charts are defined for cap cones")
    pc = _coords(p)
    if abs(np.linalg.norm(pc) - 1.0) > 1e-9 or abs(pc[2] - math.cos(domain.alpha_cap)) > 1e-9:
        raise ChartDomainError("chart center must lie on the cap boundary circle")
    xc = _coords(x)
    r = float(np.linalg.norm(xc))
    if r <= 0.0:
        raise ChartDomainError("the vertex belongs to no chart")
    xhat = xc / r
    if float(np.linalg.norm(xhat - pc)) > chart_radius(domain) + _MEMBERSHIP_TOL:
        raise ChartDomainError("direction of x outside the chart around p")
    y = stereographic(xhat)
    y0 = stereographic(pc)
    R = cap_image_radius(domain)
    signed = R - float(np.linalg.norm(y))
    dang = math.atan2(y[1], y[0]) - math.atan2(y0[1], y0[0])
    dang = (dang + math.pi) % (2.0 * math.pi) - math.pi
    return np.array([r * signed, r * R * dang, r])


# ---------------------------------------------------------------------------
# regularized distance and dyadic cutoffs
# ---------------------------------------------------------------------------

def _wedge_profile(kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    scale = (kappa / math.pi) * math.sin(0.5 * kappa) if kappa <= math.pi else 1.0

    def s(ang):
        return scale * np.cos(math.pi * np.asarray(ang) / kappa)

    return s


def _cap_profile(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    def s(ang):
        return np.cos(0.5 * math.pi * np.asarray(ang) / alpha)

    return s


@dataclass(frozen=True)
class RegularizedDistance:
    """Smooth positive-homogeneous substitute ``psi(x) = r * s(angle)`` for
    the boundary distance, comparable to it within the constant ``n_psi``.
    """

    domain: ConeDomain

    @cached_property
    def profile(self) -> Callable[[np.ndarray], np.ndarray]:
        if isinstance(self.domain, Wedge2D):
            return _wedge_profile(self.domain.kappa)
        return _cap_profile(self.domain.alpha_cap)

    @cached_property
    def n_psi(self) -> float:
        """Comparability constant, measured by sweeping the aperture."""
        half = self.domain.half_aperture
        ang = np.linspace(-half, half, 4097)[1:-1] if isinstance(self.domain, Wedge2D) \
            else np.linspace(0.0, self.domain.alpha_cap, 4097)[:-1]
        s = self.profile(ang)
        if isinstance(self.domain, Wedge2D):
            rho_hat = wedge_boundary_distance(1.0, ang, self.domain.kappa)
        else:
            rho_hat = cap_boundary_distance(1.0, ang, self.domain.alpha_cap)
        ratio = s / rho_hat
        return float(max(ratio.max(), (1.0 / ratio).max()))

    def value(self, x) -> float:
        r, ang = _angle_in(self.domain, x)
        edge_gap = (self.domain.half_aperture - abs(ang)
                    if isinstance(self.domain, Wedge2D)
                    else self.domain.alpha_cap - ang)
        if r <= 0.0 or edge_gap <= 1e-13:
            raise PositivityError("psi is positive only strictly inside the domain")
        return r * float(self.profile(ang))

    def value_polar(self, r, ang) -> np.ndarray:
        """Vectorized psi on polar data; no membership check."""
        return np.asarray(r, dtype=float) * self.profile(ang)

    def gradient(self, x) -> np.ndarray:
        """Analytic Cartesian gradient (wedge only); bounded on the open wedge."""
        if not isinstance(self.domain, Wedge2D):
            raise NotImplementedError("analytic gradient implemented for wedges")
        r, ang = _angle_in(self.domain, x)
        if r <= 0.0:
            raise PositivityError("gradient undefined at the vertex")
        kappa = self.domain.kappa
        scale = (kappa / math.pi) * math.sin(0.5 * kappa) if kappa <= math.pi else 1.0
        s = scale * math.cos(math.pi * ang / kappa)
        sp = -scale * (math.pi / kappa) * math.sin(math.pi * ang / kappa)
        c, sn = math.cos(ang), math.sin(ang)
        return np.array([c * s - sn * sp, sn * s + c * sp])


_E = math.e
_BUMP_CENTER = 0.5 * (_E + 1.0 / _E)
_BUMP_HALFWIDTH = 0.5 * (_E - 1.0 / _E)


def bump_zeta(u):
    """Polynomial bump supported in (1/e, e): clipped ``(1 - v^2)^3`` in the
    affinely rescaled variable; C^2 on the line."""
    v = (np.asarray(u, dtype=float) - _BUMP_CENTER) / _BUMP_HALFWIDTH
    core = np.clip(1.0 - v * v, 0.0, None)
    return core ** 3


@dataclass(frozen=True)
class DyadicCutoffs:
    """Family ``zeta_k(x) = zeta(e^k psi(x))`` built on a regularized distance.

    The sum over k of the family is bounded below by ``delta > 0``
    everywhere inside the domain, and ``zeta_k`` is supported in the dyadic
    shell ``e^(-k-k0) < rho < e^(-k+k0)``.
    """

    psi: RegularizedDistance

    @staticmethod
    def zeta(u):
        return bump_zeta(u)

    def zeta_k(self, k: int, x) -> float:
        return float(bump_zeta(math.exp(k) * self.psi.value(x)))

    def zeta_k_polar(self, k: int, r, ang) -> np.ndarray:
        return bump_zeta(np.exp(k) * self.psi.value_polar(r, ang))

    @cached_property
    def delta(self) -> float:
        """Lower bound of sum_k zeta(e^(k+t)), minimized over one period of t."""
        t = np.linspace(0.0, 1.0, 100001)
        total = bump_zeta(np.exp(t)) + bump_zeta(np.exp(t - 1.0))
        return float(total.min())

    @cached_property
    def k0(self) -> int:
        """Shell half-width: supp zeta_k sits in e^(-k-k0) < rho < e^(-k+k0)."""
        return 1 + math.ceil(math.log(self.psi.n_psi))


def psi_eval(x, psi: RegularizedDistance) -> float:
    """Value of the regularized distance at a strictly interior point."""
    return psi.value(x)


def zeta_k_eval(k: int, x, cutoffs: DyadicCutoffs) -> float:
    """Value of the k-th dyadic cutoff at a strictly interior point."""
    return cutoffs.zeta_k(k, x)
