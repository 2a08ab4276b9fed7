"""Series Dirichlet heat kernel on a planar wedge (Laplacian).

The kernel is the classical separation-of-variables series: angular sines on
the aperture arc against modified Bessel functions in the radial variable.
Everything is evaluated through the exponentially scaled Bessel function, so
the Gaussian prefactor combines into ``exp(-(r-r')^2/4t)`` and no
intermediate overflow can occur.  The straight-edge case (opening pi) has a
closed reflection form used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ive

from .errors import DomainMembershipError, NumericalFailure
from .geometry import ConePoint, Wedge2D, wedge_boundary_distance
from .mesh import GradedMesh

_TRUNC_RTOL = 1e-14
_BLOCK = 8


@dataclass(frozen=True)
class WedgeHeatKernel:
    """Dirichlet heat kernel series on the wedge of opening ``kappa``."""

    kappa: float
    k_max: int = 2048
    t_floor: float = 1e-6

    def __post_init__(self):
        Wedge2D(self.kappa)  # validate opening
        if self.k_max < 1 or self.t_floor <= 0.0:
            raise ValueError("need k_max >= 1 and t_floor > 0")

    @property
    def domain(self) -> Wedge2D:
        return Wedge2D(self.kappa)

    def _nu(self, k) -> np.ndarray:
        return np.asarray(k, dtype=float) * math.pi / self.kappa

    def _sines(self, eta, ks) -> np.ndarray:
        """sin(k pi (eta + kappa/2) / kappa) for the given mode numbers."""
        phase = (np.asarray(eta, dtype=float) + 0.5 * self.kappa) / self.kappa
        return np.sin(np.multiply.outer(np.asarray(ks, dtype=float) * math.pi, phase))

    def _check_time(self, t: float) -> None:
        if t < self.t_floor:
            raise NumericalFailure(
                f"elapsed time {t} below the underflow floor {self.t_floor}",
                {"t": t, "t_floor": self.t_floor})

    def eval_polar(self, t: float, r, eta, rp, etap) -> np.ndarray:
        """Vectorized kernel on broadcasted polar data.

        The mode sum is accumulated in blocks and truncated once the scaled
        Bessel envelope of a whole block falls below 1e-14 of the running sum.
        """
        self._check_time(t)
        r, eta, rp, etap = np.broadcast_arrays(
            *(np.asarray(a, dtype=float) for a in (r, eta, rp, etap)))
        half = 0.5 * self.kappa
        if np.any(np.abs(eta) > half + 1e-12) or np.any(np.abs(etap) > half + 1e-12):
            raise DomainMembershipError("angular coordinate outside the closed aperture")
        z = r * rp / (2.0 * t)
        gauss = np.exp(-((r - rp) ** 2) / (4.0 * t)) / (self.kappa * t)
        total = np.zeros_like(z)
        first_mode = None
        scale = 0.0
        k = 1
        while k <= self.k_max:
            ks = np.arange(k, min(k + _BLOCK, self.k_max + 1))
            nus = self._nu(ks)
            bess = ive(nus[:, None], z.reshape(1, -1)).reshape(len(ks), *z.shape)
            if first_mode is None:
                first_mode = bess[0]
            sines = (self._sines(eta, ks) * self._sines(etap, ks))
            total += np.einsum("k...,k...->...", bess, sines)
            scale = max(scale, float(np.max(np.abs(total))))
            env = float(np.max(bess[-1]))
            k = int(ks[-1]) + 1
            if env < _TRUNC_RTOL * max(scale, 1e-300):
                break
        else:
            raise NumericalFailure("mode sum not converged at k_max",
                                   {"k_max": self.k_max, "envelope": env})
        # The alternating mode sum loses all significant digits once the true
        # value sits below accumulated roundoff (mode count times eps times
        # the leading scaled-Bessel term); such values are clamped to the
        # exact zero they represent.
        noise_floor = 50.0 * k * np.finfo(float).eps * first_mode
        total = np.where(np.abs(total) < noise_floor, 0.0, total)
        out = gauss * total
        # points on the rays are exact zeros of the Dirichlet kernel
        on_ray = (np.abs(np.abs(eta) - half) < 1e-13) | (np.abs(np.abs(etap) - half) < 1e-13)
        return np.where(on_ray, 0.0, out)

    def eval(self, t: float, x, y) -> float:
        px = x if isinstance(x, ConePoint) else ConePoint(x)
        py = y if isinstance(y, ConePoint) else ConePoint(y)
        return float(self.eval_polar(t, px.r, px.angle, py.r, py.angle))

    # -- mesh-facing helpers ------------------------------------------------

    def row(self, t: float, x, mesh: GradedMesh) -> np.ndarray:
        """G(t; x, .) sampled on all mesh nodes."""
        px = x if isinstance(x, ConePoint) else ConePoint(x)
        return self.eval_polar(t, px.r, px.angle, mesh.R, mesh.ETA)

    def mode_count(self, tau: float, r: np.ndarray) -> int:
        """Number of modes needed for the worst radial pair at elapsed time tau."""
        zmax = float(r.max()) ** 2 / (2.0 * tau)
        k = 1
        while k <= self.k_max:
            if float(ive(self._nu(k), zmax)) < _TRUNC_RTOL and k > 4:
                return k
            k += 1
        return self.k_max

    def radial_tables(self, tau: float, r: np.ndarray, n_modes: int) -> np.ndarray:
        """A[k, i, j] = gauss(i, j) * ive(nu_k, r_i r_j / 2 tau) / (kappa tau)."""
        self._check_time(tau)
        rr = np.multiply.outer(r, r)
        z = rr / (2.0 * tau)
        gauss = np.exp(-np.subtract.outer(r, r) ** 2 / (4.0 * tau)) / (self.kappa * tau)
        ks = np.arange(1, n_modes + 1)
        tables = ive(self._nu(ks)[:, None, None], z[None, :, :])
        return tables * gauss[None, :, :]

    def convolve_slice(self, tables: np.ndarray, sines: np.ndarray,
                       weighted_values: np.ndarray) -> np.ndarray:
        """Apply the kernel at one elapsed time to quadrature-weighted nodal
        values via the mode-separable structure."""
        tmp = sines @ weighted_values.T        # (K, n_r): angular contraction
        rad = np.einsum("kij,kj->ki", tables, tmp)
        return rad.T @ sines                   # (n_r, n_eta)


def kernel_mass(t: float, x, kern: WedgeHeatKernel, mesh: GradedMesh) -> float:
    """Quadrature of G(t; x, .) over the truncated mesh; sub-Markov in [0, 1]."""
    return mesh.integrate(kern.row(t, x, mesh))


def cancellation_depth(t: float, r, eta, rp, etap) -> np.ndarray:
    """log of (leading series term / true kernel scale):
    ``r r' (1 - cos(eta - eta')) / (2t)``.  Series values are fully
    significant while this stays below roughly 16."""
    r, eta, rp, etap = (np.asarray(a, dtype=float) for a in (r, eta, rp, etap))
    return r * rp * (1.0 - np.cos(eta - etap)) / (2.0 * t)


def free_kernel(t: float, x, y) -> float:
    """Whole-plane Gaussian kernel, the pointwise majorant of the wedge kernel."""
    dx = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(np.exp(-np.dot(dx, dx) / (4.0 * t)) / (4.0 * math.pi * t))


def halfplane_image_kernel(t: float, x, y) -> float:
    """Reflection kernel for the straight-edge wedge (opening pi, edge = y-axis)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ystar = np.array([-y[0], y[1]])
    return free_kernel(t, x, y) - free_kernel(t, x, ystar)


@dataclass(frozen=True)
class KernelBoundParams:
    """Exponents and Gaussian rate of the kernel envelope bound."""

    lambda_plus: float
    lambda_minus: float
    sigma: float = 0.125

    def validate_for(self, kern: WedgeHeatKernel) -> None:
        lam_c = math.pi / kern.kappa
        if not (0.0 < self.lambda_plus < lam_c and 0.0 < self.lambda_minus < lam_c):
            raise ValueError(f"envelope exponents must lie strictly in (0, {lam_c:.6g})")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


def _attenuation_logs(t: float, r: float, rho: float) -> tuple[float, float]:
    """log of the vertex factor R = r/(r+sqrt t) and boundary factor
    J = rho/(rho+sqrt t)."""
    st = math.sqrt(t)
    return math.log(r / (r + st)), math.log(rho / (rho + st))


def bound_ratio(t: float, x, y, bparams: KernelBoundParams,
                kern: WedgeHeatKernel) -> float:
    """Kernel value divided by the full envelope (unit constant).

    Computed in log space so the envelope never underflows; boundary points,
    where both sides vanish, return 0 by convention.
    """
    bparams.validate_for(kern)
    px = x if isinstance(x, ConePoint) else ConePoint(x)
    py = y if isinstance(y, ConePoint) else ConePoint(y)
    rho_x = float(wedge_boundary_distance(px.r, px.angle, kern.kappa))
    rho_y = float(wedge_boundary_distance(py.r, py.angle, kern.kappa))
    if rho_x <= 0.0 or rho_y <= 0.0:
        return 0.0
    g = kern.eval(t, px, py)
    if g <= 0.0:
        return 0.0
    log_rx, log_jx = _attenuation_logs(t, px.r, rho_x)
    log_ry, log_jy = _attenuation_logs(t, py.r, rho_y)
    d2 = float(np.sum((px.coords - py.coords) ** 2))
    log_env = (-math.log(t)
               + (bparams.lambda_plus - 1.0) * log_rx
               + (bparams.lambda_minus - 1.0) * log_ry
               + log_jx + log_jy
               - bparams.sigma * d2 / t)
    with np.errstate(over="ignore"):
        return float(np.exp(math.log(g) - log_env))
