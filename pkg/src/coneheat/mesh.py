"""Graded wedge meshes, time-indexed scalar fields, and derivative stencils.

The mesh is uniform in the mapped coordinates ``(u, eta) = (log r, eta)``,
which makes the radial grading geometric, keeps all finite-difference
stencils uniform, and excises the vertex at ``r_min``.  Quadrature is
trapezoidal in the mapped coordinates with the exact Jacobian ``r^2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DataError, ShapeError
from .geometry import Wedge2D, wedge_boundary_distance


@dataclass(frozen=True)
class GradedMesh:
    """Tensor grid over the truncated wedge ``{r_min < r < r_out}``.

    Nodes include the aperture rays (Dirichlet boundary) and the two
    artificial truncation circles.
    """

    domain: Wedge2D
    r_min: float = 1e-3
    r_out: float = 8.0
    n_r: int = 48
    n_eta: int = 0  # 0 means: pick ~64 nodes per pi of aperture

    def __post_init__(self):
        if not 0.0 < self.r_min < self.r_out:
            raise ValueError("need 0 < r_min < r_out")
        if self.n_eta == 0:
            n = int(round(64 * self.domain.kappa / math.pi)) + 1
            object.__setattr__(self, "n_eta", max(n, 17))
        if self.n_r < 4 or self.n_eta < 4:
            raise ValueError("mesh too coarse for second-order stencils")

    @classmethod
    def for_wedge(cls, kappa: float, **kwargs) -> "GradedMesh":
        return cls(domain=Wedge2D(kappa), **kwargs)

    @property
    def kappa(self) -> float:
        return self.domain.kappa

    @cached_property
    def u(self) -> np.ndarray:
        return np.linspace(math.log(self.r_min), math.log(self.r_out), self.n_r)

    @cached_property
    def eta(self) -> np.ndarray:
        half = 0.5 * self.kappa
        return np.linspace(-half, half, self.n_eta)

    @property
    def du(self) -> float:
        return float(self.u[1] - self.u[0])

    @property
    def deta(self) -> float:
        return float(self.eta[1] - self.eta[0])

    @cached_property
    def R(self) -> np.ndarray:
        return np.exp(self.u)[:, None] * np.ones_like(self.eta)[None, :]

    @cached_property
    def ETA(self) -> np.ndarray:
        return np.ones_like(self.u)[:, None] * self.eta[None, :]

    @cached_property
    def X(self) -> np.ndarray:
        return self.R * np.cos(self.ETA)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.R * np.sin(self.ETA)

    @cached_property
    def rho(self) -> np.ndarray:
        """Distance to the true wedge boundary (the two rays / vertex)."""
        return wedge_boundary_distance(self.R, self.ETA, self.kappa)

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights: trapezoid in (u, eta) times Jacobian r^2."""
        wu = np.full(self.n_r, self.du)
        wu[0] *= 0.5
        wu[-1] *= 0.5
        we = np.full(self.n_eta, self.deta)
        we[0] *= 0.5
        we[-1] *= 0.5
        return self.R ** 2 * wu[:, None] * we[None, :]

    @cached_property
    def interior(self) -> np.ndarray:
        m = np.zeros((self.n_r, self.n_eta), dtype=bool)
        m[1:-1, 1:-1] = True
        return m

    @cached_property
    def dirichlet_rays(self) -> np.ndarray:
        """Mask of nodes on the aperture rays (the physical boundary)."""
        m = np.zeros((self.n_r, self.n_eta), dtype=bool)
        m[:, 0] = True
        m[:, -1] = True
        return m

    def refine(self, factor: int = 2) -> "GradedMesh":
        """Nested refinement: halve (or 1/factor) both mapped spacings."""
        return replace(
            self,
            n_r=factor * (self.n_r - 1) + 1,
            n_eta=factor * (self.n_eta - 1) + 1,
        )

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))

    def params(self) -> dict:
        return {
            "kappa": self.kappa,
            "r_min": self.r_min,
            "r_out": self.r_out,
            "n_r": self.n_r,
            "n_eta": self.n_eta,
        }


# ---------------------------------------------------------------------------
# finite-difference stencils in the mapped coordinates
# ---------------------------------------------------------------------------

def d1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """First derivative: centered interior, second-order one-sided edges."""
    return np.gradient(values, h, axis=axis, edge_order=2)


def d2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second derivative: 3-point centered interior, 4-point one-sided edges."""
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = f[2:] - 2.0 * f[1:-1] + f[:-2]
    out[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
    out[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    return np.moveaxis(out, 0, axis) / h ** 2


def cartesian_gradient(values: np.ndarray, mesh: GradedMesh, r=None, eta=None):
    """(d/dx, d/dy) of a grid function via the (log r, eta) chain rule."""
    R = mesh.R if r is None else r
    ETA = mesh.ETA if eta is None else eta
    fu = d1(values, mesh.du, 0)
    fe = d1(values, mesh.deta, 1)
    c, s = np.cos(ETA), np.sin(ETA)
    inv_r = 1.0 / R
    return inv_r * (c * fu - s * fe), inv_r * (s * fu + c * fe)


def cartesian_hessian(values: np.ndarray, mesh: GradedMesh, r=None, eta=None):
    """(d2/dx2, d2/dxdy, d2/dy2) via the mapped-coordinate chain rule."""
    R = mesh.R if r is None else r
    ETA = mesh.ETA if eta is None else eta
    fu = d1(values, mesh.du, 0)
    fe = d1(values, mesh.deta, 1)
    fuu = d2(values, mesh.du, 0)
    fee = d2(values, mesh.deta, 1)
    fue = d1(d1(values, mesh.du, 0), mesh.deta, 1)
    c, s = np.cos(ETA), np.sin(ETA)
    cc, ss, cs = c * c, s * s, c * s
    inv_r2 = 1.0 / R ** 2
    fxx = inv_r2 * (cc * fuu - 2 * cs * fue + ss * fee + (ss - cc) * fu + 2 * cs * fe)
    fxy = inv_r2 * (cs * fuu + (cc - ss) * fue - cs * fee - 2 * cs * fu + (ss - cc) * fe)
    fyy = inv_r2 * (ss * fuu + 2 * cs * fue + cc * fee + (cc - ss) * fu - 2 * cs * fe)
    return fxx, fxy, fyy


# ---------------------------------------------------------------------------
# time-indexed fields
# ---------------------------------------------------------------------------

@dataclass
class ScalarField:
    """Per-time node values on a graded mesh, zero-extended outside it."""

    mesh: GradedMesh
    times: np.ndarray
    values: np.ndarray
    stats: dict | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.times.size, self.mesh.n_r, self.mesh.n_eta):
            raise ShapeError(
                f"values shape {self.values.shape} incompatible with "
                f"{self.times.size} times on a {self.mesh.n_r}x{self.mesh.n_eta} mesh"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataError("field contains non-finite samples")
        if self.times.size and (np.any(np.diff(self.times) <= 0) or self.times[0] != 0.0):
            raise ShapeError("time grid must start at 0 and increase strictly")

    @classmethod
    def from_function(cls, mesh: GradedMesh, times, fn) -> "ScalarField":
        times = np.asarray(times, dtype=float)
        vals = np.stack([np.asarray(fn(t, mesh.R, mesh.ETA), dtype=float) for t in times])
        return cls(mesh, times, vals)

    @classmethod
    def zeros(cls, mesh: GradedMesh, times) -> "ScalarField":
        times = np.asarray(times, dtype=float)
        return cls(mesh, times, np.zeros((times.size, mesh.n_r, mesh.n_eta)))

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def slice(self, m: int) -> np.ndarray:
        return self.values[m]

    def compatible_with(self, other: "ScalarField") -> bool:
        return (
            self.values.shape == other.values.shape
            and np.array_equal(self.times, other.times)
            and self.mesh.params() == other.mesh.params()
        )

    def to_csv(self, path) -> None:
        """Long-format CSV (t, r, eta, value) plus a JSON mesh header."""
        path = Path(path)
        nt, nr, ne = self.values.shape
        t = np.repeat(self.times, nr * ne)
        r = np.tile(self.mesh.R.ravel(), nt)
        eta = np.tile(self.mesh.ETA.ravel(), nt)
        table = np.column_stack([t, r, eta, self.values.ravel()])
        np.savetxt(path, table, fmt="%.17g", delimiter=",", header="t,r,eta,value", comments="")
        header = {"mesh": self.mesh.params(), "times": [float(x) for x in self.times]}
        path.with_suffix(".json").write_text(json.dumps(header, indent=2, sort_keys=True))

    @classmethod
    def from_csv(cls, path) -> "ScalarField":
        path = Path(path)
        header = json.loads(path.with_suffix(".json").read_text())
        mesh = GradedMesh.for_wedge(**{k: v for k, v in header["mesh"].items() if k != "kappa"},
                                    kappa=header["mesh"]["kappa"])
        times = np.asarray(header["times"], dtype=float)
        table = np.loadtxt(path, delimiter=",", skiprows=1)
        vals = table[:, 3].reshape(times.size, mesh.n_r, mesh.n_eta)
        return cls(mesh, times, vals)


def uniform_times(T: float, dt: float) -> np.ndarray:
    m = int(round(T / dt))
    if abs(m * dt - T) > 1e-9 * max(T, 1.0):
        raise ShapeError(f"dt={dt} does not divide T={T}")
    return np.linspace(0.0, T, m + 1)
