import math

import numpy as np
import pytest

from coneheat.errors import CapabilityError, CoverageError, DataError
from coneheat.geometry import DyadicCutoffs, RegularizedDistance
from coneheat.mesh import GradedMesh, ScalarField, uniform_times
from coneheat.norms import (
    WeightParams,
    dyadic_norm,
    dyadic_support_range,
    grid_derivatives,
    kn_norm,
    lp_weighted_norm,
    norm_property_checks,
    solution_norm,
    spacetime_norm,
)
from coneheat.solver import SeparableBump


def _bump_field(mesh, shift=0.0, width=1.0, eta_frac=0.7):
    shape = SeparableBump(mesh.kappa, u_center=0.0, u_width=width, eta_frac=eta_frac)
    return shape.value(np.exp(np.log(mesh.R) - shift), mesh.ETA)


def test_weight_params_derived_exponents():
    w = WeightParams(p=4.0, theta=3.0, Theta=2.5)
    assert w.mu == pytest.approx(1.0 + (3.0 - 2.0) / 4.0)
    assert w.alpha == pytest.approx(1.0 + (2.5 - 2.0) / 4.0)
    shifted = w.shifted(+4.0, -4.0)
    assert (shifted.theta, shifted.Theta) == (7.0, -1.5)
    assert shifted.mu == pytest.approx(1.0 + 5.0 / 4.0)  # recomputed, not stale
    with pytest.raises(ValueError):
        WeightParams(p=1.0, theta=0.0, Theta=0.0)


def test_lp_norm_sector_area_oracle():
    # f = 1, unit weights: the p-th power is the sector area 1.5 kappa
    mesh = GradedMesh.for_wedge(1.0, r_min=1.0, r_out=2.0, n_r=65, n_eta=65)
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0)
    val = lp_weighted_norm(np.ones_like(mesh.R), w, mesh) ** 2
    assert val == pytest.approx(1.5, rel=2e-4)


def test_lp_norm_radial_weight_oracle():
    # theta = Theta - 1 puts a 1/r in the density: integral = kappa * (2 - 1)
    mesh = GradedMesh.for_wedge(math.pi, r_min=1.0, r_out=2.0, n_r=129, n_eta=65)
    w = WeightParams(p=2.0, theta=1.0, Theta=2.0)
    val = lp_weighted_norm(np.ones_like(mesh.R), w, mesh) ** 2
    assert val == pytest.approx(math.pi, rel=1e-5)


def test_lp_norm_zero_and_nonfinite():
    mesh = GradedMesh.for_wedge(math.pi, n_r=8, n_eta=9)
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0)
    assert lp_weighted_norm(np.zeros_like(mesh.R), w, mesh) == 0.0
    bad = np.zeros_like(mesh.R)
    bad[3, 3] = np.inf
    with pytest.raises(DataError):
        lp_weighted_norm(bad, w, mesh)


def test_kn_norm_order_zero_is_lp():
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.1, r_out=4.0, n_r=49, n_eta=49)
    w = WeightParams(p=3.0, theta=2.3, Theta=1.9, n=0)
    f = _bump_field(mesh)
    assert kn_norm(f, w, mesh) == lp_weighted_norm(f, w, mesh)


def test_kn_norm_linear_field_gradient_term():
    # f = x: the only first-order contribution is the norm of rho itself
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.1, r_out=4.0, n_r=97, n_eta=97)
    w = WeightParams(p=2.0, theta=2.2, Theta=2.4, n=1)
    val = kn_norm(mesh.X, w, mesh)
    expect = (lp_weighted_norm(mesh.X, w, mesh)
              + lp_weighted_norm(mesh.rho, w, mesh))
    assert val == pytest.approx(expect, rel=1e-3)


def test_kn_shifted_index_identity():
    # moving n powers of the boundary distance across the weight indices is
    # an exact identity of the same quadrature sums
    mesh = GradedMesh.for_wedge(1.3 * math.pi, r_min=1e-2, r_out=6.0, n_r=49)
    f = _bump_field(mesh)
    p, theta, Theta = 2.5, 2.1, 1.8
    for n in (1, 2):
        lhs = kn_norm(f, WeightParams(p, theta + n * p, Theta + n * p, n=n), mesh)
        ders = grid_derivatives(f, mesh, n)
        base = WeightParams(p, theta, Theta)
        rhs = sum(
            lp_weighted_norm(mesh.rho ** (sum(a) + n) * arr, base, mesh)
            for a, arr in ders.items())
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_kn_norm_monotone_in_order():
    mesh = GradedMesh.for_wedge(math.pi, r_min=1e-2, r_out=6.0, n_r=49)
    f = _bump_field(mesh)
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0)
    vals = [kn_norm(f, w, mesh, order=n) for n in (0, 1, 2, 3)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_kn_norm_dilation_power_law():
    # every term scales like lambda^(-theta/p) under f -> f(lambda .)
    kappa = 1.4 * math.pi
    p, theta, Theta = 2.0, 2.6, 1.7
    w = WeightParams(p, theta, Theta, n=1)
    mesh = GradedMesh.for_wedge(kappa, r_min=1e-3, r_out=8.0, n_r=97)
    f0 = _bump_field(mesh)
    for lam in (0.5, 2.0):
        flam = _bump_field(mesh, shift=-math.log(lam))
        expect = lam ** (-theta / p) * kn_norm(f0, w, mesh)
        assert kn_norm(flam, w, mesh) == pytest.approx(expect, rel=2e-3)


def test_unweighted_case_matches_plain_lp():
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.5, r_out=2.0, n_r=49, n_eta=49)
    f = mesh.X * mesh.Y
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0)
    plain = float(np.sum(mesh.weights * f ** 2)) ** 0.5
    assert lp_weighted_norm(f, w, mesh) == pytest.approx(plain, rel=1e-14)


def test_norm_quadrature_convergence_first_order():
    w = WeightParams(p=2.0, theta=2.3, Theta=1.6, n=1)
    vals = []
    for n_r in (33, 65, 129):
        mesh = GradedMesh.for_wedge(math.pi, r_min=1e-2, r_out=6.0,
                                    n_r=n_r, n_eta=n_r)
        vals.append(kn_norm(_bump_field(mesh), w, mesh))
    changes = [abs(b - a) / a for a, b in zip(vals, vals[1:])]
    assert changes[1] < changes[0]
    assert changes[1] < 0.01


def test_derivative_order_capability_error():
    mesh = GradedMesh.for_wedge(math.pi, n_r=16, n_eta=17)
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0, n=5)
    with pytest.raises(CapabilityError):
        kn_norm(np.ones_like(mesh.R), w, mesh)


def test_spacetime_norm_constant_in_time():
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.1, r_out=4.0, n_r=33)
    times = uniform_times(2.0, 0.1)
    f0 = _bump_field(mesh)
    field = ScalarField(mesh, times, np.repeat(f0[None], times.size, axis=0))
    w = WeightParams(p=3.0, theta=2.0, Theta=2.0)
    expect = 2.0 ** (1.0 / 3.0) * kn_norm(f0, w, mesh)
    assert spacetime_norm(field, w) == pytest.approx(expect, rel=1e-12)


def test_spacetime_norm_separable_time_factor():
    # u = t * w: the time quadrature must reproduce the t^p moment
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.1, r_out=4.0, n_r=33)
    T = 1.0
    times = uniform_times(T, 0.005)
    f0 = _bump_field(mesh)
    field = ScalarField(mesh, times, times[:, None, None] * f0[None])
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0)
    expect = (T ** 3 / 3.0) ** 0.5 * kn_norm(f0, w, mesh)
    assert spacetime_norm(field, w) == pytest.approx(expect, rel=1e-4)


def test_solution_norm_reduces_without_time_derivative():
    mesh = GradedMesh.for_wedge(math.pi, r_min=0.1, r_out=4.0, n_r=33)
    times = uniform_times(1.0, 0.25)
    f0 = _bump_field(mesh)
    u = ScalarField(mesh, times, np.repeat(f0[None], times.size, axis=0))
    zero = ScalarField.zeros(mesh, times)
    w = WeightParams(p=2.0, theta=2.2, Theta=2.1, n=0)
    expect = spacetime_norm(u, w.shifted(-2.0, -2.0), order=2)
    assert solution_norm(u, zero, w) == pytest.approx(expect, rel=1e-14)


# ---------------------------------------------------------------------------
# shell-decomposition norm
# ---------------------------------------------------------------------------

def test_dyadic_norm_two_sided_and_scale_invariant():
    kappa = 1.5 * math.pi
    mesh = GradedMesh.for_wedge(kappa, r_min=1e-3, r_out=8.0, n_r=64)
    w = WeightParams(p=2.0, theta=2.4, Theta=1.7, n=1)
    psi = RegularizedDistance(mesh.domain)
    cut = DyadicCutoffs(psi)
    ratios = {}
    for shift in (-3.0, -1.5, 0.0):
        f = _bump_field(mesh, shift=shift, width=0.8, eta_frac=0.6)
        ratios[shift] = dyadic_norm(f, w, mesh, psi, cut) / kn_norm(f, w, mesh)
    # two-sided boundedness, mild variation within one dyadic period, exact
    # periodicity across whole periods
    vals = list(ratios.values())
    assert max(vals) / min(vals) < 1.3
    assert 0.05 < min(vals) and max(vals) < 20.0
    assert ratios[-3.0] == pytest.approx(ratios[0.0], rel=1e-5)


def test_dyadic_norm_exact_shell_shift_law():
    mesh = GradedMesh.for_wedge(math.pi, r_min=1e-3, r_out=8.0, n_r=96)
    w = WeightParams(p=2.0, theta=2.6, Theta=1.9, n=1)
    f0 = _bump_field(mesh, width=0.9)
    f1 = _bump_field(mesh, shift=-1.0, width=0.9)  # f(e x)
    law = dyadic_norm(f1, w, mesh) / dyadic_norm(f0, w, mesh)
    assert law == pytest.approx(math.exp(-w.theta / w.p), rel=1e-4)
    law_kn = kn_norm(f1, w, mesh) / kn_norm(f0, w, mesh)
    assert law == pytest.approx(law_kn, rel=1e-4)


def test_dyadic_support_locality():
    # a one-shell bump activates O(2 k0 + 1) shell indices
    mesh = GradedMesh.for_wedge(math.pi, r_min=1e-3, r_out=8.0, n_r=96)
    psi = RegularizedDistance(mesh.domain)
    cut = DyadicCutoffs(psi)
    f = _bump_field(mesh, width=0.35)
    lo, hi = dyadic_support_range(f, mesh, psi)
    assert hi - lo + 1 <= 2 * cut.k0 + 4


def test_dyadic_coverage_error_and_zero_field():
    mesh = GradedMesh.for_wedge(math.pi, r_min=1e-3, r_out=8.0, n_r=48)
    w = WeightParams(p=2.0, theta=2.0, Theta=2.0, n=0)
    f = _bump_field(mesh)
    with pytest.raises(CoverageError):
        dyadic_norm(f, w, mesh, k_range=(5, 9))
    assert dyadic_norm(np.zeros_like(f), w, mesh) == 0.0


def test_norm_property_checks_report():
    mesh = GradedMesh.for_wedge(1.2 * math.pi, r_min=1e-3, r_out=8.0, n_r=64)
    w = WeightParams(p=2.0, theta=2.3, Theta=1.8, n=1)
    slices = [_bump_field(mesh, shift=s, width=wd, eta_frac=ef)
              for s, wd, ef in ((0.0, 0.8, 0.6), (-1.0, 1.1, 0.4),
                                (-2.0, 0.6, 0.75), (0.5, 0.9, 0.55))]
    report = norm_property_checks(slices, w, mesh)
    emb = report["derivative_embedding"]
    assert not emb.violated()
    assert emb.max_ratio <= 1.0 + 1e-10
    for name in ("vertex_power_shift", "psi_power_shift"):
        chk = report[name]
        assert 0.0 < chk.min_ratio <= chk.max_ratio < 25.0
        assert chk.max_ratio / chk.min_ratio < 10.0
