import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import hyp2f1

from coneheat.exponents import (
    CriticalExponents,
    EllipticityPair,
    beltrami_eigenvalue,
    cap_eigenvalue_degree,
    lambda_from_Lambda,
    lambda_lower_bound,
    legendre_p,
    theta_equals_Theta_feasible,
    weight_windows,
)
from coneheat.geometry import CapCone3D, Wedge2D

# roots of the Legendre function at the cap edge, frozen from an independent
# scipy.special.hyp2f1 + brentq root-find (cross-checked against mpmath)
CAP_DEGREE_PI_3 = 1.7772882701589463
CAP_DEGREE_2PI_3 = 0.6015093093912539


def test_wedge_eigenvalue_closed_form():
    assert beltrami_eigenvalue(Wedge2D(math.pi)) == 1.0
    assert beltrami_eigenvalue(Wedge2D(math.pi / 2)) == pytest.approx(4.0, abs=1e-14)


def test_wedge_eigenvalue_against_sturm_liouville_fd():
    # 1-d Dirichlet second-difference eigenvalue on the aperture arc
    for kappa in (math.pi / 2, math.pi, 1.5 * math.pi):
        n = 2000
        h = kappa / (n + 1)
        main = np.full(n, 2.0 / h ** 2)
        off = np.full(n - 1, -1.0 / h ** 2)
        evals = np.linalg.eigvalsh(np.diag(main) + np.diag(off, 1) + np.diag(off, -1))
        assert beltrami_eigenvalue(Wedge2D(kappa)) == pytest.approx(
            evals[0], rel=1e-5)


def test_legendre_series_against_scipy_hypergeometric():
    rng = np.random.default_rng(2)
    for _ in range(60):
        nu = rng.uniform(0.0, 8.0)
        x = rng.uniform(-0.8, 1.0)
        assert legendre_p(nu, x) == pytest.approx(
            hyp2f1(-nu, nu + 1.0, 1.0, 0.5 * (1.0 - x)), rel=1e-11, abs=1e-12)


def test_cap_degree_hemisphere_and_frozen_roots():
    assert cap_eigenvalue_degree(math.pi / 2) == pytest.approx(1.0, abs=1e-9)
    assert cap_eigenvalue_degree(math.pi / 3) == pytest.approx(
        CAP_DEGREE_PI_3, abs=1e-8)
    assert cap_eigenvalue_degree(2.0 * math.pi / 3) == pytest.approx(
        CAP_DEGREE_2PI_3, abs=1e-8)


def test_cap_degree_fresh_rootfind_oracle():
    # recompute the root with an independent solver at a new angle
    alpha = 0.43 * math.pi
    x = math.cos(alpha)
    fn = lambda nu: hyp2f1(-nu, nu + 1.0, 1.0, 0.5 * (1.0 - x))
    grid = np.linspace(1e-6, 20.0, 400)
    vals = [fn(g) for g in grid]
    root = None
    for i in range(len(grid) - 1):
        if vals[i] > 0.0 >= vals[i + 1]:
            root = brentq(fn, grid[i], grid[i + 1], xtol=1e-12)
            break
    assert root is not None
    assert cap_eigenvalue_degree(alpha) == pytest.approx(root, abs=1e-8)


def test_cap_eigenvalue_hemisphere():
    assert beltrami_eigenvalue(CapCone3D(math.pi / 2)) == pytest.approx(2.0, abs=1e-8)
    assert beltrami_eigenvalue(CapCone3D(math.pi / 3)) > 2.0


def test_domain_monotonicity_of_eigenvalue():
    wedge_vals = [beltrami_eigenvalue(Wedge2D(k))
                  for k in (0.5, 1.0, 2.0, 4.0, 6.0)]
    assert all(a > b for a, b in zip(wedge_vals, wedge_vals[1:]))
    cap_vals = [beltrami_eigenvalue(CapCone3D(a))
                for a in (0.4, 0.8, 1.4, 2.0, 2.6)]
    assert all(a > b for a, b in zip(cap_vals, cap_vals[1:]))


def test_lambda_from_Lambda_values():
    assert lambda_from_Lambda(1.0, 2) == pytest.approx(1.0)
    assert lambda_from_Lambda(2.0, 3) == pytest.approx(1.0)
    assert lambda_from_Lambda(4.0, 2) == pytest.approx(2.0)


def test_lambda_monotone_and_positive():
    lams = [lambda_from_Lambda(L, 3) for L in (0.1, 0.5, 1.0, 3.0, 10.0)]
    assert all(v > 0.0 for v in lams)
    assert all(a < b for a, b in zip(lams, lams[1:]))


def test_lambda_lower_bound_properties():
    assert lambda_lower_bound(EllipticityPair(1.0, 1.0), 1.0, 2) == pytest.approx(1.0)
    assert lambda_lower_bound(EllipticityPair(0.25, 1.0), 1.0, 2) == pytest.approx(0.5)
    assert lambda_lower_bound(EllipticityPair(1e-9, 1.0), 1.0, 3) == 0.0
    # monotone in the ellipticity ratio
    vals = [lambda_lower_bound(EllipticityPair(v, 1.0), 2.0, 3)
            for v in (0.1, 0.3, 0.6, 1.0)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    # coincides with the clean formula at ratio one
    assert vals[-1] == pytest.approx(lambda_from_Lambda(2.0, 3))


def test_weight_windows_examples():
    exps = CriticalExponents.for_laplacian(Wedge2D(math.pi))
    win = weight_windows(2.0, exps)
    assert (win.theta_lo, win.theta_hi) == (0.0, 4.0)
    assert (win.Theta_lo, win.Theta_hi) == (1.0, 3.0)
    assert theta_equals_Theta_feasible(win, 2.0)

    narrow = CriticalExponents.for_laplacian(Wedge2D(math.pi / 2))
    win = weight_windows(2.0, narrow)
    assert (win.theta_lo, win.theta_hi) == (-2.0, 6.0)

    # near-slit wedge at large p: the pure boundary choice fails
    lam = 0.5
    exps_like = CriticalExponents(Lambda=lam ** 2, lambda_plus=lam,
                                  lambda_minus=lam, d=2, lambda_robust=lam)
    win = weight_windows(5.0, exps_like)
    assert (win.theta_lo, win.theta_hi) == (2.5, 7.5)
    assert not theta_equals_Theta_feasible(win, 2.0)


def test_windows_open_and_nonempty():
    for kappa in (0.3, math.pi, 1.95 * math.pi):
        exps = CriticalExponents.for_laplacian(Wedge2D(kappa))
        for p in (1.5, 4.0):
            win = weight_windows(p, exps)
            assert win.theta_lo < win.theta_hi
            assert win.Theta_lo < win.Theta_hi
            # boundary values are infeasible (strict inequalities)
            assert not win.contains_theta(win.theta_lo)
            assert not win.contains_Theta(win.Theta_hi)


def test_violated_inequalities_naming():
    exps = CriticalExponents.for_laplacian(Wedge2D(1.5 * math.pi))
    win = weight_windows(8.0, exps)
    named = win.violated_inequalities(2.0, 2.0)
    assert named and "p(1-lambda+)" in named[0]


def test_ellipticity_pair_validation():
    with pytest.raises(ValueError):
        EllipticityPair(2.0, 1.0)
    with pytest.raises(ValueError):
        EllipticityPair(0.0, 1.0)
