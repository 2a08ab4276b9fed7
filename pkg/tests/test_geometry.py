import math

import numpy as np
import pytest

from coneheat.errors import (
    ChartDomainError,
    DomainMembershipError,
    PositivityError,
    SingularInputError,
)
from coneheat.geometry import (
    CapCone3D,
    ConePoint,
    DyadicCutoffs,
    RegularizedDistance,
    Wedge2D,
    bump_zeta,
    cap_image_radius,
    chart_radius,
    flatten,
    rho_boundary,
    rho_vertex,
    sphere_distance_pair,
    stereographic,
)

# frozen by an independent 1-d minimization of the shifted bump sums
ZETA_SUM_LOWER_BOUND = 0.4091295865840461


def test_rho_vertex_norms():
    assert rho_vertex((3.0, 4.0)) == 5.0
    assert rho_vertex((0.0, 0.0)) == 0.0
    assert rho_vertex((1.0, 1.0, 1.0)) == pytest.approx(math.sqrt(3.0), abs=1e-15)


def test_rho_boundary_foot_and_vertex_cases():
    # foot of the perpendicular on the nearer ray
    w = Wedge2D(math.pi / 2)
    assert rho_boundary(ConePoint.from_polar(1.0, 0.0), w) == pytest.approx(
        math.sin(math.pi / 4), abs=1e-14)
    # reentrant wedge: the vertex is the nearest boundary point on the bisector
    w2 = Wedge2D(1.5 * math.pi)
    assert rho_boundary(ConePoint.from_polar(2.0, 0.0), w2) == pytest.approx(2.0)
    # boundary ray
    assert rho_boundary(ConePoint.from_polar(1.3, 0.25 * math.pi), w) == pytest.approx(
        0.0, abs=1e-15)


def test_rho_boundary_against_bruteforce_ray_distance():
    rng = np.random.default_rng(11)
    for kappa in (0.4, math.pi / 2, math.pi, 1.7 * math.pi):
        w = Wedge2D(kappa)
        s = np.linspace(0.0, 60.0, 400_001)  # points along each boundary ray
        for _ in range(20):
            r = 10 ** rng.uniform(-1, 1)
            eta = rng.uniform(-kappa / 2, kappa / 2)
            x = np.array([r * math.cos(eta), r * math.sin(eta)])
            d = min(
                np.min(np.hypot(x[0] - s * math.cos(kappa / 2),
                                x[1] - s * math.sin(kappa / 2))),
                np.min(np.hypot(x[0] - s * math.cos(kappa / 2),
                                x[1] + s * math.sin(kappa / 2))),
            )
            assert rho_boundary(ConePoint(x), w) == pytest.approx(d, abs=2e-4)


def test_rho_boundary_cap_cone():
    cap = CapCone3D(math.pi / 3)
    # axis point: separation pi/3 < pi/2, foot case
    assert rho_boundary(ConePoint.from_cap_angles(2.0, 0.0), cap) == pytest.approx(
        2.0 * math.sin(math.pi / 3))
    wide = CapCone3D(0.8 * math.pi)
    assert rho_boundary(ConePoint.from_cap_angles(1.5, 0.0), wide) == pytest.approx(1.5)


def test_rho_ordering_and_homogeneity():
    rng = np.random.default_rng(5)
    w = Wedge2D(1.2 * math.pi)
    for _ in range(50):
        r = 10 ** rng.uniform(-2, 1)
        eta = rng.uniform(-0.6 * math.pi, 0.6 * math.pi)
        x = ConePoint.from_polar(r, eta)
        rho = rho_boundary(x, w)
        assert rho <= rho_vertex(x) + 1e-15
        lam = 10 ** rng.uniform(-1, 1)
        assert rho_boundary(ConePoint.from_polar(lam * r, eta), w) == pytest.approx(
            lam * rho, rel=1e-12)


def test_membership_error():
    with pytest.raises(DomainMembershipError):
        rho_boundary(ConePoint.from_polar(1.0, 0.6 * math.pi), Wedge2D(math.pi))


def test_stereographic_values_and_pole():
    assert np.allclose(stereographic((0.0, 0.0, 1.0)), (0.0, 0.0))
    assert np.allclose(stereographic((1.0, 0.0, 0.0)), (2.0, 0.0))
    assert np.allclose(stereographic((0.0, 0.6, 0.8)), (0.0, 2.0 * 0.6 / 1.8))
    with pytest.raises(SingularInputError):
        stereographic((0.0, 0.0, -1.0))


def test_sphere_distance_pair_examples():
    d_cone, d_sphere = sphere_distance_pair(ConePoint.from_polar(1.0, 0.0),
                                            Wedge2D(math.pi))
    assert d_cone == pytest.approx(1.0)
    assert d_sphere == pytest.approx(math.sqrt(2.0))
    # boundary point
    d_cone, d_sphere = sphere_distance_pair(
        ConePoint.from_polar(1.0, 0.25 * math.pi), Wedge2D(math.pi / 2))
    assert d_cone == pytest.approx(0.0, abs=1e-15)
    assert d_sphere == pytest.approx(0.0, abs=1e-15)
    # hemisphere apex
    d_cone, d_sphere = sphere_distance_pair(
        ConePoint.from_cap_angles(1.0, 0.0), CapCone3D(math.pi / 2))
    assert d_cone == pytest.approx(1.0)
    assert d_sphere == pytest.approx(math.sqrt(2.0))


def test_sphere_distance_comparison_invariant():
    rng = np.random.default_rng(21)
    domains = [Wedge2D(0.5), Wedge2D(math.pi), Wedge2D(1.9 * math.pi),
               CapCone3D(0.3), CapCone3D(math.pi / 2), CapCone3D(0.9 * math.pi)]
    for dom in domains:
        for _ in range(200):
            ang = rng.uniform(0.0, dom.half_aperture)
            if isinstance(dom, Wedge2D):
                x = ConePoint.from_polar(1.0, rng.choice([-1, 1]) * ang)
            else:
                x = ConePoint.from_cap_angles(1.0, ang, rng.uniform(0, 2 * math.pi))
            d_cone, d_sphere = sphere_distance_pair(x, dom)
            assert d_cone <= d_sphere + 1e-14
            assert d_sphere <= 2.0 * d_cone + 1e-14


def test_angular_separation_chord_bound():
    # unit-vector pairs with bounded inner product separate in norm
    rng = np.random.default_rng(3)
    for _ in range(500):
        x = rng.normal(size=3) * 10 ** rng.uniform(-2, 2)
        y = rng.normal(size=3) * 10 ** rng.uniform(-2, 2)
        cosang = float(x @ y / (np.linalg.norm(x) * np.linalg.norm(y)))
        delta = 1.0 - cosang
        if not 0.0 < delta <= 1.0:
            continue
        assert delta * (x @ x + y @ y) <= float((x - y) @ (x - y)) + 1e-9


# ---------------------------------------------------------------------------
# flattening chart
# ---------------------------------------------------------------------------

def _edge_point(cap: CapCone3D, azimuth: float) -> np.ndarray:
    sa = math.sin(cap.alpha_cap)
    return np.array([sa * math.cos(azimuth), sa * math.sin(azimuth),
                     math.cos(cap.alpha_cap)])


def test_flatten_boundary_and_homogeneity():
    cap = CapCone3D(math.pi / 3)
    p = _edge_point(cap, 0.0)
    out = flatten(p, 2.5 * p, cap)
    assert out[0] == pytest.approx(0.0, abs=1e-12)
    x = 0.7 * _edge_point(CapCone3D(0.3 * math.pi), 0.1)  # near the cap edge
    a = flatten(p, x, cap)
    b = flatten(p, 2.0 * x, cap)
    assert np.allclose(2.0 * a, b, rtol=1e-12)


def test_flatten_comparability_constants_by_chart_sweep():
    cap = CapCone3D(math.pi / 3)
    p = _edge_point(cap, 0.0)
    r0 = chart_radius(cap)
    rng = np.random.default_rng(9)
    ratios_rho, ratios_norm = [], []
    kept = 0
    while kept < 300:
        polar = rng.uniform(0.0, cap.alpha_cap)
        az = rng.uniform(-0.6, 0.6)
        scale = 10 ** rng.uniform(-1, 1)
        x = ConePoint.from_cap_angles(scale, polar, az)
        if np.linalg.norm(x.coords / scale - p) > r0:
            continue
        kept += 1
        out = flatten(p, x, cap)
        rho = rho_boundary(x, cap)
        if rho > 1e-12:
            ratios_rho.append(out[0] / rho)
        ratios_norm.append(np.linalg.norm(out) / scale)
    for ratios in (ratios_rho, ratios_norm):
        ratios = np.asarray(ratios)
        n_const = max(ratios.max(), (1.0 / ratios).max())
        assert np.isfinite(n_const)
        assert ratios.min() > 0
        assert n_const < 25.0


def test_flatten_bilipschitz_on_pairs():
    cap = CapCone3D(math.pi / 3)
    p = _edge_point(cap, 0.0)
    r0 = chart_radius(cap)
    rng = np.random.default_rng(12)
    ratios = []
    kept = 0
    while kept < 200:
        polar = rng.uniform(0.2, cap.alpha_cap, 2)
        az = rng.uniform(-0.4, 0.4, 2)
        scale = 10 ** rng.uniform(-0.5, 0.5, 2)
        xs = [ConePoint.from_cap_angles(scale[i], polar[i], az[i]) for i in range(2)]
        if any(np.linalg.norm(x.coords / np.linalg.norm(x.coords) - p) > r0 for x in xs):
            continue
        gap = np.linalg.norm(xs[0].coords - xs[1].coords)
        if gap < 1e-8:
            continue
        kept += 1
        out = [flatten(p, x, cap) for x in xs]
        ratios.append(np.linalg.norm(out[0] - out[1]) / gap)
    ratios = np.asarray(ratios)
    assert max(ratios.max(), (1.0 / ratios).max()) < 25.0


def test_flatten_chart_domain_error():
    cap = CapCone3D(math.pi / 3)
    p = _edge_point(cap, 0.0)
    far = ConePoint.from_cap_angles(1.0, 0.05, math.pi)  # opposite azimuth
    with pytest.raises(ChartDomainError):
        flatten(p, far, cap)


def test_cap_image_radius_is_stereographic_edge_radius():
    cap = CapCone3D(0.7)
    edge = _edge_point(cap, 1.1)
    assert np.linalg.norm(stereographic(edge)) == pytest.approx(cap_image_radius(cap))


# ---------------------------------------------------------------------------
# regularized distance and cutoffs
# ---------------------------------------------------------------------------

def test_psi_matches_rho_for_straight_edge():
    psi = RegularizedDistance(Wedge2D(math.pi))
    x = ConePoint.from_polar(1.7, 0.0)
    assert psi.value(x) == pytest.approx(rho_boundary(x, psi.domain), rel=1e-12)
    assert psi.n_psi == pytest.approx(1.0, abs=1e-9)


def test_psi_homogeneity_and_comparability():
    rng = np.random.default_rng(4)
    for kappa in (0.7, math.pi / 2, math.pi, 1.6 * math.pi):
        psi = RegularizedDistance(Wedge2D(kappa))
        n = psi.n_psi
        for _ in range(100):
            r = 10 ** rng.uniform(-3, 1)
            eta = rng.uniform(-0.499, 0.499) * kappa
            x = ConePoint.from_polar(r, eta)
            v = psi.value(x)
            assert psi.value(ConePoint.from_polar(2 * r, eta)) == pytest.approx(
                2 * v, rel=1e-12)
            rho = rho_boundary(x, psi.domain)
            assert v <= n * rho * (1 + 1e-9)
            assert v >= rho / n * (1 - 1e-9)


def test_psi_cap_profile():
    psi = RegularizedDistance(CapCone3D(math.pi / 3))
    x = ConePoint.from_cap_angles(2.0, 0.2, 0.7)
    v = psi.value(x)
    rho = rho_boundary(x, CapCone3D(math.pi / 3))
    assert v / rho < psi.n_psi + 1e-9
    assert rho / v < psi.n_psi + 1e-9


def test_psi_positivity_errors():
    psi = RegularizedDistance(Wedge2D(math.pi))
    with pytest.raises(PositivityError):
        psi.value(ConePoint.from_polar(1.0, 0.5 * math.pi))
    with pytest.raises(PositivityError):
        psi.value(ConePoint((0.0, 0.0)))


def test_psi_derivative_bounds_by_finite_differences():
    # |D^m psi| <= N(m) rho^(1-m) for m <= 2, probed by central differences
    kappa = 1.5 * math.pi
    psi = RegularizedDistance(Wedge2D(kappa))
    rng = np.random.default_rng(8)
    for _ in range(60):
        r = 10 ** rng.uniform(-2, 1)
        eta = rng.uniform(-0.45, 0.45) * kappa
        x = np.array([r * math.cos(eta), r * math.sin(eta)])
        rho = rho_boundary(ConePoint(x), psi.domain)
        h = 1e-5 * min(r, rho)
        vals = {}
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                vals[(dx, dy)] = psi.value(ConePoint(x + h * np.array([dx, dy])))
        gx = (vals[(1, 0)] - vals[(-1, 0)]) / (2 * h)
        gy = (vals[(0, 1)] - vals[(0, -1)]) / (2 * h)
        gxx = (vals[(1, 0)] - 2 * vals[(0, 0)] + vals[(-1, 0)]) / h ** 2
        gyy = (vals[(0, 1)] - 2 * vals[(0, 0)] + vals[(0, -1)]) / h ** 2
        gxy = (vals[(1, 1)] - vals[(1, -1)] - vals[(-1, 1)] + vals[(-1, -1)]) / (4 * h ** 2)
        assert math.hypot(gx, gy) < 8.0
        assert max(abs(gxx), abs(gyy), abs(gxy)) < 40.0 / rho
        grad = psi.gradient(ConePoint(x))
        assert np.allclose(grad, (gx, gy), rtol=1e-4, atol=1e-6)


def test_zeta_bump_support_and_positivity():
    e = math.e
    assert bump_zeta(1.0 / e) == 0.0
    assert bump_zeta(e) == 0.0
    assert bump_zeta(1.0) > 0.0
    u = np.linspace(1.0 / e + 1e-9, e - 1e-9, 1001)
    assert np.all(bump_zeta(u) > 0.0)
    assert np.all(bump_zeta(np.array([0.1, 3.0, 10.0])) == 0.0)


def test_cutoff_family_lower_bound_and_support():
    psi = RegularizedDistance(Wedge2D(1.5 * math.pi))
    cut = DyadicCutoffs(psi)
    assert cut.delta == pytest.approx(ZETA_SUM_LOWER_BOUND, rel=1e-6)
    rng = np.random.default_rng(13)
    k_range = range(-12, 14)
    for _ in range(150):
        r = 10 ** rng.uniform(-3, 1)
        eta = rng.uniform(-0.499, 0.499) * 1.5 * math.pi
        x = ConePoint.from_polar(r, eta)
        total = sum(cut.zeta_k(k, x) for k in k_range)
        assert total >= cut.delta * (1 - 1e-9)
        rho = rho_boundary(x, psi.domain)
        for k in k_range:
            if cut.zeta_k(k, x) > 0.0:
                assert math.exp(-k - cut.k0) < rho < math.exp(-k + cut.k0)
