import math

import numpy as np
import pytest

from diracbag import dispersion, fiber


def test_theta_defining_relation():
    for sign, k, xi in (("minus", 1, 0.5), ("minus", 2, 2.0), ("plus", 1, 1.0)):
        pt = dispersion.theta(sign, k, xi, n=2001)
        resid = fiber.nu_k(sign, k, pt.theta, xi, n=2001) - pt.theta**2
        assert abs(resid) <= 1e-6


def test_theta_at_minimum(a0res):
    pt = dispersion.theta("minus", 1, a0res.a0)
    assert pt.theta == pytest.approx(a0res.a0, abs=1e-6)


def test_theta_limits():
    assert abs(dispersion.theta("minus", 1, 8.0).theta - math.sqrt(2)) <= 0.05
    assert dispersion.theta("plus", 1, -8.0).theta <= 0.05


def test_theta_minus_single_minimum_plus_increasing():
    xis = np.arange(-1.0, 4.0 + 1e-9, 0.5)
    minus = np.array([dispersion.theta("minus", 1, x, n=1001).theta for x in xis])
    signs = np.sign(np.diff(minus))
    assert np.sum(np.abs(np.diff(signs)) > 0) == 1
    plus = np.array([dispersion.theta("plus", 1, x, n=1001).theta for x in xis])
    assert np.all(np.diff(plus) > -1e-12)


def test_nu_of_alpha_large_and_small():
    nu10, _, _ = dispersion.nu_of_alpha(10.0, n=2001)
    assert abs(nu10 - 2.0) < 0.1
    nu005, _, _ = dispersion.nu_of_alpha(0.05, n=2001)
    assert nu005 / 0.05 > 3.0  # frozen slope oracle: ~4.07 on fine grids
    with pytest.raises(ValueError):
        dispersion.nu_of_alpha(0.0)


def test_nu_of_alpha_critical_relation(a0res):
    # at the minimizer, nu = -alpha^2 + 2 alpha xi_alpha, up to the O(step^2)
    # offset between the discrete and continuum eigenvalues
    for alpha in (0.8, 1.5):
        nu, xi_a, _ = dispersion.nu_of_alpha(alpha, n=2001)
        assert nu == pytest.approx(-(alpha**2) + 2 * alpha * xi_a, abs=3e-4)


def test_nu_curve_invariants():
    grid = np.arange(0.05, 2.0 + 1e-9, 0.15)
    curve = dispersion.nu_curve(grid, n=1001)
    assert np.all(np.diff(curve.nu) > 0)
    second = np.diff(curve.nu, 2)
    assert np.all(second <= 1e-6)  # concavity
    assert np.all((curve.nu > 0) & (curve.nu < 2))
    small = grid <= 0.2
    assert np.all(curve.nu[small] / grid[small] > 0.5)


def test_find_a0(a0res):
    assert 0 < a0res.a0 < math.sqrt(2)
    assert abs(a0res.a0 - dispersion.A0_REFERENCE) <= 2e-3
    assert 0 < a0res.u0sq < 2 * a0res.a0
    assert a0res.d2xi_nu > 0
    assert a0res.c0 == pytest.approx(
        a0res.a0 * a0res.u0sq / (2 * a0res.a0 - a0res.u0sq), rel=1e-12
    )
    # eq.C3 on the minus branch: d2xi nu = 2 alpha u(0)^2 at the minimizer
    assert a0res.d2xi_nu == pytest.approx(2 * a0res.a0 * a0res.u0sq, rel=1e-2)


def test_sign_change_unique_on_scan():
    alphas = np.arange(0.1, 1.5 + 1e-9, 0.05)
    f = []
    for a in alphas:
        nu, _, _ = dispersion.nu_of_alpha(float(a), n=1001)
        f.append(nu - a * a)
    signs = np.sign(f)
    changes = np.sum(signs[1:] * signs[:-1] < 0)
    assert changes == 1


def test_momenta_identities(a0res):
    a0, u0sq = a0res.a0, a0res.u0sq
    mom = dispersion.momenta(a0, a0)
    xi = a0
    assert mom.M[0] == pytest.approx(1.0, abs=1e-12)
    assert mom.M[1] == pytest.approx(u0sq / 2, rel=1e-3)
    assert mom.M[2] == pytest.approx((xi**2 - 1) / 2 + xi * u0sq / 4, rel=1e-3)
    assert mom.M[3] == pytest.approx((xi**2 - 1) * u0sq / 2, rel=1e-3)
    m4 = 3 / 8 + 3 / 8 * (xi**2 - 1) ** 2 + u0sq * (5 * xi**3 - 9 * xi) / 16
    assert mom.M[4] == pytest.approx(m4, rel=1e-3)


def test_cxi_pairings(a0res):
    pair0, dpair, fsum = dispersion.cxi_pairings(a0res)
    assert abs(pair0) <= 1e-3 * a0res.u0sq
    assert dpair == pytest.approx(-a0res.d2xi_nu / 2, rel=1e-2)
    assert fsum == pytest.approx(a0res.d2xi_nu / 12, rel=1e-2)
    assert dispersion.CXI_SIGN_CONVENTION == "minus-xi"


def test_theta_second_derivative_is_2c0(a0res):
    d = 0.02
    th = [dispersion.theta("minus", 1, a0res.a0 + s * d).theta for s in (-1, 0, 1)]
    d2 = (th[0] - 2 * th[1] + th[2]) / d**2
    assert d2 == pytest.approx(2 * a0res.c0, rel=1e-2)


def test_lambda_cap(a0res):
    a0 = a0res.a0
    assert dispersion.lambda_cap(a0, 1.0, 1.0) == pytest.approx(a0 * a0, abs=1e-6)
    assert dispersion.lambda_cap(50.0, 1.0, 1.0) == pytest.approx(2.0, abs=1e-3)
    assert dispersion.lambda_cap(0.0, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        dispersion.lambda_cap(-1.0, 1.0, 1.0)


def test_c_gamma(a0res):
    cg1 = dispersion.c_gamma(1.0, n=2001)
    assert cg1 == pytest.approx(a0res.a0, abs=1e-5)
    cg2 = dispersion.c_gamma(2.0, n=2001)
    # monotone in gamma: between a0 and the Landau bound sqrt(2)
    assert a0res.a0 < cg2 < math.sqrt(2)
    cg6 = dispersion.c_gamma(6.0, n=2001)
    assert cg2 < cg6 < math.sqrt(2)


def test_variable_field_hessian(a0res):
    d2s, d2x, pref = dispersion.variable_field_hessian(1.0, 1.0, a0res.a0)
    assert d2s > 0 and d2x > 0
    assert d2s == pytest.approx(1.458391, rel=1e-3)  # frozen
    assert d2x == pytest.approx(a0res.d2xi_nu, rel=1e-6)
    assert pref == pytest.approx(math.sqrt(d2s * d2x), rel=1e-12)
    d2s0, _, _ = dispersion.variable_field_hessian(1.0, 0.0, a0res.a0)
    assert d2s0 == 0.0


def test_interior_c0():
    assert dispersion.interior_c0(np.eye(2), 1.0) == pytest.approx(1.0)
    assert dispersion.interior_c0(np.diag([4.0, 1.0]), 2.0) == pytest.approx(1.0)
    assert dispersion.interior_c0(np.diag([2.0, 2.0]), 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        dispersion.interior_c0(np.diag([1.0, -1.0]), 1.0)
    with pytest.raises(ValueError):
        dispersion.interior_c0(np.eye(2), 0.0)
