import cmath
import math

import numpy as np
import pytest

from diracbag import constants as ck


def closed_form_ck(k: int, b0: float, R: float) -> float:
    return b0**k / math.factorial(k - 1) * (R**2 / 2) ** (k - 1) * R


def test_bargmann_isotropic_closed_form():
    for b0 in (1.0, 2.0):
        w = ck.BargmannWeight.isotropic(b0)
        for k in (1, 2, 3, 4):
            d2 = ck.bargmann_distance(k, w) ** 2
            expected = 2 * math.pi * 2 ** (k - 1) * math.factorial(k - 1) / b0**k
            assert d2 == pytest.approx(expected, rel=1e-12)


def test_bargmann_anisotropic_against_quadrature():
    # brute-force 2D Gaussian quadrature oracle for hess = diag(1, 2), k = 2
    hess = np.diag([1.0, 2.0])
    w = ck.BargmannWeight(hess)
    val = ck.bargmann_distance(2, w) ** 2

    n = 1201
    L = 7.0
    y = np.linspace(-L, L, n)
    yy1, yy2 = np.meshgrid(y, y, indexing="ij")
    weight = np.exp(-(yy1**2) - 2.0 * yy2**2)
    z = yy1 + 1j * yy2
    dx = (2 * L / (n - 1)) ** 2

    def inner(f, g):
        return np.sum(np.conj(f) * g * weight) * dx

    g00 = inner(np.ones_like(z), np.ones_like(z)).real
    g01 = inner(np.ones_like(z), z)
    g11 = inner(z, z).real
    oracle = g11 - abs(g01) ** 2 / g00
    assert val == pytest.approx(oracle, rel=1e-6)


def test_bargmann_rotation_invariance():
    base = np.diag([1.0, 3.0])
    ref = ck.bargmann_distance(3, ck.BargmannWeight(base))
    for angle in (0.3, 1.1, 2.5):
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        val = ck.bargmann_distance(3, ck.BargmannWeight(rot @ base @ rot.T))
        assert val == pytest.approx(ref, rel=1e-10)


def test_bargmann_errors():
    w = ck.BargmannWeight.isotropic(1.0)
    with pytest.raises(ValueError):
        ck.bargmann_distance(0, w)
    with pytest.raises(ValueError):
        ck.bargmann_distance(13, w)
    with pytest.raises(ValueError):
        ck.BargmannWeight(np.diag([1.0, -1.0]))


def test_hardy_disk_closed_form():
    for R in (1.0, 2.0):
        curve = ck.BoundaryCurve.circle(R)
        for k in (1, 2, 3, 4):
            d2 = ck.hardy_distance(k, curve) ** 2
            assert d2 == pytest.approx(2 * math.pi * R ** (2 * k - 1), rel=1e-10)


def test_hardy_shifted_center_converges():
    curve = ck.BoundaryCurve.circle(1.0, z_min=0.2)
    val = ck.hardy_distance(2, curve, n_basis=48, check=True)
    assert math.isfinite(val) and val > 0
    # truncation already converged: enlarging the basis does not move it
    val2 = ck.hardy_distance(2, curve, n_basis=64, check=False)
    assert val == pytest.approx(val2, rel=1e-8)


def test_hardy_rotation_invariance():
    base = ck.BoundaryCurve.circle(1.0, z_min=0.1)
    ref = ck.hardy_distance(2, base)
    for angle in (0.5, 1.7, 3.0):
        rot = cmath.exp(1j * angle)
        curve = ck.BoundaryCurve(
            points=base.z_min + rot * (base.points - base.z_min),
            weights=base.weights,
            z_min=base.z_min,
        )
        assert ck.hardy_distance(2, curve) == pytest.approx(ref, rel=1e-9)


def test_hardy_basis_validation():
    curve = ck.BoundaryCurve.circle(1.0)
    with pytest.raises(ValueError):
        ck.hardy_distance(2, curve, n_basis=6)


def test_ck_disk_values():
    cases = [
        (1.0, 1.0, 1, 1.0),
        (1.0, 1.0, 2, 0.5),
        (2.0, 1.0, 1, 2.0),
        (1.0, 2.0, 1, 2.0),
        (1.0, 2.0, 2, 4.0),
    ]
    for b0, R, k, expected in cases:
        res = ck.ck_constant(k, ck.BargmannWeight.isotropic(b0),
                             ck.BoundaryCurve.circle(R))
        assert res.Ck == pytest.approx(expected, rel=1e-9)
        assert res.Ck == pytest.approx((res.dist_H / res.dist_B) ** 2, rel=1e-12)


def test_ck_radius_scaling():
    w = ck.BargmannWeight.isotropic(1.0)
    for k in (1, 2, 3):
        c1 = ck.ck_constant(k, w, ck.BoundaryCurve.circle(1.0)).Ck
        c2 = ck.ck_constant(k, w, ck.BoundaryCurve.circle(2.0)).Ck
        assert c2 / c1 == pytest.approx(2 ** (2 * k - 1), rel=1e-9)


def test_lambda_plus_prediction():
    res = ck.CkResult(k=1, dist_H=1.0, dist_B=1.0, Ck=1.0)
    val = ck.lambda_plus_prediction(res, -0.25, 0.1)
    assert val == pytest.approx(math.exp(-5.0), rel=1e-14)
    res2 = ck.CkResult(k=2, dist_H=1.0, dist_B=math.sqrt(2.0), Ck=0.5)
    val2 = ck.lambda_plus_prediction(res2, -0.25, 0.1)
    assert val2 == pytest.approx(0.5 * 10.0 * math.exp(-5.0), rel=1e-14)
    # h -> infinity: the exponential factor tends to 1
    big = ck.lambda_plus_prediction(res, -0.25, 1e9)
    assert big == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(ValueError):
        ck.lambda_plus_prediction(res, -0.25, 0.0)
