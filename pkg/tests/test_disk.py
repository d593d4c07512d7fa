import math
import warnings

import numpy as np
import pytest

from diracbag import disk
from diracbag.numerics import Grid1D


def test_radial_phi_constant_field(unit_field):
    gauge = disk.radial_phi(unit_field)
    r = np.array([0.0, 0.3, 0.7, 1.0])
    assert np.max(np.abs(gauge.phi_at(r) - (r**2 - 1) / 4)) < 1e-8
    assert gauge.phi_min == pytest.approx(-0.25, abs=1e-9)
    assert gauge.hess == pytest.approx(0.5)
    assert gauge.phi[-1] == 0.0


def test_radial_phi_quartic_field():
    field = disk.RadialField(lambda r: 4 * r**2, 1.0)
    gauge = disk.radial_phi(field)
    r = np.array([0.0, 0.5, 1.0])
    assert np.max(np.abs(gauge.phi_at(r) - (r**4 - 1) / 4)) < 1e-7
    assert np.max(np.abs(gauge.dphi_at(r) - r**3)) < 1e-7


def test_radial_field_validation():
    with pytest.raises(ValueError):
        disk.RadialField(1.0, -1.0)
    bad = disk.RadialField(lambda r: r - 0.5, 1.0)
    with pytest.raises(ValueError):
        bad.samples(np.linspace(0, 1, 11))


def test_mode_ell_sign_change_around_root(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.1, n=1001)
    e1 = disk.mode_E(spec, 0, "plus", 1)
    assert disk.mode_ell(spec, 0, "plus", 0.9 * e1, 1)[0] > 0
    assert disk.mode_ell(spec, 0, "plus", 1.1 * e1, 1)[0] < 0


def test_mode_ell_lower_bound_inequality(unit_field):
    # |ell_k(lambda)| >= lambda |E_k - lambda| holds for the discrete form
    spec = disk.DiskSpec.make(unit_field, 0.2, n=1001)
    for m, sign in ((0, "minus"), (-1, "minus"), (1, "plus")):
        for k in (1, 2):
            ek = disk.mode_E(spec, m, sign, k)
            for lam in (0.5 * ek, 0.9 * ek, 1.3 * ek, 2.0 * ek):
                ell = disk.mode_ell(spec, m, sign, lam, k)[k - 1]
                assert abs(ell) >= lam * abs(ek - lam) * (1 - 1e-9)


def test_mode_E_root_residual_and_ordering(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.2, n=1001)
    e1 = disk.mode_E(spec, 0, "minus", 1)
    e2 = disk.mode_E(spec, 0, "minus", 2)
    assert e1 < e2
    resid = disk.mode_ell(spec, 0, "minus", e1, 1)[0]
    assert abs(resid) <= 1e-8 * e1**2


def test_hardy_quotients(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.1, n=1001)
    nus = disk.hardy_nu_k(spec, 5)
    assert nus[0] == pytest.approx(1.0 / (math.exp(5.0) - 1.0), rel=1e-9)
    assert np.all(np.diff(nus) >= 0)
    # nu_1(h) e^{1/(2h)} -> 1 from above as h -> 0
    seq = []
    for h in (0.2, 0.1, 0.05):
        s = disk.DiskSpec.make(unit_field, h, n=1001)
        seq.append(disk.hardy_nu_k(s, 1)[0] * math.exp(1.0 / (2 * h)))
    assert np.all(np.diff(seq) < 0)
    assert seq[-1] == pytest.approx(1.0, abs=1e-4)


def test_dirac_spectrum_basic(disk_runs):
    run = disk_runs[0.2]
    sp = run["spectrum"]
    assert np.all(np.diff(sp.pos) >= 0)
    assert np.all(np.diff(sp.neg) >= 0)
    assert np.all(sp.pos > 0) and np.all(sp.neg > 0)
    assert len(sp.pos_provenance) == sp.pos.size
    # upper bound by the Hardy quotients, entry by entry
    assert np.all(sp.pos <= run["hardy"] + 1e-12)


def test_charge_conjugation_small(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.2, n=1001)
    fwd = disk.dirac_spectrum(spec, 3)
    rev = disk.dirac_spectrum(spec, 3, orientation=-1)
    assert np.allclose(fwd.pos, rev.neg, atol=1e-8)
    assert np.allclose(fwd.neg, rev.pos, atol=1e-8)


def test_grid_refinement_stability(unit_field):
    spec1 = disk.DiskSpec(field=unit_field, h=0.2, m_range=(-4, 4),
                          rgrid=disk._shifted_grid(1.0, 1001))
    spec2 = disk.DiskSpec(field=unit_field, h=0.2, m_range=(-4, 4),
                          rgrid=disk._shifted_grid(1.0, 2001))
    for m, sign in ((0, "minus"), (1, "plus")):
        v1 = disk.mode_E(spec1, m, sign, 1)
        v2 = disk.mode_E(spec2, m, sign, 1)
        assert abs(v1 - v2) < 4e-5


def test_mode_range_error(unit_field):
    spec = disk.DiskSpec(field=unit_field, h=0.2, m_range=(-1, 1),
                         rgrid=disk._shifted_grid(1.0, 1001))
    with pytest.raises(disk.ModeRangeError) as err:
        disk.dirac_spectrum(spec, 4)
    assert err.value.suggested[1] > 1


def test_zigzag_bounds_and_pauli_shift(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.2, n=1001)
    plus = disk.zigzag_spectrum(spec, "plus", 3)
    minus = disk.zigzag_spectrum(spec, "minus", 3)
    assert plus[0] >= 2 * 0.2 * (1 - 1e-3)
    assert np.all(minus >= -1e-12)
    # constant field: the two Pauli branches differ exactly by 2 h B
    assert np.allclose(plus - minus, 2 * 0.2, atol=1e-10)
    # zigzag Dirac spectrum is the symmetric set +-sqrt(alpha_k)
    dirac_levels = np.sqrt(minus)
    assert np.all(dirac_levels >= 0)


def test_zigzag_minus_exponentially_small(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.2, n=1001)
    a1 = disk.zigzag_spectrum(spec, "minus", 1)[0]
    # ground level tracks e^{2 phi_min / h} = e^{-2.5}
    assert a1 == pytest.approx(math.exp(-2.5), rel=0.12)


def test_oracle_against_minmax_roots(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.1, n=2001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        orc = disk.dirac_radial_direct(spec, -3, 2)
    neg = orc[orc < 0]
    pos = orc[orc > 0]
    assert neg.size and pos.size
    assert np.all(np.abs(orc) > 1e-6)  # no zero modes
    em = disk.mode_E(spec, 2, "minus", 1)  # conjugate mode -(m+1) = 2
    assert abs(em + neg[-1]) / em < 1e-6
    ep = disk.mode_E(spec, -3, "plus", 1)
    assert abs(ep - pos[0]) / ep < 1e-6


def test_oracle_mode_conjugation(unit_field):
    # spectrum negation under field flip combined with m <-> -(m+1):
    # negatives of mode m match -E_k of the flipped problem at mode -(m+1)
    spec = disk.DiskSpec.make(unit_field, 0.1, n=2001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        o1 = disk.dirac_radial_direct(spec, 1, 2)
    em = disk.mode_E(spec, -2, "minus", 1)
    assert abs(em + o1[o1 < 0][-1]) / em < 1e-5


def test_positive_branch_h_floor(unit_field):
    spec = disk.DiskSpec.make(unit_field, 0.01, n=501, m_range=(-3, 3))
    with pytest.raises(ValueError, match="supported range"):
        disk.mode_E(spec, 0, "plus", 1)
    # the negative branch stays available below the floor
    assert disk.mode_E(spec, -3, "minus", 1) > 0
