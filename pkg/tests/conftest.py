import pytest

from diracbag import disk, dispersion


@pytest.fixture(scope="session")
def a0res():
    """Gap constant and derived data on the reference grid."""
    return dispersion.find_a0(4001)


@pytest.fixture(scope="session")
def unit_field():
    return disk.RadialField(1.0, 1.0)


@pytest.fixture(scope="session")
def disk_runs(unit_field):
    """Direct disk spectra (count 5, both signs) and Hardy bounds per h."""
    out = {}
    for h in (0.2, 0.1, 0.05):
        spec = disk.DiskSpec.make(unit_field, h, n=2001)
        out[h] = {
            "spec": spec,
            "spectrum": disk.dirac_spectrum(spec, 5),
            "hardy": disk.hardy_nu_k(spec, 5),
        }
    return out
