"""Unit tests for orbit certificates, addresses, and backward solving."""

import math

import pytest

from tractlab import orbits
from tractlab.errors import AddressMismatch, AddressUndefined, RangeError
from tractlab.models import KappaFamilyMember, LogLiftModel, eval_F

SHIFTED = LogLiftModel("shifted_exp", R=10.0)
Q = 2.0

# backward-iteration fixed/periodic points, frozen from an independent
# high-precision solve of z = log(z + 10) + 2*pi*i*k
FIXED_K0 = 2.52796320198217
FIXED_K1 = 2.66462898439789 + 6.77436493294247j
PERIOD2_01 = 2.64195115873685 + 0.466912455837032j


def test_iterate_saturates_on_fast_escape():
    rec = orbits.iterate(SHIFTED, 4.0 + 0.0j, 10, Q)
    assert rec.escape_flag is orbits.EscapeFlag.STAYED_IN_JQ
    assert rec.certified and rec.saturated
    assert rec.points[1] == pytest.approx(math.e**4 - 10.0)


def test_iterate_detects_domain_exit():
    rec = orbits.iterate(SHIFTED, 1.0 + 3.0j, 10, Q)
    assert rec.escape_flag is orbits.EscapeFlag.LEFT_DOMAIN
    assert rec.exit_step == 0
    assert not rec.certified


def test_iterate_requires_positive_horizon():
    with pytest.raises(RangeError):
        orbits.iterate(SHIFTED, 4.0 + 0.0j, 0, Q)


def test_point_with_address_matches_frozen_values():
    z0 = orbits.point_with_address(SHIFTED, orbits.ExternalAddress.periodic([0]), Q)
    assert abs(z0 - FIXED_K0) < 1e-11
    z1 = orbits.point_with_address(SHIFTED, orbits.ExternalAddress.periodic([1]), Q)
    assert abs(z1 - FIXED_K1) < 1e-11
    z2 = orbits.point_with_address(
        SHIFTED, orbits.ExternalAddress.periodic([0, 1]), Q
    )
    assert abs(z2 - PERIOD2_01) < 1e-11
    assert abs(eval_F(SHIFTED, z0) - z0) < 1e-10


def test_external_address_reads_back_itinerary():
    z = orbits.point_with_address(
        SHIFTED, orbits.ExternalAddress.periodic([0, 1, -2]), Q
    )
    got = orbits.external_address(SHIFTED, z, 6)
    assert [t.branch_index for t in got.entries] == [0, 1, -2, 0, 1, -2]


def test_external_address_undefined_past_saturation():
    with pytest.raises(AddressUndefined):
        orbits.external_address(SHIFTED, 4.0 + 0.0j, 8)


def test_expansion_ratios_equal_points_and_mismatch():
    z = orbits.point_with_address(SHIFTED, orbits.ExternalAddress.periodic([0]), Q)
    assert orbits.expansion_ratios(SHIFTED, z, z, 4) == [1.0] * 5
    with pytest.raises(AddressMismatch):
        orbits.expansion_ratios(SHIFTED, z, z + 2.0 * math.pi * 1j, 3)


def test_expansion_ratios_doubling_lower_bound():
    z = orbits.point_with_address(SHIFTED, orbits.ExternalAddress.periodic([1]), Q)
    ratios = orbits.expansion_ratios(SHIFTED, z, z + 1e-9, 6)
    assert all(r >= 1.0 - 1e-9 for r in ratios)


def test_periodic_orbit_cycles_and_is_consistent():
    addr = orbits.ExternalAddress.periodic([0, 1, -1])
    orb = orbits.periodic_orbit(SHIFTED, addr, Q, 10)
    assert len(orb) == 10
    assert orb[3] == orb[0] and orb[4] == orb[1]
    for a, b in zip(orb, orb[1:]):
        assert abs(eval_F(SHIFTED, a) - b) <= 1e-8 * (1.0 + abs(b))


def test_periodic_orbit_high_branch_cycle_closes():
    # forward evaluation would amplify the solver tolerance by the cycle
    # derivative product (~1e10 here); per-point rotated solves must not
    addr = orbits.ExternalAddress.periodic([372, 395, 227])
    orb = orbits.periodic_orbit(SHIFTED, addr, Q, 4)
    for a, b in zip(orb, orb[1:]):
        assert abs(eval_F(SHIFTED, a) - b) <= 1e-6 * (1.0 + abs(b))


def test_periodic_orbit_on_kappa_member():
    member = KappaFamilyMember(SHIFTED, 0.3 + 0.2j)
    addr = orbits.ExternalAddress.periodic([0, 1])
    orb = orbits.periodic_orbit(member, addr, Q, 4)
    for a, b in zip(orb, orb[1:]):
        assert abs(eval_F(member, a) - b) <= 1e-8 * (1.0 + abs(b))


def test_address_container_protocol():
    addr = orbits.ExternalAddress.periodic([2, -1])
    assert len(addr) == 2
    assert addr[0].branch_index == 2
    with pytest.raises(RangeError):
        orbits.point_with_address(SHIFTED, orbits.ExternalAddress(()), Q)
    with pytest.raises(RangeError):
        orbits.periodic_orbit(SHIFTED, addr, Q, 0)
