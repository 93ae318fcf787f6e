from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lebesguelab.core import DyadicRational, dyadic_enumerate
from lebesguelab.haar import (
    DyadicLocationSystem,
    ResidueHaarSystem,
    bitreverse,
    canonical_haar,
    haar_from_dyadic_locations,
    load_haar_system,
    sigma,
)

CAN = canonical_haar()
LOC = haar_from_dyadic_locations()
SYSTEMS = [
    CAN,
    LOC,
    ResidueHaarSystem([[1, 0], [3, 1, 2, 0]]),
]


def test_canonical_examples():
    assert [i for i in range(1, 12) if CAN.membership(1, 0, i)] == [1, 3, 5, 7, 9, 11]
    assert [i for i in range(1, 12) if CAN.membership(1, 1, i)] == [2, 4, 6, 8, 10]
    assert CAN.kth_member(2, 3, 4) == 16
    assert all(CAN.membership(1, 0, i) == (CAN.membership(2, 0, i) or CAN.membership(2, 1, i)) for i in range(1, 50))


def test_sigma_examples():
    assert sigma(DyadicRational(0, 0), CAN) == 1
    assert sigma("1/2", CAN) == 4
    assert sigma(Fraction(3, 4), CAN) == 16 and CAN.membership(1, 1, 16)
    with pytest.raises(ValueError):
        sigma("1", CAN)
    with pytest.raises(TypeError):
        sigma(0.5, CAN)


def test_location_examples():
    assert LOC.membership(1, 1, 1)
    assert LOC.membership(1, 0, 2)
    assert LOC.membership(2, 3, 3)


@pytest.mark.parametrize("system", SYSTEMS, ids=lambda s: s.description)
def test_partition_and_refinement(system):
    for n in range(9):
        for i in range(1, (1 << 12) + 1):
            cell = system.cell_of(n, i)
            assert 0 <= cell < 1 << n
            if n < 8:
                child = system.cell_of(n + 1, i)
                assert child // 2 == cell
    for n in range(4):
        for j in range(1 << n):
            for i in range(1, 200):
                hits = [jj for jj in range(1 << n) if system.membership(n, jj, i)]
                assert hits == [system.cell_of(n, i)]
                assert system.membership(n, j, i) == (
                    system.membership(n + 1, 2 * j, i) or system.membership(n + 1, 2 * j + 1, i)
                )


@pytest.mark.parametrize("system", SYSTEMS, ids=lambda s: s.description)
def test_members_increase_and_belong(system):
    for n in range(5):
        for j in range(1 << n):
            members = [system.kth_member(n, j, k) for k in range(1, (1 << 10) + 1)]
            assert all(a < b for a, b in zip(members, members[1:]))
            assert all(system.cell_of(n, i) == j for i in members[:64])


@pytest.mark.parametrize("system", SYSTEMS, ids=lambda s: s.description)
def test_kth_member_counts_every_member(system):
    for n in range(4):
        for j in range(1 << n):
            expected = [i for i in range(1, 300) if system.cell_of(n, i) == j]
            assert [system.kth_member(n, j, k) for k in range(1, len(expected) + 1)] == expected


def test_fast_location_path_matches_scan():
    scan = DyadicLocationSystem(dyadic_enumerate, check_prefix=256)
    for n in range(5):
        for j in range(1 << n):
            for k in range(1, 40):
                assert LOC.kth_member(n, j, k) == scan.kth_member(n, j, k)


@given(st.integers(0, 12), st.data())
def test_first_member_at_least(n, data):
    j = data.draw(st.integers(0, (1 << n) - 1))
    lower = data.draw(st.integers(1, 1 << 14))
    i = CAN.first_member_at_least(n, j, lower)
    assert i >= lower and CAN.membership(n, j, i)
    assert i - (1 << n) < lower


@given(st.integers(1, (1 << 11) - 1))
def test_sigma_floor_and_containment(k):
    d = dyadic_enumerate(k)
    assert d.level <= 11
    for system in (CAN, LOC):
        s = sigma(d, system)
        assert s >= 1 << d.level
        for m in range(d.level + 1):
            assert system.membership(m, d.cell(m), s)


def test_sigma_injective():
    values = [sigma(dyadic_enumerate(k), CAN) for k in range(1, 1 << 10)]
    assert len(set(values)) == len(values)


def test_bitreverse():
    assert [bitreverse(j, 2) for j in range(4)] == [0, 2, 1, 3]
    assert bitreverse(1, 3) == 4


def test_residue_levels_validated():
    with pytest.raises(ValueError):
        ResidueHaarSystem([[0, 0]])
    with pytest.raises(ValueError):
        ResidueHaarSystem([[0, 1], [0, 1, 2, 3]])  # 1 mod 2 is not a child of residue 0
    with pytest.raises(ValueError):
        ResidueHaarSystem([[0, 1, 2]])


def test_location_map_validated():
    with pytest.raises(ValueError):
        DyadicLocationSystem(lambda i: DyadicRational(1, 1))
    with pytest.raises(ValueError):
        DyadicLocationSystem({1: DyadicRational(1, 1), 2: DyadicRational(0, 0)})


def test_load_round_trip():
    for system in SYSTEMS:
        again = load_haar_system(system.to_json())
        assert all(again.cell_of(5, i) == system.cell_of(5, i) for i in range(1, 300))
    with pytest.raises(ValueError):
        load_haar_system({"kind": "nope"})
    with pytest.raises(ValueError):
        load_haar_system({"kind": "residue"})
