"""Tests for the X_0(N) topology module, pinned against orbit-counting oracles."""

import pytest

from cusp_ledger.curves import (
    CuspClass,
    cusp_count,
    curve_profile,
    elliptic_counts,
    enumerate_cusps,
    euler_phi,
    index_mu,
)
from cusp_ledger.errors import CuspLedgerError

from oracles import (
    cusp_count_by_orbits,
    cusp_data_by_orbits,
    elliptic_counts_by_fixed_points,
)


def test_cusp_count_pins():
    assert cusp_count(1) == 1
    assert cusp_count(4) == 3
    assert cusp_count(5) == 2
    assert cusp_count(11) == 2
    assert cusp_count(14) == 4
    assert cusp_count(20) == 6


def test_cusp_count_closed_form_equals_enumeration():
    for N in range(1, 400):
        assert cusp_count(N) == sum(c.count for c in enumerate_cusps(N))


def test_cusp_count_matches_orbit_oracle():
    for N in range(1, 41):
        assert cusp_count(N) == cusp_count_by_orbits(N)


def test_cusp_classes_match_orbit_oracle():
    # per denominator class: number of T-orbits = count, orbit sizes = width
    for N in range(1, 41):
        oracle = cusp_data_by_orbits(N)
        for cls in enumerate_cusps(N):
            n_orbits, sizes = oracle[cls.denominator]
            assert n_orbits == cls.count
            assert sizes == {cls.width}


def test_enumerate_cusps_prime():
    assert enumerate_cusps(5) == [CuspClass(1, 1, 5), CuspClass(5, 1, 1)]


def test_enumerate_cusps_level_four():
    assert enumerate_cusps(4) == [
        CuspClass(1, 1, 4), CuspClass(2, 1, 1), CuspClass(4, 1, 1)]


def test_widths_of_distinguished_classes():
    for N in (2, 6, 12, 36, 91):
        classes = {c.denominator: c for c in enumerate_cusps(N)}
        assert classes[1].width == N
        assert classes[N].width == 1


def test_valence_sum_is_index():
    for N in range(1, 301):
        assert sum(c.count * c.width for c in enumerate_cusps(N)) == index_mu(N)


def test_parity_lemma():
    for N in range(1, 2001):
        eps = cusp_count(N)
        if N in (1, 4):
            assert eps % 2 == 1
        else:
            assert eps % 2 == 0


def test_two_cusps_iff_prime():
    def naive_prime(n):
        return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))
    for N in range(1, 2001):
        assert (cusp_count(N) == 2) == naive_prime(N)


def test_elliptic_counts_pins():
    assert elliptic_counts(1) == (1, 1)
    assert elliptic_counts(2) == (1, 0)
    assert elliptic_counts(3) == (0, 1)
    assert elliptic_counts(4) == (0, 0)
    # fixed by the genus identity: genus(11) = 1 forces (0, 0)
    assert elliptic_counts(11) == (0, 0)


def test_elliptic_counts_match_fixed_point_oracle():
    for N in range(1, 41):
        assert elliptic_counts(N) == elliptic_counts_by_fixed_points(N)


def test_genus_pins():
    assert curve_profile(5).genus == 0
    assert curve_profile(7).genus == 0
    assert curve_profile(10).genus == 0
    assert curve_profile(11).genus == 1
    assert curve_profile(14).genus == 1
    assert curve_profile(20).genus == 1
    assert curve_profile(22).genus == 2


def test_genus_integral_nonnegative_sweep():
    for N in range(1, 501):
        assert curve_profile(N).genus >= 0


def test_profile_fields():
    p = curve_profile(20)
    assert p.index == 36
    assert p.cusp_count == 6
    assert (p.nu2, p.nu3) == (0, 0)
    assert sum(c.count * c.width for c in p.cusp_classes) == 36


def test_bad_level_rejected():
    with pytest.raises(CuspLedgerError):
        cusp_count(0)
    with pytest.raises(CuspLedgerError):
        curve_profile(-3)


def test_euler_phi_small():
    assert [euler_phi(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
