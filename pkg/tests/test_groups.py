from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qindep.groups import (
    BitPermuter,
    GroupSpec,
    InvalidInput,
    Subset,
    cosets_of,
    crt_combine,
    crt_coords,
    factor,
    from_crt_coords,
    parse_group,
    parse_subset,
    prime_subgroup,
    radical,
    totient,
)


def test_factor_and_totient_small():
    assert factor(360) == ((2, 3), (3, 2), (5, 1))
    assert [totient(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


@given(st.integers(1, 2000))
def test_totient_matches_gcd_count(n):
    assert totient(n) == sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


@given(st.integers(2, 400), st.data())
def test_crt_roundtrip(n, data):
    g = GroupSpec.cyclic(n)
    x = data.draw(st.integers(0, n - 1))
    assert from_crt_coords(g, crt_coords(g, x)) == x


def test_crt_combine():
    assert crt_combine([2, 3], [3, 5]) == 8
    assert crt_combine([0, 1, 6], [3, 5, 7]) == 6


def test_parse_and_format_roundtrip():
    E = parse_subset("15:5,10,3")
    assert E.elements == (3, 5, 10)
    assert str(E) == "15:3,5,10"
    L = parse_subset("3x5:(0,1),(2,4)")
    assert L.group == GroupSpec.lattice(3, 5)
    assert str(parse_subset(str(L))) == str(L)
    assert parse_group("Z_12") == GroupSpec.cyclic(12)


@pytest.mark.parametrize("bad", ["15", "15:16", "15:a", "3x5:(0,9)", "3x5:(0,1)junk"])
def test_parse_rejects(bad):
    with pytest.raises(InvalidInput):
        parse_subset(bad)


def test_radical_and_cosets():
    g = GroupSpec.cyclic(12)
    r, sub = radical(g)
    assert r == 6 and sub.elements == (0, 2, 4, 6, 8, 10)
    cos = cosets_of(g, prime_subgroup(g, 3))
    assert sorted(c.elements for c in cos) == [(0, 4, 8), (1, 5, 9), (2, 6, 10), (3, 7, 11)]


def test_contains_coset():
    g = GroupSpec.cyclic(15)
    assert Subset.of(g, [0, 5, 10, 1]).contains_coset() is not None
    assert Subset.of(g, [0, 1, 2]).contains_coset() is None


@given(st.lists(st.integers(0, 40), unique=True, min_size=41, max_size=41), st.integers(0, 2**41 - 1))
def test_bitpermuter_matches_naive(targets, mask):
    naive = 0
    for i, t in enumerate(targets):
        if mask >> i & 1:
            naive |= 1 << t
    assert BitPermuter(targets)(mask) == naive
