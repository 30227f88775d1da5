import pytest

from qindep.datasets import (
    CYCLIC_SEEDS,
    decode_number,
    readings_369,
    verify_dataset,
)
from qindep.groups import GroupSpec, InvalidInput, Subset
from qindep.relations import coset_reduction_test, linear_algebra_test


def test_decode_is_bijection():
    assert len({decode_number(k) for k in range(1, 163)}) == 162
    with pytest.raises(InvalidInput):
        decode_number(163)


def test_readings_sizes():
    r = readings_369()
    assert [len(set(v)) for v in r.values()] == [85, 84, 85]


def test_verify_reports_which_reading():
    rep = verify_dataset("lattice-3x6x9-85")
    assert rep.ok
    assert [r.name for r in rep.verified] == ["lexicographic listing"]
    by = {r.name: r for r in rep.readings}
    assert by["by-layers, layer 8 as printed (with 1)"].verdict.quasi_independent is False
    assert by["by-layers, layer 8 without the trailing 1"].cardinality == 84
    assert "verified by: lexicographic listing" in rep.summary()


def test_unknown_dataset():
    with pytest.raises(InvalidInput):
        verify_dataset("nope")


def test_cyclic_seed_two_routes():
    g = GroupSpec.cyclic(105)
    E = Subset.of(g, CYCLIC_SEEDS[105])
    assert len(E) == 52
    a = coset_reduction_test(E, d_cap=60, node_cap=50_000_000)
    b = linear_algebra_test(E, d_cap=60, node_cap=50_000_000)
    assert a.quasi_independent is True and b.quasi_independent is True
