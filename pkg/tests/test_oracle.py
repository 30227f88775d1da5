import numpy as np
import pytest

from qindep.groups import GroupSpec, Subset
from qindep.oracle import (
    OracleRefused,
    oracle_is_quasi_independent,
    oracle_qi_table,
)

# [DERIVED] frozen from the meet-in-the-middle table oracle (empty set included)
QI_COUNTS = {2: 3, 3: 7, 4: 9, 5: 31, 6: 19, 7: 127, 8: 81, 9: 343, 10: 211, 11: 2047, 12: 361,
             13: 8191, 14: 2059, 15: 14221, 16: 6561, 17: 131071, 18: 6859, 19: 524287, 20: 44521,
             21: 778765, 22: 175099, 23: 8388607, 24: 130321}
Z15_BY_SIZE = {4: 1305, 5: 2670, 6: 3870, 7: 3780, 8: 2025}


def brute_qi(g, els):
    """Direct enumeration of all 3^k sign vectors with complex evaluation."""
    import itertools
    import cmath

    z = [cmath.exp(2j * cmath.pi * x / g.n) for x in els]
    for signs in itertools.product((-1, 0, 1), repeat=len(els)):
        if any(signs) and abs(sum(s * w for s, w in zip(signs, z))) < 1e-9:
            return False
    return True


@pytest.mark.parametrize("n", range(2, 17))
def test_counts(n):
    assert int(oracle_qi_table(GroupSpec.cyclic(n)).sum()) == QI_COUNTS[n]


@pytest.mark.slow
@pytest.mark.parametrize("n", range(17, 25))
def test_counts_large(n):
    assert int(oracle_qi_table(GroupSpec.cyclic(n)).sum()) == QI_COUNTS[n]


def test_prime_counts_are_all_but_full():
    # for prime p only the full group is non-QI
    for p in (2, 3, 5, 7, 11, 13):
        assert QI_COUNTS[p] == 2 ** p - 1


def test_z15_size_profile():
    t = oracle_qi_table(GroupSpec.cyclic(15))
    sizes = np.array([bin(m).count("1") for m in range(1 << 15)])
    for k, c in Z15_BY_SIZE.items():
        assert int(t[sizes == k].sum()) == c
    assert not t[sizes == 9].any()


@pytest.mark.parametrize("n", [6, 9, 10, 12])
def test_table_matches_complex_brute_force(n):
    g = GroupSpec.cyclic(n)
    t = oracle_qi_table(g)
    for m in range(1 << n):
        if bin(m).count("1") <= 7:
            els = [x for x in range(n) if m >> x & 1]
            assert bool(t[m]) == brute_qi(g, els)


def test_pointwise_oracle_matches_table():
    g = GroupSpec.cyclic(18)
    t = oracle_qi_table(g)
    rng = np.random.default_rng(0)
    for m in rng.integers(0, 1 << 18, 300):
        E = Subset.from_mask(g, int(m))
        if len(E) <= 14:
            assert oracle_is_quasi_independent(E) == bool(t[int(m)])


def test_lattice_oracle():
    g = GroupSpec.lattice(3, 5)
    line = Subset.of(g, [g.index((i, 0)) for i in range(3)])
    assert not oracle_is_quasi_independent(line)
    assert oracle_is_quasi_independent(Subset.of(g, line.elements[:2]))


def test_caps():
    with pytest.raises(OracleRefused):
        oracle_is_quasi_independent(Subset.of(GroupSpec.cyclic(40), range(20)))
    with pytest.raises(OracleRefused):
        oracle_qi_table(GroupSpec.cyclic(25))
