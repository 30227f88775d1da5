import sympy
from hypothesis import given
from hypothesis import strategies as st

from qindep.cyclotomic import cyclotomic_is_relation, cyclotomic_poly
from qindep.groups import GroupSpec


def test_cyclotomic_poly_matches_sympy():
    x = sympy.Symbol("x")
    for n in range(1, 61):
        expected = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
        assert list(cyclotomic_poly(n)) == [int(c) for c in expected]


def test_coset_indicators_vanish():
    g = GroupSpec.cyclic(15)
    assert cyclotomic_is_relation(g, {0: 1, 5: 1, 10: 1})
    assert cyclotomic_is_relation(g, {5: 1, 10: 1, 3: -1, 6: -1, 9: -1, 12: -1})
    assert not cyclotomic_is_relation(g, {0: 1, 1: 1})


@given(st.integers(2, 40), st.data())
def test_relation_matches_complex_evaluation(n, data):
    import cmath

    coeffs = data.draw(st.dictionaries(st.integers(0, n - 1), st.integers(-2, 2), max_size=n))
    z = sum(c * cmath.exp(2j * cmath.pi * x / n) for x, c in coeffs.items())
    exact = cyclotomic_is_relation(GroupSpec.cyclic(n), coeffs)
    if exact:
        assert abs(z) < 1e-9
    elif abs(z) < 1e-9:  # numerical zero must be a true relation
        raise AssertionError("numerically vanishing sum rejected")
