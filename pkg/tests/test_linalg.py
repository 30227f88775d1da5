from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st

from qindep.linalg import find_signed_vector, in_row_space, nullspace, rank, restricted_kernel

matrices = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=1, max_size=6))


@given(matrices)
def test_rank_matches_sympy(rows):
    assert rank(rows) == sympy.Matrix(rows).rank()


@given(matrices)
def test_nullspace_is_kernel_of_full_dimension(rows):
    n = len(rows[0])
    basis = nullspace(rows, n)
    assert len(basis) == n - sympy.Matrix(rows).rank()
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


def test_in_row_space():
    assert in_row_space([[1, 2, 3]], [2, 4, 6])
    assert not in_row_space([[1, 2, 3]], [1, 0, 0])


def test_signed_vector_found_and_absent():
    # kernel of [1 1 1] restricted to all columns contains (1,-1,0)
    ker = restricted_kernel([[1, 1, 1]], [0, 1, 2])
    v, _ = find_signed_vector(ker)
    assert v is not None and set(v) <= {-1, 0, 1} and sum(v) == 0 and any(v)
    # kernel spanned by (2,-1): no {0,+-1} vector
    ker = restricted_kernel([[1, 2]], [0, 1])
    v, _ = find_signed_vector(ker)
    assert v is None


@given(st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=1, max_size=3))
def test_signed_search_agrees_with_brute_force(rows):
    import itertools

    ker = restricted_kernel(rows, list(range(5)))
    v, _ = find_signed_vector(ker)
    brute = [c for c in itertools.product((-1, 0, 1), repeat=5)
             if any(c) and all(sum(a * b for a, b in zip(r, c)) == 0 for r in rows)]
    assert (v is not None) == bool(brute)
    if v is not None:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
