import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qindep.groups import GroupSpec, Subset
from qindep.permutations import (
    InvalidFactor,
    Perm,
    PermFactorization,
    classify,
    compose,
    coordinate_product,
    is_coset_structured,
    make_affine,
    make_type1,
    make_type2,
    make_type3,
    make_type4,
    preserves_qi,
    random_perm,
)
from qindep.relations import qi_flag

Z15 = GroupSpec.cyclic(15)


def test_perm_algebra():
    a = make_affine(Z15, 2, 1)
    assert (a @ a.inverse()).is_identity()
    assert compose(a, a.inverse(), a) == a
    assert Perm.from_text(a.to_text()) == a


def test_affine_needs_unit():
    with pytest.raises(InvalidFactor):
        make_affine(Z15, 3)


def test_type1_respects_cosets():
    g = GroupSpec.cyclic(36)  # axis 0 is Z_4, axis 1 is Z_9
    make_type1(g, 1, [3, 4, 5, 6, 7, 8, 0, 1, 2])
    with pytest.raises(InvalidFactor):
        make_type1(g, 1, [1, 0, 2, 3, 4, 5, 6, 7, 8])


def test_type2_needs_even():
    with pytest.raises(InvalidFactor):
        make_type2(Z15, [0])
    s = make_type2(GroupSpec.cyclic(10), [1, 3])
    assert s(1) == 6 and s(6) == 1 and s(0) == 0


def test_transposition_breaks_qi():
    images = list(range(15))
    images[1], images[2] = 2, 1
    s = Perm(Z15, tuple(images))
    rep = preserves_qi(s, "exhaustive")
    assert not rep.preserves and rep.conclusive
    E = rep.counterexample
    assert qi_flag(Z15, E.mask) != qi_flag(Z15, s.image(E).mask)
    assert classify(s) is None and not is_coset_structured(s)


@pytest.mark.parametrize("n", [4, 8, 9, 12, 18, 20])
def test_structured_types_preserve(n):
    g = GroupSpec.cyclic(n)
    rng = random.Random(n)
    step = n // g.radical
    perms = [make_affine(g, u, rng.randrange(n)) for u in (1, n - 1)]
    if step > 1:
        sig = list(range(step))
        rng.shuffle(sig)
        perms.append(make_type3(g, sig))
    if n % 2 == 0:
        perms.append(make_type2(g, rng.sample(range(n // 2), 2)))
    for s in perms:
        assert preserves_qi(s, "exhaustive").preserves
        f = classify(s)
        assert f is not None and f.compose() == s


def test_type4_on_radical_subgroup():
    g = GroupSpec.cyclic(12)  # radical 6, step 2
    s = make_type4(g, [1, 0, 5, 2, 3, 4], check=False)
    local = Perm(GroupSpec.cyclic(6), (1, 0, 5, 2, 3, 4))
    assert preserves_qi(s, "exhaustive").preserves == preserves_qi(local, "exhaustive").preserves


@pytest.mark.parametrize("n", [6, 8, 9, 10, 12, 14, 15, 18, 20])
def test_classify_matches_exhaustive_on_random(n):
    g = GroupSpec.cyclic(n)
    rng = random.Random(100 + n)
    for _ in range(30):
        s = random_perm(g, rng)
        f = classify(s)
        assert (f is not None) == preserves_qi(s, "exhaustive").preserves
        if f is not None:
            assert f.compose() == s


def test_factorization_json_roundtrip():
    s = coordinate_product(Z15, ((1, 2, 0), (0, 2, 4, 1, 3)))
    f = classify(s)
    assert PermFactorization.from_json(f.to_json()).compose() == s


@given(st.permutations(range(3)), st.permutations(range(5)), st.integers(0, 14))
def test_coordinate_products_with_translation_classify(a, b, t):
    s = make_affine(Z15, 1, t) @ coordinate_product(Z15, (tuple(a), tuple(b)))
    f = classify(s)
    assert f is not None and f.compose() == s


@given(st.lists(st.integers(0, 14), unique=True, max_size=9), st.permutations(range(3)), st.permutations(range(5)))
def test_products_preserve_qi_pointwise(els, a, b):
    s = coordinate_product(Z15, (tuple(a), tuple(b)))
    E = Subset.of(Z15, els)
    assert qi_flag(Z15, E.mask) == qi_flag(Z15, s.image(E).mask)


def test_battery_mode_finds_counterexample_on_larger_group():
    g = GroupSpec.cyclic(30)
    images = list(range(30))
    images[1], images[2] = 2, 1
    rep = preserves_qi(Perm(g, tuple(images)), "battery", samples=500)
    assert not rep.preserves and not rep.conclusive or not rep.preserves
    assert rep.counterexample is not None


def test_all_720_products_are_products():
    # the coordinate-product group of Z_15 has 3! * 5! elements
    seen = {coordinate_product(Z15, (a, b)).images
            for a in itertools.permutations(range(3)) for b in itertools.permutations(range(5))}
    assert len(seen) == 720
