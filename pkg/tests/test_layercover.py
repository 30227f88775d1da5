import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qindep.groups import GroupSpec, Subset, Unsupported
from qindep.layercover import layer_cover_search, layer_criterion
from qindep.relations import is_quasi_independent, qi_flag


@pytest.mark.parametrize("m,q,psi_value", [(3, 5, 8), (3, 7, 12), (5, 7, 24), (3, 11, 20), (5, 3, 8)])
def test_two_prime_values(m, q, psi_value):
    hit = layer_cover_search(m, q, psi_value)
    assert hit.feasible and len(hit.witness) == psi_value
    assert layer_cover_search(m, q, psi_value + 1).feasible is False


@pytest.mark.parametrize("m,q", [(3, 5), (3, 7), (5, 3), (7, 3), (5, 7)])
def test_pruning_does_not_change_answers(m, q):
    phi = (m - 1) * (q - 1)
    for t in range(phi - 1, phi + 3):
        assert layer_cover_search(m, q, t).feasible == layer_cover_search(m, q, t, prune=False).feasible


@given(st.lists(st.integers(0, 34), unique=True, max_size=30))
def test_layer_criterion_matches_tester_z35(els):
    E = Subset.of(GroupSpec.cyclic(35), els)
    assert layer_criterion(E, 5) == qi_flag(E.group, E.mask)
    assert layer_criterion(E, 7) == qi_flag(E.group, E.mask)


def test_layer_criterion_matches_tester_z105():
    g = GroupSpec.cyclic(105)
    rng = random.Random(5)
    for _ in range(200):
        E = Subset.of(g, rng.sample(range(105), rng.randint(20, 60)))
        assert layer_criterion(E, 15) == qi_flag(g, E.mask)


def test_105_no_53():
    r = layer_cover_search(15, 7, 53)
    assert r.feasible is False
    assert r.patterns == [(7, 7, 7)]


def test_time_cap_reports_undecided():
    r = layer_cover_search(15, 7, 52, time_cap=0.0)
    assert r.feasible is None or (r.feasible and is_quasi_independent(r.witness).quasi_independent)


def test_unsupported_splits():
    with pytest.raises(Unsupported):
        layer_cover_search(21, 11, 125)
