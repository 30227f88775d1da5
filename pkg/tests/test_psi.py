import json

import pytest

from qindep.groups import GroupSpec, InvalidInput, Subset
from qindep.psi import (
    Budget,
    ExtensionPlan,
    PsiEntry,
    PsiTable,
    corollary_bound,
    direct_search,
    extend,
    lattice_transfer_231,
    monotonicity_bounds,
    phi_witness,
    psi,
    three_prime_bound,
    validate_extension,
)
from qindep.relations import is_quasi_independent

# [DERIVED] maximum QI subset sizes from the sign-vector oracle tables (n <= 24)
ORACLE_PSI = {2: 1, 3: 2, 4: 2, 5: 4, 6: 2, 7: 6, 8: 4, 9: 6, 10: 4, 11: 10, 12: 4, 13: 12, 14: 6,
              15: 8, 16: 8, 17: 16, 18: 6, 19: 18, 20: 8, 21: 12, 22: 10, 23: 22, 24: 8}


@pytest.mark.parametrize("n", sorted(ORACLE_PSI))
def test_psi_matches_oracle(n):
    e = psi(n)
    assert e.exact and e.value == ORACLE_PSI[n]
    assert is_quasi_independent(e.witness).quasi_independent and len(e.witness) == e.value


@pytest.mark.parametrize("n", [4, 6, 9, 10, 12, 14, 15, 18])
def test_direct_search_matches_oracle(n):
    e = psi(n, use_identities=False)
    assert e.exact and e.value == ORACLE_PSI[n]


def test_phi_witness_is_qi():
    for n in (9, 12, 25, 30):
        w = phi_witness(GroupSpec.cyclic(n))
        assert len(w) == GroupSpec.cyclic(n).phi and is_quasi_independent(w).quasi_independent
    L = phi_witness(GroupSpec.lattice(3, 6, 9))
    assert len(L) == 2 * 5 * 8 and is_quasi_independent(L, d_cap=40).quasi_independent


def test_identity_provenance():
    assert psi(27).provenance == "identity(phi-prime-power)"
    assert psi(45).provenance == "identity(radical-multiplier)" and psi(45).value == 3 * psi(15).value
    assert psi(42).provenance == "identity(strip-two)" and psi(42).value == psi(21).value


def test_budget_exhaustion_gives_lower_bound():
    e = psi(GroupSpec.cyclic(35), Budget(node_cap=1))
    assert e.status in ("lower-bound", "exact") and e.value >= 24
    r = direct_search(GroupSpec.cyclic(21), None, Budget(node_cap=3))
    assert not r.exhausted


def test_psi_105_default_and_long_run():
    e = psi(105)
    assert e.value == 52 and e.status == "lower-bound"
    assert is_quasi_independent(e.witness).quasi_independent
    exact = psi(105, Budget(long_run=True))
    assert exact.exact and exact.value == 52


def test_extension_plan_validation():
    with pytest.raises(InvalidInput):
        validate_extension(15, 2, 4)
    with pytest.raises(InvalidInput):
        validate_extension(15, 1, 5)
    with pytest.raises(InvalidInput):
        validate_extension(18, 1, 5)
    plan = ExtensionPlan.build(15, 2, 7)
    assert plan.m == 3 and plan.p_s == 5 and plan.target == GroupSpec.cyclic(21)


def test_extend_sizes():
    E = psi(15).witness
    R = extend(E, ExtensionPlan.build(15, 2, 11))
    assert len(R) == len(E) + (11 - 5) * psi(3).value
    assert is_quasi_independent(R).quasi_independent


def test_monotonicity_bounds_165_195():
    for q, target in ((11, 84), (13, 100)):
        bounds = monotonicity_bounds(105, 3, q)
        delta = [b for b in bounds if "delta" in b.rule][0]
        assert delta.value == target and delta.verified and len(delta.witness) >= target


def test_corollary_and_three_prime():
    b = corollary_bound(15, 7)
    assert b.value == 6 * 8 and b.verified
    assert three_prime_bound(105).value == 52
    assert three_prime_bound(15) is None


def test_lattice_transfer_231():
    e = lattice_transfer_231()
    assert e.group == GroupSpec.cyclic(231)
    assert e.value == GroupSpec.cyclic(231).phi + 5
    assert e.status in ("lower-bound", "claimed")
    if e.status == "lower-bound":
        assert is_quasi_independent(e.witness, d_cap=40).quasi_independent


def test_table_never_downgrades(tmp_path):
    t = PsiTable()
    g = GroupSpec.cyclic(15)
    exact = psi(15)
    assert t.insert(exact)
    assert not t.insert(PsiEntry(g, 8, "lower-bound", exact.witness, "test"))
    with pytest.raises(AssertionError):
        t.insert(PsiEntry(g, 7, "exact", Subset.of(g, exact.witness.elements[:7]), "test"))
    path = tmp_path / "t.json"
    t.save(path)
    data = json.loads(path.read_text())
    assert data["entries"][0]["group"] == "15"
    assert PsiTable.load(path).get(g).value == 8


def test_table_rejects_bad_witness(tmp_path):
    g = GroupSpec.cyclic(15)
    path = tmp_path / "bad.json"
    bad = PsiEntry(g, 3, "lower-bound", Subset.of(g, [0, 5, 10]), "tampered")
    path.write_text(json.dumps({"entries": [bad.to_json()]}))
    with pytest.raises(AssertionError):
        PsiTable.load(path)


@pytest.mark.parametrize("n,s,q", [(15, 1, 7), (15, 1, 11), (15, 1, 13), (15, 2, 7), (15, 2, 11), (15, 2, 13),
                                   (21, 1, 5), (21, 1, 11), (21, 1, 13), (21, 2, 11), (21, 2, 13)])
def test_extension_soundness_all_plans(n, s, q):
    import random

    from qindep.layercover import layer_criterion
    from qindep.relations import qi_flag

    g = GroupSpec.cyclic(n)
    plan = ExtensionPlan.build(n, s, q)
    rng = random.Random(n * q + s)
    done = 0
    while done < 100:
        E = Subset.of(g, rng.sample(range(n), rng.randint(1, g.phi)))
        if not qi_flag(g, E.mask):
            continue
        done += 1
        R = extend(E, plan)
        assert len(R) == len(E) + (q - plan.p_s) * psi(plan.m).value
        assert layer_criterion(R, plan.m) is True
