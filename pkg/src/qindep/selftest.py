"""Built-in consistency suites: oracle equivalence, Psi identities, permutations."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .groups import GroupSpec, Subset
from .oracle import oracle_qi_table
from .permutations import classify, coordinate_product, preserves_qi, random_perm
from .psi import Budget, psi
from .relations import coset_reduction_test, is_quasi_independent, qi_flag


class Check(NamedTuple):
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class SelftestReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def summary(self) -> str:
        lines = [f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.detail}" for c in self.checks]
        lines.append("selftest " + ("passed" if self.ok else "FAILED"))
        return "\n".join(lines)


def _oracle_suite(max_n: int, max_size: int) -> Check:
    mismatches = 0
    checked = 0
    for n in range(3, max_n + 1):
        g = GroupSpec.cyclic(n)
        table = oracle_qi_table(g)
        sizes = np.array([bin(m).count("1") for m in range(1 << n)])
        for mask in np.nonzero(sizes <= max_size)[0]:
            mask = int(mask)
            checked += 1
            if qi_flag(g, mask) != bool(table[mask]):
                mismatches += 1
        # the witness-producing routes on a sample
        rng = random.Random(n)
        for _ in range(40):
            E = Subset.of(g, rng.sample(range(n), rng.randint(1, min(n, max_size))))
            exp = bool(table[E.mask])
            if is_quasi_independent(E).quasi_independent != exp or coset_reduction_test(E).quasi_independent != exp:
                mismatches += 1
    return Check("oracle equivalence", mismatches == 0,
                 f"n<= {max_n}, |E|<= {max_size}: {checked} masks, {mismatches} mismatches")


def _identity_suite(quick: bool) -> Check:
    bad = []
    budget = Budget()
    for q in (3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27):
        e = psi(q, budget)
        if not (e.exact and e.value == GroupSpec.cyclic(q).phi):
            bad.append(f"Psi({q})")
    limit = 15 if quick else 30
    for n in range(2, limit + 1):
        g = GroupSpec.cyclic(n)
        if n > 24 and not (n % 2 == 0 or any(e > 1 for _, e in g.factorization)):
            continue
        a = psi(g, budget)
        b = psi(g, budget, use_identities=False)
        if not (a.exact and b.exact and a.value == b.value):
            bad.append(f"Psi({n}): {a.value} vs search {b.value}")
    return Check("Psi identities", not bad, "all match" if not bad else ", ".join(bad))


def _permutation_suite(quick: bool) -> Check:
    g = GroupSpec.cyclic(15)
    rng = random.Random(7)
    bad = 0
    prods = [coordinate_product(g, (a, b)) for a in itertools.permutations(range(3))
             for b in itertools.permutations(range(5))]
    if quick:
        prods = rng.sample(prods, 40)
    for s in prods:
        if not preserves_qi(s, "exhaustive").preserves or classify(s) is None:
            bad += 1
    trials = 50 if quick else 500
    for _ in range(trials):
        s = random_perm(g, rng)
        rep = preserves_qi(s, "exhaustive")
        if (classify(s) is not None) != rep.preserves:
            bad += 1
    for n in (8, 9, 12):
        h = GroupSpec.cyclic(n)
        for _ in range(10 if quick else 40):
            s = random_perm(h, rng)
            f = classify(s)
            if (f is not None) != preserves_qi(s, "exhaustive").preserves or (f is not None and f.compose() != s):
                bad += 1
    return Check("permutation classification", bad == 0,
                 f"{len(prods)} products, {trials} random on Z_15, {bad} mismatches")


def run_selftest(quick: bool = False) -> SelftestReport:
    return SelftestReport((
        _oracle_suite(12 if quick else 16, 6 if quick else 10),
        _identity_suite(quick),
        _permutation_suite(quick),
    ))

