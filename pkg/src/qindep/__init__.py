"""Quasi-independence of subsets of Z_n and of finite lattices."""
from .groups import GroupSpec, InvalidInput, Subset, Unsupported, parse_group, parse_subset
from .oracle import oracle_is_quasi_independent
from .permutations import Perm, PermFactorization, classify, preserves_qi
from .psi import Budget, PsiEntry, PsiTable, extend, psi
from .relations import (
    IndependenceVerdict,
    Relation,
    coset_reduction_test,
    is_independent,
    is_quasi_independent,
    linear_algebra_test,
    structured_basis,
)

__version__ = "0.1.0"

__all__ = [
    "Budget", "GroupSpec", "IndependenceVerdict", "InvalidInput", "Perm", "PermFactorization",
    "PsiEntry", "PsiTable", "Relation", "Subset", "Unsupported", "classify", "coset_reduction_test",
    "extend", "is_independent", "is_quasi_independent", "linear_algebra_test",
    "oracle_is_quasi_independent", "parse_group", "parse_subset", "preserves_qi", "psi",
    "structured_basis",
]
