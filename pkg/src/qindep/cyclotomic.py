"""Cyclotomic polynomials and the exact vanishing test for sums of roots of unity.

A coefficient vector f on Z_n is a relation iff Phi_n divides
sum_x f(x) X^x.  This path never touches the structured relation basis,
so it serves as the independent check for everything built on top of it.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .groups import GroupSpec, Unsupported


def _divmod_poly(num: list[int], den: Sequence[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial (coefficients low -> high)."""
    num = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(num) - 1 < dd:
        return [0], num
    q = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return q, num[:dd] or [0]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Phi_n as integer coefficients, constant term first."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # X^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _divmod_poly(poly, cyclotomic_poly(d))
            if any(rem):
                raise ArithmeticError(f"Phi_{d} does not divide X^{n}-1")
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def power_residues(n: int) -> tuple[tuple[int, ...], ...]:
    """Column x holds the coefficients of X^x mod Phi_n (length phi(n))."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    cur = [1] + [0] * (deg - 1) if deg else []
    out = []
    for _ in range(n):
        out.append(tuple(cur))
        if deg == 0:
            continue
        # multiply by X and reduce: X^deg = -sum phi[i] X^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(out)


def evaluate(n: int, coeffs: Mapping[int, Fraction | int]) -> list[Fraction]:
    """sum_x f(x) X^x reduced modulo Phi_n."""
    cols = power_residues(n)
    deg = len(cyclotomic_poly(n)) - 1
    acc = [Fraction(0)] * deg
    for x, c in coeffs.items():
        if c:
            col = cols[x % n]
            for i in range(deg):
                if col[i]:
                    acc[i] += c * col[i]
    return acc


def cyclotomic_is_relation(g: GroupSpec, coeffs: Mapping[int, Fraction | int] | Sequence) -> bool:
    """True iff sum_x f(x) zeta_n^x == 0 exactly."""
    if not g.is_cyclic:
        raise Unsupported("cyclotomic check applies to cyclic groups")
    if not isinstance(coeffs, Mapping):
        coeffs = {x: c for x, c in enumerate(coeffs) if c}
    return not any(evaluate(g.n, coeffs))
