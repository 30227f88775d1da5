"""Exact linear algebra over the rationals.

Matrices are lists of rows.  Entries are Python ints or ``Fraction``;
elimination is fraction-free (Bareiss-style row combinations with gcd
reduction), so every intermediate value is an exact integer.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def _as_int_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in rows:
        den = 1
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                den = lcm(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def _normalize(row: list[int]) -> list[int]:
    g = gcd(*row)
    if g > 1:
        return [v // g for v in row]
    return row


@dataclass(frozen=True)
class IntRREF:
    """Row echelon form with integer rows.

    Row ``i`` has pivot column ``pivots[i]`` holding ``rows[i][pivots[i]] > 0``
    and zeros in every other pivot column, so ``rows[i] / rows[i][pivots[i]]``
    is the usual reduced row.
    """

    rows: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list[int]:
        piv = set(self.pivots)
        return [c for c in range(self.ncols) if c not in piv]

    def reduced(self) -> list[list[Fraction]]:
        return [[Fraction(v, r[p]) for v in r] for r, p in zip(self.rows, self.pivots)]


def int_rref(rows: Sequence[Sequence], ncols: int | None = None, *, integral: bool = False) -> IntRREF:
    """Gauss-Jordan elimination keeping rows integral.

    ``integral=True`` promises every entry is already an int (skips the rescaling pass).
    """
    m = [_normalize(list(r)) for r in rows] if integral else [_normalize(r) for r in _as_int_rows(rows)]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        k = next((i for i in range(r, nrows) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        prow = m[r]
        if prow[c] < 0:
            prow = [-v for v in prow]
            m[r] = prow
        a = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            b = m[i][c]
            if b:
                g = gcd(a, b)
                fa, fb = a // g, b // g
                row = m[i]
                m[i] = _normalize([fa * x - fb * y for x, y in zip(row, prow)])
        pivots.append(c)
        r += 1
    return IntRREF(tuple(tuple(row) for row in m[:r]), tuple(pivots), ncols)


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return int_rref(rows).rank


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ech = int_rref(rows, ncols)
    basis = []
    for f in ech.free_columns():
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(ech.rows, ech.pivots):
            if row[f]:
                v[p] = Fraction(-row[f], row[p])
        basis.append(v)
    return basis


def integer_nullspace_rows(rows: Sequence[Sequence], ncols: int) -> list[list[int]]:
    """Nullspace basis scaled to primitive integer vectors."""
    return [_normalize(r) for r in _as_int_rows(nullspace(rows, ncols))]


def in_row_space(rows: Sequence[Sequence], v: Sequence) -> bool:
    if not rows:
        return all(x == 0 for x in v)
    return rank(list(rows) + [list(v)]) == rank(rows)


@dataclass(frozen=True)
class RestrictedKernel:
    """Kernel of a column-restricted matrix in pivot form.

    ``free`` lists the local column positions that parametrize the kernel;
    every kernel vector is fixed by its values there.  For a pivot column
    ``p = pivots[i]`` the value is ``-sum_f t_f * rows[i][f] / rows[i][p]``.
    """

    ncols: int
    free: tuple[int, ...]
    pivots: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.free)

    def vector(self, values: dict[int, int | Fraction]) -> list[Fraction]:
        """Reconstruct the kernel vector from its values on ``free``."""
        v = [Fraction(0)] * self.ncols
        for f in self.free:
            v[f] = Fraction(values.get(f, 0))
        for row, p in zip(self.rows, self.pivots):
            s = sum((Fraction(row[f]) * v[f] for f in self.free if row[f]), Fraction(0))
            v[p] = -s / row[p]
        return v

    def basis(self) -> list[list[Fraction]]:
        return [self.vector({f: 1}) for f in self.free]


def restricted_kernel(matrix: Sequence[Sequence[int]], columns: Sequence[int]) -> RestrictedKernel:
    """Kernel of ``matrix`` keeping only ``columns`` (in the given order)."""
    sub = [[row[c] for c in columns] for row in matrix]
    sub = [r for r in sub if any(r)]
    k = len(columns)
    if not sub:
        return RestrictedKernel(k, tuple(range(k)), (), ())
    ech = int_rref(sub, k, integral=True)
    return RestrictedKernel(k, tuple(ech.free_columns()), ech.pivots, ech.rows)


class EnumerationLimit(Exception):
    """Raised when the signed-vector search exceeds its node budget."""


def find_signed_vector(
    ker: RestrictedKernel,
    node_cap: int | None = None,
    forced: tuple[int, int] | None = None,
) -> tuple[list[int] | None, int]:
    """Search ``ker`` for a nonzero vector with every entry in {-1, 0, 1}.

    Free values are assigned in order; a pivot row is pruned as soon as its
    partial sum cannot return to {0, +-pivot} with the remaining free terms.
    The first nonzero free value is fixed to +1 (sign symmetry).
    ``forced=(col, value)`` pins one free column.
    Returns (vector or None, nodes visited).
    """
    free = ker.free
    d = len(free)
    if d == 0:
        return None, 0
    rows = ker.rows
    piv_val = [r[p] for r, p in zip(rows, ker.pivots)]
    nrows = len(rows)
    # coeff[i] = list of (row index, integer coefficient) for free column i
    coeff = [[(r, rows[r][f]) for r in range(nrows) if rows[r][f]] for f in free]
    # slack[i][r] = sum over free positions >= i of |rows[r][f]|
    slack = [[0] * nrows for _ in range(d + 1)]
    for i in range(d - 1, -1, -1):
        s = slack[i + 1][:]
        for r, c in coeff[i]:
            s[r] += abs(c)
        slack[i] = s
    partial = [0] * nrows
    assign = [0] * d
    nodes = 0
    forced_pos = free.index(forced[0]) if forced is not None else None

    def rec(i: int, nonzero: bool) -> bool:
        nonlocal nodes
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise EnumerationLimit
        if i == d:
            return nonzero
        if i == forced_pos:
            choices = (forced[1],)
        elif nonzero or forced_pos is not None:
            choices = (0, 1, -1)
        else:
            choices = (0, 1)
        rem = slack[i + 1]
        touched = coeff[i]
        for t in choices:
            good = True
            if t:
                for r, c in touched:
                    partial[r] += t * c
            # only rows touching column i changed their reachable interval
            for r, _ in touched:
                s, a, w = partial[r], piv_val[r], rem[r]
                lo, hi = s - w, s + w
                if not (lo <= 0 <= hi or lo <= a <= hi or lo <= -a <= hi):
                    good = False
                    break
            assign[i] = t
            if good and rec(i + 1, nonzero or t != 0):
                return True
            if t:
                for r, c in touched:
                    partial[r] -= t * c
        assign[i] = 0
        return False

    if not rec(0, False):
        return None, nodes
    vec = [0] * ker.ncols
    for i, f in enumerate(free):
        vec[f] = assign[i]
    for r, p in enumerate(ker.pivots):
        # exact: partial[r] is a multiple of the pivot value by construction
        vec[p] = -partial[r] // piv_val[r]
    return vec, nodes
