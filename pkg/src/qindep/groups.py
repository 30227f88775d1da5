"""Finite abelian groups: cyclic Z_n and product lattices.

Elements are stored as integers in ``[0, order)``: residues for cyclic
groups, row-major indices for lattices.  Subsets carry both a sorted tuple
and an int bitmask, since the searches elsewhere are set operations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Iterator, Sequence


class InvalidInput(ValueError):
    pass


class Unsupported(ValueError):
    pass


def factor(n: int) -> tuple[tuple[int, int], ...]:
    """Prime-power factorization of ``n`` by trial division."""
    if not isinstance(n, int) or n < 2:
        raise InvalidInput(f"factor expects an integer >= 2, got {n!r}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and factor(n) == ((n, 1),)


def totient(n: int) -> int:
    if n == 1:
        return 1
    return prod(p ** (e - 1) * (p - 1) for p, e in factor(n))


def crt_combine(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Inverse of x -> (x mod m_j)_j for pairwise coprime moduli."""
    n = prod(moduli)
    x = 0
    for r, m in zip(residues, moduli):
        q = n // m
        x += r * q * pow(q, -1, m)
    return x % n


@dataclass(frozen=True)
class GroupSpec:
    """Z_n (``kind='cyclic'``) or Z_{d1} x ... x Z_{dk} (``kind='lattice'``).

    Lattices keep their axes as given; a lattice with prime dims is not
    silently turned into a cyclic group.
    """

    kind: str
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("cyclic", "lattice"):
            raise InvalidInput(f"unknown group kind {self.kind!r}")
        if not self.dims or any((not isinstance(d, int)) or d < 2 for d in self.dims):
            raise InvalidInput(f"group dimensions must be integers >= 2, got {self.dims!r}")
        if self.kind == "cyclic" and len(self.dims) != 1:
            raise InvalidInput("a cyclic group has exactly one modulus")

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls("cyclic", (n,))

    @classmethod
    def lattice(cls, *dims: int) -> "GroupSpec":
        if len(dims) == 1 and not isinstance(dims[0], int):
            dims = tuple(dims[0])
        return cls("lattice", tuple(dims))

    @property
    def is_cyclic(self) -> bool:
        return self.kind == "cyclic"

    @property
    def n(self) -> int:
        if not self.is_cyclic:
            raise Unsupported("lattice groups have no single modulus")
        return self.dims[0]

    @cached_property
    def order(self) -> int:
        return prod(self.dims)

    @cached_property
    def factorization(self) -> tuple[tuple[int, int], ...]:
        if not self.is_cyclic:
            raise Unsupported("factorization is defined for cyclic groups")
        return factor(self.dims[0])

    @cached_property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factorization)

    @cached_property
    def radical(self) -> int:
        return prod(self.primes)

    @property
    def is_square_free(self) -> bool:
        return self.is_cyclic and self.radical == self.n

    @cached_property
    def phi(self) -> int:
        """Dimension of the quotient by the relation space."""
        if self.is_cyclic:
            return totient(self.n)
        return prod(d - 1 for d in self.dims)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        s = 1
        for d in reversed(self.dims):
            out.append(s)
            s *= d
        return tuple(reversed(out))

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def coords(self, x: int) -> tuple[int, ...]:
        """Lattice coordinates of ``x``; for cyclic groups, CRT coordinates."""
        if self.is_cyclic:
            return crt_coords(self, x)
        return tuple((x // s) % d for s, d in zip(self.strides, self.dims))

    def index(self, coords: Sequence[int]) -> int:
        if self.is_cyclic:
            return from_crt_coords(self, coords)
        if len(coords) != len(self.dims) or any(not 0 <= c < d for c, d in zip(coords, self.dims)):
            raise InvalidInput(f"coordinates {tuple(coords)} out of range for {self}")
        return sum(c * s for c, s in zip(coords, self.strides))

    def add(self, x: int, y: int) -> int:
        if self.is_cyclic:
            return (x + y) % self.n
        return self.index([(a + b) % d for a, b, d in zip(self.coords(x), self.coords(y), self.dims)])

    def neg(self, x: int) -> int:
        if self.is_cyclic:
            return (-x) % self.n
        return self.index([(-a) % d for a, d in zip(self.coords(x), self.dims)])

    def __str__(self) -> str:
        if self.is_cyclic:
            return f"Z_{self.n}"
        return "x".join(map(str, self.dims))

    def key(self) -> str:
        """Canonical string used for table and certificate keys."""
        return str(self.n) if self.is_cyclic else "x".join(map(str, self.dims))


def parse_group(text: str) -> GroupSpec:
    text = text.strip()
    if text.startswith("Z_"):
        text = text[2:]
    if "x" in text:
        try:
            return GroupSpec.lattice(*(int(t) for t in text.split("x")))
        except ValueError as exc:
            raise InvalidInput(f"bad lattice spec {text!r}") from exc
    try:
        return GroupSpec.cyclic(int(text))
    except ValueError as exc:
        raise InvalidInput(f"bad group spec {text!r}") from exc


def crt_coords(g: GroupSpec, x: int) -> tuple[int, ...]:
    """(x mod p_j^{n_j})_j for cyclic ``g``."""
    if not g.is_cyclic:
        raise Unsupported("crt_coords needs a cyclic group")
    return tuple(x % (p**e) for p, e in g.factorization)


def from_crt_coords(g: GroupSpec, coords: Sequence[int]) -> int:
    moduli = [p**e for p, e in g.factorization]
    if len(coords) != len(moduli):
        raise InvalidInput("wrong number of CRT coordinates")
    return crt_combine([c % m for c, m in zip(coords, moduli)], moduli)


# ---------------------------------------------------------------- subgroups


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its order (cyclic) or by a set of axes (lattice)."""

    group: GroupSpec
    order: int
    axes: tuple[int, ...] = ()

    @cached_property
    def elements(self) -> tuple[int, ...]:
        g = self.group
        if g.is_cyclic:
            step = g.n // self.order
            return tuple(range(0, g.n, step))
        ranges = [range(d) if j in self.axes else range(1) for j, d in enumerate(g.dims)]
        out = []
        for c in _product(ranges):
            out.append(g.index(c))
        return tuple(sorted(out))

    @cached_property
    def mask(self) -> int:
        return mask_of(self.elements)


def _product(ranges) -> Iterator[tuple[int, ...]]:
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _product(ranges[1:]):
            yield (head,) + tail


def cyclic_subgroup(g: GroupSpec, order: int) -> Subgroup:
    if not g.is_cyclic or g.n % order:
        raise InvalidInput(f"Z_{g.dims[0]} has no subgroup of order {order}")
    return Subgroup(g, order)


def prime_subgroup(g: GroupSpec, p: int) -> Subgroup:
    """The order-p subgroup Z_p, i.e. (n/p) Z_n."""
    if p not in g.primes:
        raise InvalidInput(f"{p} does not divide {g.n}")
    return cyclic_subgroup(g, p)


def axis_subgroup(g: GroupSpec, axes: Iterable[int]) -> Subgroup:
    axes = tuple(sorted(set(axes)))
    if g.is_cyclic or any(not 0 <= a < len(g.dims) for a in axes):
        raise InvalidInput(f"bad axes {axes} for {g}")
    return Subgroup(g, prod(g.dims[a] for a in axes), axes)


def radical(g: GroupSpec) -> tuple[int, Subgroup]:
    """(n~, Z_{n~} = (n/n~) Z_n)."""
    if not g.is_cyclic:
        raise Unsupported("radical is defined for cyclic groups")
    return g.radical, cyclic_subgroup(g, g.radical)


@dataclass(frozen=True)
class Coset:
    subgroup: Subgroup
    representative: int

    @property
    def group(self) -> GroupSpec:
        return self.subgroup.group

    @cached_property
    def elements(self) -> tuple[int, ...]:
        g = self.group
        return tuple(sorted(g.add(self.representative, h) for h in self.subgroup.elements))

    @cached_property
    def mask(self) -> int:
        return mask_of(self.elements)

    def __len__(self) -> int:
        return self.subgroup.order


def cosets_of(g: GroupSpec, subgroup: Subgroup) -> list[Coset]:
    """Partition of ``g`` into cosets, each labelled by its least element."""
    if subgroup.group != g:
        raise InvalidInput("subgroup belongs to a different group")
    seen = 0
    out = []
    for x in range(g.order):
        if seen >> x & 1:
            continue
        c = Coset(subgroup, x)
        seen |= c.mask
        out.append(c)
    return out


@lru_cache(maxsize=None)
def prime_coset_masks(g: GroupSpec) -> tuple[int, ...]:
    """Masks of all cosets of every prime-order subgroup (cyclic) or axis line (lattice)."""
    out = []
    if g.is_cyclic:
        for p in g.primes:
            out.extend(c.mask for c in cosets_of(g, prime_subgroup(g, p)))
    else:
        for j in range(len(g.dims)):
            out.extend(c.mask for c in cosets_of(g, axis_subgroup(g, [j])))
    return tuple(out)


# ---------------------------------------------------------------- subsets


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class BitPermuter:
    """Moves bit i of a mask to bit ``targets[i]``, eight source bits per table lookup."""

    __slots__ = ("tables",)

    def __init__(self, targets: Sequence[int]):
        tables = []
        for lo in range(0, len(targets), 8):
            chunk = targets[lo:lo + 8]
            table = [0] * (1 << len(chunk))
            for b in range(1, len(table)):
                low = b & -b
                table[b] = table[b ^ low] | 1 << chunk[low.bit_length() - 1]
            tables.append(tuple(table))
        self.tables = tuple(tables)

    def __call__(self, mask: int) -> int:
        out = 0
        for t in self.tables:
            if mask & 0xFF:
                out |= t[mask & 0xFF]
            mask >>= 8
        return out


@dataclass(frozen=True)
class Subset:
    group: GroupSpec
    elements: tuple[int, ...]
    mask: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        els = tuple(sorted(set(self.elements)))
        if len(els) != len(self.elements):
            raise InvalidInput("duplicate elements in subset")
        if els and (els[0] < 0 or els[-1] >= self.group.order):
            raise InvalidInput(f"element out of range for {self.group}")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "mask", mask_of(els))

    @classmethod
    def from_mask(cls, g: GroupSpec, mask: int) -> "Subset":
        return cls(g, tuple(bits(mask)))

    @classmethod
    def of(cls, g: GroupSpec, elements: Iterable[int]) -> "Subset":
        return cls(g, tuple(elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.group.order and bool(self.mask >> x & 1)

    def translate(self, t: int) -> "Subset":
        return Subset(self.group, tuple(self.group.add(x, t) for x in self.elements))

    def image(self, images: Sequence[int]) -> "Subset":
        return Subset(self.group, tuple(images[x] for x in self.elements))

    def union(self, other: "Subset") -> "Subset":
        return Subset.from_mask(self.group, self.mask | other.mask)

    def contains_coset(self) -> Coset | None:
        """Some full coset of a prime subgroup (or axis line) inside this set."""
        g = self.group
        subs = ([prime_subgroup(g, p) for p in g.primes] if g.is_cyclic
                else [axis_subgroup(g, [j]) for j in range(len(g.dims))])
        for h in subs:
            for c in cosets_of(g, h):
                if self.mask & c.mask == c.mask:
                    return c
        return None

    def __str__(self) -> str:
        return format_subset(self)


def format_subset(s: Subset) -> str:
    g = s.group
    if g.is_cyclic:
        return f"{g.n}:" + ",".join(map(str, s.elements))
    return g.key() + ":" + ",".join("(" + ",".join(map(str, g.coords(x))) + ")" for x in s.elements)


_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_subset(text: str) -> Subset:
    """Parse ``n:a,b,c`` or ``d1xd2x..:(i,j,..),(..)``."""
    if ":" not in text:
        raise InvalidInput(f"subset text needs a ':' separator: {text!r}")
    head, body = text.split(":", 1)
    g = parse_group(head)
    body = body.strip()
    if g.is_cyclic:
        try:
            els = [int(t) for t in body.split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidInput(f"bad residue list {body!r}") from exc
        if any(not 0 <= x < g.n for x in els):
            raise InvalidInput(f"residue out of range in {text!r}")
        return Subset.of(g, els)
    els = []
    for m in _TUPLE.finditer(body):
        try:
            els.append(g.index([int(t) for t in m.group(1).split(",")]))
        except ValueError as exc:
            raise InvalidInput(f"bad coordinate tuple {m.group(0)!r}") from exc
    leftover = _TUPLE.sub("", body).replace(",", "").strip()
    if leftover:
        raise InvalidInput(f"unparsed text in lattice subset: {leftover!r}")
    return Subset.of(g, els)


def units(n: int) -> list[int]:
    return [u for u in range(1, n) if gcd(u, n) == 1] if n > 1 else [0]
