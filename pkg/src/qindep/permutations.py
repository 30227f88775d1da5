"""Permutations of Z_n that preserve quasi-independent sets.

Constructors cover the four structural types (prime-power axis maps,
Z_2-coset swaps, radical-coset shuffles, maps of Z_{n~} extended by the
identity) plus automorphisms and translations.  ``preserves_qi`` decides
preservation directly from the definition; ``classify`` recovers a
factorization from structure alone.  The two are independent routes and
the tests compare them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Sequence, Union

import numpy as np

from .groups import (
    GroupSpec,
    InvalidInput,
    Subset,
    Unsupported,
    bits,
    crt_coords,
    from_crt_coords,
    parse_group,
    prime_coset_masks,
)
from .oracle import oracle_qi_table
from .relations import qi_flag

EXHAUSTIVE_LIMIT = 20


class InvalidFactor(InvalidInput):
    pass


def _check_bijection(images: Sequence[int], n: int) -> tuple[int, ...]:
    images = tuple(int(v) for v in images)
    if len(images) != n or sorted(images) != list(range(n)):
        raise InvalidInput(f"not a permutation of [0, {n}): {images}")
    return images


@dataclass(frozen=True)
class Perm:
    group: GroupSpec
    images: tuple[int, ...]

    def __post_init__(self):
        if not self.group.is_cyclic:
            raise Unsupported("permutations are implemented for cyclic groups")
        object.__setattr__(self, "images", _check_bijection(self.images, self.group.n))

    @classmethod
    def identity(cls, g: GroupSpec) -> "Perm":
        return cls(g, tuple(range(g.n)))

    @classmethod
    def from_function(cls, g: GroupSpec, f) -> "Perm":
        return cls(g, tuple(f(x) % g.n for x in range(g.n)))

    @property
    def n(self) -> int:
        return self.group.n

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Perm") -> "Perm":
        """self after other."""
        if other.group != self.group:
            raise InvalidInput("composing permutations of different groups")
        return Perm(self.group, tuple(self.images[y] for y in other.images))

    def __matmul__(self, other: "Perm") -> "Perm":
        return self.compose(other)

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for x, y in enumerate(self.images):
            inv[y] = x
        return Perm(self.group, tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def image(self, E: Subset) -> Subset:
        return E.image(self.images)

    def image_mask(self, mask: int) -> int:
        out = 0
        for x in bits(mask):
            out |= 1 << self.images[x]
        return out

    def to_text(self) -> str:
        return f"{self.n}:" + ",".join(map(str, self.images))

    @classmethod
    def from_text(cls, text: str) -> "Perm":
        if ":" not in text:
            raise InvalidInput(f"permutation text needs 'n:images': {text!r}")
        head, body = text.split(":", 1)
        g = parse_group(head)
        try:
            images = [int(t) for t in body.split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidInput(f"bad image list {body!r}") from exc
        return cls(g, tuple(images))


# ------------------------------------------------------------ factor types


@dataclass(frozen=True)
class Type1:
    """Permutation of the prime-power factor ``axis`` (coset-preserving), identity elsewhere."""

    axis: int
    perm: tuple[int, ...]

    def to_perm(self, g: GroupSpec) -> Perm:
        return make_type1(g, self.axis, self.perm)

    def to_json(self) -> dict:
        return {"type": "type1", "axis": self.axis, "perm": list(self.perm)}


@dataclass(frozen=True)
class Type2:
    """Swap the two points of the listed Z_2-cosets (named by their smaller element)."""

    swaps: tuple[int, ...]

    def to_perm(self, g: GroupSpec) -> Perm:
        return make_type2(g, self.swaps)

    def to_json(self) -> dict:
        return {"type": "type2", "swaps": list(self.swaps)}


@dataclass(frozen=True)
class Type3:
    """Permutation of the radical-coset representatives 0..n/n~-1."""

    perm: tuple[int, ...]

    def to_perm(self, g: GroupSpec) -> Perm:
        return make_type3(g, self.perm)

    def to_json(self) -> dict:
        return {"type": "type3", "perm": list(self.perm)}


@dataclass(frozen=True)
class Type4:
    """Permutation of Z_{n~} (as k -> (n/n~)k) extended by the identity.

    ``inner`` optionally records how the Z_{n~} permutation itself factors.
    """

    perm: tuple[int, ...]
    inner: "PermFactorization | None" = field(default=None, compare=False)

    def to_perm(self, g: GroupSpec) -> Perm:
        return make_type4(g, self.perm, check=False)

    def to_json(self) -> dict:
        out = {"type": "type4", "perm": list(self.perm)}
        if self.inner is not None:
            out["inner"] = self.inner.to_json()
        return out


@dataclass(frozen=True)
class Automorphism:
    unit: int

    def to_perm(self, g: GroupSpec) -> Perm:
        return make_affine(g, self.unit, 0)

    def to_json(self) -> dict:
        return {"type": "automorphism", "unit": self.unit}


Factor = Union[Type1, Type2, Type3, Type4, Automorphism]


@dataclass(frozen=True)
class PermFactorization:
    """sigma(x) = translation + (f_last o ... o f_first)(x)."""

    group: GroupSpec
    translation: int
    factors: tuple[Factor, ...]

    def compose(self) -> Perm:
        g = self.group
        out = Perm.identity(g)
        for f in self.factors:
            out = f.to_perm(g) @ out
        return make_affine(g, 1, self.translation) @ out

    def to_json(self) -> dict:
        return {
            "group": self.group.key(),
            "translation": self.translation,
            "factors": [f.to_json() for f in self.factors],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PermFactorization":
        g = parse_group(data["group"])
        return cls(g, int(data["translation"]), tuple(_factor_from_json(f) for f in data["factors"]))


def _factor_from_json(d: dict) -> Factor:
    kind = d.get("type")
    if kind == "type1":
        return Type1(int(d["axis"]), tuple(d["perm"]))
    if kind == "type2":
        return Type2(tuple(d["swaps"]))
    if kind == "type3":
        return Type3(tuple(d["perm"]))
    if kind == "type4":
        inner = PermFactorization.from_json(d["inner"]) if "inner" in d else None
        return Type4(tuple(d["perm"]), inner)
    if kind == "automorphism":
        return Automorphism(int(d["unit"]))
    raise InvalidInput(f"unknown factor type {kind!r}")


# ------------------------------------------------------------ constructors


def _require_cyclic(g: GroupSpec) -> None:
    if not g.is_cyclic:
        raise Unsupported("permutations are implemented for cyclic groups")


def make_type1(g: GroupSpec, a: int, sigma: Sequence[int]) -> Perm:
    """sigma on the a-th prime-power CRT factor, identity on the others."""
    _require_cyclic(g)
    if not 0 <= a < len(g.factorization):
        raise InvalidFactor(f"axis {a} out of range for {g}")
    p, e = g.factorization[a]
    q = p ** e
    sigma = _check_bijection(sigma, q)
    step = q // p  # Z_p inside Z_{p^e} is step * Z
    for x in range(step):
        targets = {sigma[x + step * j] % step for j in range(p)}
        if len(targets) != 1:
            raise InvalidFactor(f"factor on Z_{q} does not map cosets of Z_{p} onto cosets")

    def f(x: int) -> int:
        c = list(crt_coords(g, x))
        c[a] = sigma[c[a]]
        return from_crt_coords(g, c)

    return Perm.from_function(g, f)


def make_type2(g: GroupSpec, swaps: Sequence[int] = ()) -> Perm:
    """Swap x <-> x + n/2 for every listed x (each Z_2-coset is fixed setwise)."""
    _require_cyclic(g)
    n = g.n
    if n % 2:
        raise InvalidFactor("type 2 needs an even modulus")
    h = n // 2
    images = list(range(n))
    seen = set()
    for x in swaps:
        x = int(x) % h
        if x in seen:
            raise InvalidFactor(f"Z_2-coset of {x} listed twice")
        seen.add(x)
        images[x], images[x + h] = x + h, x
    return Perm(g, tuple(images))


def make_type3(g: GroupSpec, sigma: Sequence[int]) -> Perm:
    """x + y -> x + sigma(y) for x in Z_{n~} and representatives y in [0, n/n~)."""
    _require_cyclic(g)
    step = g.n // g.radical
    sigma = _check_bijection(sigma, step)
    return Perm.from_function(g, lambda z: z - z % step + sigma[z % step])


def make_type4(g: GroupSpec, sigma: Sequence[int], *, check: bool = True) -> Perm:
    """sigma on Z_{n~} (given on local indices k for the element (n/n~)k), identity elsewhere.

    With ``check`` the local map must preserve quasi-independence on Z_{n~}.
    """
    _require_cyclic(g)
    r = g.radical
    step = g.n // r
    sigma = _check_bijection(sigma, r)
    if check:
        local = Perm(GroupSpec.cyclic(r), sigma) if r > 1 else None
        if local is not None and not _preserves_structurally_or_exhaustively(local):
            raise InvalidFactor(f"map of Z_{r} does not preserve quasi-independence")
    return Perm.from_function(g, lambda z: step * sigma[z // step] if z % step == 0 else z)


def make_affine(g: GroupSpec, u: int, t: int = 0) -> Perm:
    """x -> u x + t."""
    _require_cyclic(g)
    if gcd(u, g.n) != 1:
        raise InvalidFactor(f"{u} is not a unit mod {g.n}")
    return Perm.from_function(g, lambda x: u * x + t)


def compose(*perms: Perm) -> Perm:
    """compose(a, b, c) = a o b o c."""
    if not perms:
        raise InvalidInput("compose needs at least one permutation")
    out = perms[-1]
    for p in reversed(perms[:-1]):
        out = p @ out
    return out


# ------------------------------------------------------------ preservation


@dataclass(frozen=True)
class PreservationReport:
    preserves: bool
    mode: str
    counterexample: Subset | None = None
    source_qi: bool | None = None
    image_qi: bool | None = None
    checked: int = 0

    @property
    def conclusive(self) -> bool:
        """Exhaustive verdicts and counterexamples are proofs; a passed battery is evidence only."""
        return self.mode == "exhaustive" or not self.preserves

    def to_json(self) -> dict:
        out = {"preserves": self.preserves, "mode": self.mode, "conclusive": self.conclusive,
               "checked": self.checked}
        if self.counterexample is not None:
            out["counterexample"] = str(self.counterexample)
            out["source_qi"] = self.source_qi
            out["image_qi"] = self.image_qi
        return out


@lru_cache(maxsize=8)
def qi_table(g: GroupSpec) -> np.ndarray:
    """QI indicator over all 2^n bitmasks (from the sign-vector oracle)."""
    if g.order > EXHAUSTIVE_LIMIT:
        raise Unsupported(f"exhaustive tables limited to order <= {EXHAUSTIVE_LIMIT}")
    table = oracle_qi_table(g)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=8)
def _mask_bits(n: int) -> tuple[np.ndarray, ...]:
    idx = np.arange(1 << n, dtype=np.int64)
    return tuple(((idx >> i) & 1).astype(bool) for i in range(n))


def image_masks(sigma: Perm) -> np.ndarray:
    """image_masks[m] = bitmask of sigma applied to subset m, for every m."""
    n = sigma.n
    out = np.zeros(1 << n, dtype=np.int64)
    for i, b in enumerate(_mask_bits(n)):
        out[b] |= 1 << sigma.images[i]
    return out


def battery_subsets(g: GroupSpec, samples: int = 10_000, seed: int = 0, max_size: int | None = None) -> list[int]:
    """All subsets of size <= 4, all prime cosets and their unions in pairs, plus random subsets."""
    from itertools import combinations

    n = g.n
    out = []
    for k in range(0, min(4, n) + 1):
        for c in combinations(range(n), k):
            m = 0
            for x in c:
                m |= 1 << x
            out.append(m)
    cos = list(prime_coset_masks(g))
    out.extend(cos)
    out.extend(a | b for a, b in combinations(cos, 2))
    rng = random.Random(seed)
    top = max_size if max_size is not None else min(n, g.phi + 4)
    for _ in range(samples):
        k = rng.randint(1, top)
        m = 0
        for x in rng.sample(range(n), k):
            m |= 1 << x
        out.append(m)
    return out


def preserves_qi(sigma: Perm, mode: str = "auto", *, samples: int = 10_000, seed: int = 0) -> PreservationReport:
    """Decide (exhaustive) or test (battery) whether QI(E) <=> QI(sigma(E)) for all E."""
    g = sigma.group
    if mode == "auto":
        mode = "exhaustive" if g.n <= EXHAUSTIVE_LIMIT else "battery"
    if mode == "exhaustive":
        table = qi_table(g)
        img = image_masks(sigma)
        bad = np.nonzero(table[img] != table)[0]
        if bad.size == 0:
            return PreservationReport(True, mode, checked=1 << g.n)
        m = int(bad[0])
        return PreservationReport(False, mode, Subset.from_mask(g, m), bool(table[m]), bool(table[img[m]]),
                                  checked=1 << g.n)
    if mode != "battery":
        raise InvalidInput(f"unknown preservation mode {mode!r}")
    masks = battery_subsets(g, samples, seed)
    for i, m in enumerate(masks):
        a = qi_flag(g, m)
        b = qi_flag(g, sigma.image_mask(m))
        if a is None or b is None:
            continue
        if a != b:
            return PreservationReport(False, mode, Subset.from_mask(g, m), a, b, checked=i + 1)
    return PreservationReport(True, mode, checked=len(masks))


def is_coset_structured(sigma: Perm) -> bool:
    """Every coset of every prime-order subgroup maps onto a coset of the same subgroup."""
    g = sigma.group
    masks = set(prime_coset_masks(g))
    return all(sigma.image_mask(m) in masks for m in prime_coset_masks(g))


def _preserves_structurally_or_exhaustively(sigma: Perm) -> bool:
    if sigma.n <= EXHAUSTIVE_LIMIT:
        return preserves_qi(sigma, "exhaustive").preserves
    return classify(sigma) is not None


# ------------------------------------------------------------ classification


def _classify_squarefree(sigma: Perm) -> PermFactorization | None:
    """Square-free n: translation, coordinate-wise maps on odd axes, Z_2-coset swaps."""
    g = sigma.group
    n = g.n
    t = sigma(0)
    p0 = [(y - t) % n for y in sigma.images]
    coords = [crt_coords(g, x) for x in range(n)]
    fact = g.factorization
    even = fact[0][0] == 2
    if even:
        h = n // 2
        if any((p0[(x + h) % n] - p0[x]) % n != h for x in range(n)):
            return None
    factors: list[Factor] = []
    rho = Perm.identity(g)
    for a, (p, _) in enumerate(fact):
        if p == 2:
            continue
        unit = [0] * len(fact)
        local = []
        for c in range(p):
            unit[a] = c
            local.append(coords[p0[from_crt_coords(g, unit)]][a])
        if any(coords[p0[x]][a] != local[coords[x][a]] for x in range(n)):
            return None
        if sorted(local) != list(range(p)):
            return None
        if local != list(range(p)):
            f = Type1(a, tuple(local))
            factors.append(f)
            rho = f.to_perm(g) @ rho
    rest = Perm(g, tuple(p0)) @ rho.inverse()
    if even:
        h = n // 2
        if any(rest(x) not in (x, (x + h) % n) for x in range(n)):
            return None
        swaps = tuple(x for x in range(h) if rest(x) != x)
        if swaps:
            factors.append(Type2(swaps))
    elif not rest.is_identity():
        return None
    return PermFactorization(g, t, tuple(factors))


def classify(sigma: Perm) -> PermFactorization | None:
    """Factor sigma into the structural types, or None when the structure test fails.

    Order of steps: remove the translation sigma(0); check that cosets of
    Z_{n~} map onto cosets and read off the representative permutation;
    classify every induced map of Z_{n~}; square-free maps are split into a
    Z_2 part and coordinate-wise maps on the odd axes.
    """
    g = sigma.group
    n = g.n
    if n == 1:
        return PermFactorization(g, 0, ())
    r = g.radical
    if r == n:
        return _classify_squarefree(sigma)
    step = n // r
    t = sigma(0)
    s0 = [(y - t) % n for y in sigma.images]
    rep = [0] * step
    for y in range(step):
        targets = {s0[y + step * k] % step for k in range(r)}
        if len(targets) != 1:
            return None
        rep[y] = targets.pop()
    if sorted(rep) != list(range(step)):
        return None
    gr = GroupSpec.cyclic(r)
    factors: list[Factor] = []
    for y in range(step):
        local = tuple((s0[y + step * k] - rep[y]) % n // step for k in range(r))
        if local == tuple(range(r)):
            continue
        inner = _classify_squarefree(Perm(gr, local))
        if inner is None:
            return None
        if y == 0:
            factors.append(Type4(local, inner))
        else:
            swap = list(range(step))
            swap[0], swap[y] = y, 0
            factors.extend([Type3(tuple(swap)), Type4(local, inner), Type3(tuple(swap))])
    if rep != list(range(step)):
        factors.append(Type3(tuple(rep)))
    return PermFactorization(g, t, tuple(factors))


# ------------------------------------------------------------ generators


def coordinate_product(g: GroupSpec, perms: Sequence[Sequence[int]]) -> Perm:
    """Product of one permutation per prime-power CRT factor (each must respect cosets)."""
    out = Perm.identity(g)
    for a, s in enumerate(perms):
        out = make_type1(g, a, s) @ out
    return out


def random_perm(g: GroupSpec, rng: random.Random) -> Perm:
    images = list(range(g.n))
    rng.shuffle(images)
    return Perm(g, tuple(images))
