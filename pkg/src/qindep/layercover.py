"""Layer-cover search: decide whether Z_{m q} has a QI subset of a given size.

Write Z_{mq} = Z_m x Z_q (q a prime not dividing m, mq square-free) and cut
E into layers L_0..L_{q-1} of Z_m along the Z_q axis.  The relation space
splits as R(m) (x) Q^q + Q^m (x) 1, so E is QI iff every layer is QI and no
nonzero class v in Q[X]/Phi_m lies in S(L_c) for every c, where S(L) is the
set of classes of {0,+-1} combinations over L.

When Psi(m) = phi(m), a layer of size phi(m) (a "full" layer) absorbs every
point: x in L or L + x is not QI, so the point class [X^x] lies in S(L).  A
point class is therefore escaped only by a smaller layer L with x outside L
and L + x QI.  The search enumerates multisets of small layers with the
required total deficit, prunes when their escape sets cannot cover Z_m, and
settles the full layers by an exact hitting-set search over the common
classes.  Symmetry: the coordinate-product permutations of Z_m act on all
layers at once, so one layer is taken as an orbit representative.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cyclotomic import power_residues
from .groups import GroupSpec, InvalidInput, Subset, Unsupported, crt_combine, factor, is_prime
from .relations import is_quasi_independent, qi_flag

MAX_LAYER_ORDER = 15


@dataclass
class LayerCoverResult:
    m: int
    q: int
    total: int
    feasible: bool | None          # None: budget ran out
    witness: Subset | None = None
    leaves: int = 0
    seconds: float = 0.0
    patterns: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def group(self) -> GroupSpec:
        return GroupSpec.cyclic(self.m * self.q)


class LayerModel:
    """QI layer types of Z_m with their signed-sum class sets."""

    def __init__(self, m: int, min_size: int):
        g = GroupSpec.cyclic(m)
        self.m, self.phi = m, g.phi
        self.M = np.array(power_residues(m), dtype=np.int64)   # row x: X^x mod Phi_m
        self.span = int(np.abs(self.M).sum(axis=0).max())
        self.weights = (2 * self.span + 1) ** np.arange(self.phi, dtype=np.int64)
        self.types: dict[int, list[int]] = {0: [0]} if min_size == 0 else {}
        for mask in range(1, 1 << m):
            b = mask.bit_count()
            if min_size <= b <= self.phi and qi_flag(g, mask):
                self.types.setdefault(b, []).append(mask)
        self.signs = {k: np.array(list(itertools.product((-1, 0, 1), repeat=k)), dtype=np.int64)
                      for k in range(min_size, self.phi + 1)}
        self._keys: dict[int, np.ndarray] = {}
        self.full = self.types.get(self.phi, [])
        self.contain: dict[int, int] = {}
        for i, mask in enumerate(self.full):
            for k in self.keys(mask).tolist():
                self.contain[k] = self.contain.get(k, 0) | (1 << i)
        self.escape = {mask: sum(1 << x for x in range(m) if not mask >> x & 1 and qi_flag(g, mask | 1 << x))
                       for b, ms in self.types.items() if b < self.phi for mask in ms}
        self.point_keys = {self._key(s * self.M[x]) for x in range(m) for s in (1, -1)}

    def signs_for(self, k: int) -> np.ndarray:
        if k not in self.signs:
            self.signs[k] = np.array(list(itertools.product((-1, 0, 1), repeat=k)), dtype=np.int64)
        return self.signs[k]

    def _key(self, v: np.ndarray) -> int:
        return int(((v + self.span) * self.weights).sum())

    def keys(self, mask: int) -> np.ndarray:
        """Sorted keys of the nonzero classes of signed sums over ``mask``."""
        if mask not in self._keys:
            els = [x for x in range(self.m) if mask >> x & 1]
            V = self.signs_for(len(els)) @ self.M[els]
            V = V[np.any(V != 0, axis=1)]
            self._keys[mask] = np.unique(((V + self.span) * self.weights).sum(axis=1))
        return self._keys[mask]

    def hitting_full_layers(self, common: list[int], k: int) -> list[int] | None:
        """k full layers (with repetition) that together escape every class in ``common``."""
        if not common:
            return [self.full[0]] * k if self.full else ([] if k == 0 else None)
        all_full = (1 << len(self.full)) - 1
        killers = [all_full & ~self.contain.get(c, 0) for c in common]
        if any(kl == 0 for kl in killers):
            return None
        pattern: dict[int, int] = {}
        for j, km in enumerate(killers):
            while km:
                low = km & -km
                b = low.bit_length() - 1
                pattern[b] = pattern.get(b, 0) | (1 << j)
                km ^= low
        rows: dict[int, int] = {}
        for b, v in pattern.items():
            rows.setdefault(v, b)
        pats = [a for a in rows if not any(b != a and a | b == b for b in rows)]
        need = (1 << len(common)) - 1

        def rec(covered: int, left: int) -> list[int] | None:
            if covered == need:
                return []
            if left == 0:
                return None
            rest = need & ~covered
            low = rest & -rest   # some chosen layer must escape this class
            for a in pats:
                if a & low:
                    r = rec(covered | a, left - 1)
                    if r is not None:
                        return [self.full[rows[a]]] + r
            return None

        chosen = rec(0, k)
        if chosen is None:
            return None
        return chosen + [chosen[0]] * (k - len(chosen))


@lru_cache(maxsize=8)
def _model(m: int, min_size: int) -> LayerModel:
    return LayerModel(m, min_size)


def _coordinate_group(m: int) -> list[tuple[int, ...]]:
    primes = [p for p, _ in factor(m)]
    out = []
    for perms in itertools.product(*(itertools.permutations(range(p)) for p in primes)):
        out.append(tuple(crt_combine([perms[i][x % p] for i, p in enumerate(primes)], primes) for x in range(m)))
    return out


def _image(mask: int, images: tuple[int, ...]) -> int:
    r = 0
    for x, y in enumerate(images):
        if mask >> x & 1:
            r |= 1 << y
    return r


def _deficit_patterns(deficit: int, parts: int, max_part: int) -> list[tuple[int, ...]]:
    """Partitions of ``deficit`` into at most ``parts`` parts, each at most ``max_part``."""
    out = []

    def rec(rem: int, cap: int, acc: list[int]):
        if rem == 0:
            out.append(tuple(acc))
            return
        if len(acc) == parts:
            return
        for d in range(min(rem, cap), 0, -1):
            rec(rem - d, d, acc + [d])

    rec(deficit, max_part, [])
    return out


def check_layer_group(m: int, q: int) -> None:
    if not is_prime(q) or m % q == 0:
        raise InvalidInput("q must be a prime not dividing m")
    fact = factor(m)
    if any(e > 1 for _, e in fact) or m % 2 == 0 or len(fact) > 2:
        raise Unsupported("layer model needs m odd and a prime or a product of two primes")
    if m > MAX_LAYER_ORDER:
        raise Unsupported(f"layer model supports m <= {MAX_LAYER_ORDER}")


def layer_cover_search(m: int, q: int, total: int, *, node_cap: int | None = None,
                       time_cap: float | None = None, prune: bool = True) -> LayerCoverResult:
    """Find a QI subset of Z_{mq} of size ``total`` or show none exists.

    Requires Psi(m) = phi(m), which holds for m prime or m = p1 p2 (odd).
    ``prune=False`` drops the point-escape pruning (the hitting-set step
    still rejects surviving point classes); used to cross-check the pruning.
    """
    check_layer_group(m, q)
    t0 = time.monotonic()
    phi = GroupSpec.cyclic(m).phi
    deficit = q * phi - total
    res = LayerCoverResult(m, q, total, None)
    if deficit < 0:
        res.feasible = False
        return res
    pats = _deficit_patterns(deficit, q, phi)
    model = _model(m, max(0, phi - max((max(p) for p in pats if p), default=0)))
    group = _coordinate_group(m)
    full_mask = (1 << m) - 1
    maxesc = {s: max((model.escape[t].bit_count() for t in model.types.get(s, [])), default=0)
              for s in range(0, phi)}
    leaves = 0
    for pat in pats:
        sizes = [phi - d for d in pat]
        if not sizes:
            continue   # all layers full: every point class survives
        if prune and sum(maxesc[s] for s in sizes) < m:
            continue
        res.patterns.append(tuple(sizes))
        order = sorted(range(len(sizes)), key=lambda i: sizes[i])
        sizes = [sizes[i] for i in order]
        first = [t for t in model.types[sizes[0]] if all(_image(t, im) >= t for im in group)]

        def rec(i: int, chosen: list[int], esc: int, start: int):
            nonlocal leaves
            if time_cap is not None and time.monotonic() - t0 > time_cap:
                raise TimeoutError
            if i == len(sizes):
                if prune and esc != full_mask:
                    return None
                leaves += 1
                if node_cap is not None and leaves > node_cap:
                    raise TimeoutError
                common = model.keys(chosen[0])
                for t in chosen[1:]:
                    common = np.intersect1d(common, model.keys(t), assume_unique=True)
                fulls = model.hitting_full_layers(common.tolist(), q - len(chosen))
                return None if fulls is None else chosen + fulls
            if prune and esc.bit_count() + sum(maxesc[s] for s in sizes[i:]) < m:
                return None
            pool = first if i == 0 else model.types[sizes[i]]
            lo = start if i > 1 and sizes[i] == sizes[i - 1] else 0
            for j in range(lo, len(pool)):
                t = pool[j]
                got = rec(i + 1, chosen + [t], esc | model.escape[t], j if i > 0 else 0)
                if got is not None:
                    return got
            return None

        try:
            layers = rec(0, [], 0, 0)
        except TimeoutError:
            res.leaves, res.seconds = leaves, round(time.monotonic() - t0, 3)
            return res
        if layers is not None:
            els = sorted(crt_combine([c, y], [q, m]) for c, t in enumerate(layers)
                         for y in range(m) if t >> y & 1)
            W = Subset.of(GroupSpec.cyclic(m * q), els)
            if is_quasi_independent(W, d_cap=60, node_cap=50_000_000).quasi_independent is not True:
                raise AssertionError(f"layer-cover witness failed the tester: {W}")
            res.feasible = True
            res.witness = W
            res.leaves, res.seconds = leaves, round(time.monotonic() - t0, 3)
            return res
    res.feasible = False
    res.leaves, res.seconds = leaves, round(time.monotonic() - t0, 3)
    return res


def layer_criterion(E: Subset, m: int) -> bool:
    """QI of E in Z_{mq} through the layer-class criterion (independent of the tester's recursion)."""
    g = E.group
    n = g.n
    q = n // m
    check_layer_group(m, q)
    model = _model(m, m + 1)   # class keys only; no type tables
    layers = [0] * q
    for x in E.elements:
        layers[x % q] |= 1 << (x % m)
    common = None
    for t in layers:
        if not _layer_is_qi(model, t):
            return False
        k = model.keys(t) if t else np.empty(0, dtype=np.int64)
        common = k if common is None else np.intersect1d(common, k, assume_unique=True)
    return len(common) == 0


def _layer_is_qi(model: LayerModel, mask: int) -> bool:
    """A layer is QI iff distinct sign vectors give distinct classes (checked by brute force)."""
    els = [x for x in range(model.m) if mask >> x & 1]
    if not els:
        return True
    signs = model.signs_for(len(els))
    V = signs @ model.M[els]
    vanishing = np.all(V == 0, axis=1) & np.any(signs != 0, axis=1)
    return not vanishing.any()
