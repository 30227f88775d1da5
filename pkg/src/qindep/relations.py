"""Relation spaces, structured bases and the quasi-independence tester.

Every group is reduced to an *axis group*: a product of cyclic axes whose
relation space is spanned by full lines along each axis.  A square-free Z_n
is the axis group of its primes (via CRT); a lattice is its own axis group;
a general Z_n splits over the cosets of its radical subgroup into copies of
the square-free Z_{n~}.

Decision pipeline for a subset E:

1. small-set fast paths (cyclic groups only),
2. split over cosets of Z_{n~},
3. Empty Floor: if E misses a layer along some axis, recurse into layers,
4. otherwise restrict the relation space to E (exact RREF) and search the
   restricted subspace for a {0, +-1} vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import prod
from typing import Iterable, Mapping, Sequence

from . import linalg
from .cyclotomic import cyclotomic_is_relation
from .groups import BitPermuter, GroupSpec, InvalidInput, Subset, bits, mask_of

DEFAULT_D_CAP = 24
DEFAULT_NODE_CAP = 2_000_000


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class Relation:
    group: GroupSpec
    coefficients: Mapping[int, Fraction] = field(hash=False)

    def __post_init__(self):
        clean = {int(x): Fraction(c) for x, c in self.coefficients.items() if c}
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coefficients)

    @property
    def is_quasi(self) -> bool:
        return all(c in (1, -1) for c in self.coefficients.values())

    def is_zero(self) -> bool:
        return not self.coefficients

    def vector(self) -> list[Fraction]:
        v = [Fraction(0)] * self.group.order
        for x, c in self.coefficients.items():
            v[x] = c
        return v

    def to_json(self) -> dict[str, str]:
        return {str(x): str(c) for x, c in self.coefficients.items()}

    @classmethod
    def from_json(cls, g: GroupSpec, data: Mapping[str, str]) -> "Relation":
        return cls(g, {int(k): Fraction(v) for k, v in data.items()})

    @classmethod
    def indicator(cls, g: GroupSpec, elements: Iterable[int], sign: int = 1) -> "Relation":
        return cls(g, {x: Fraction(sign) for x in elements})

    def __add__(self, other: "Relation") -> "Relation":
        out = dict(self.coefficients)
        for x, c in other.coefficients.items():
            out[x] = out.get(x, 0) + c
        return Relation(self.group, out)

    def __neg__(self) -> "Relation":
        return Relation(self.group, {x: -c for x, c in self.coefficients.items()})

    def __sub__(self, other: "Relation") -> "Relation":
        return self + (-other)


def lattice_is_relation(g: GroupSpec, coeffs: Mapping[int, Fraction | int]) -> bool:
    """Membership in the span of axis lines, via the tensor of quotient maps.

    Q^d -> Q^d / <1> sends e_x to e_x (x < d-1) and e_{d-1} to -(e_0+...).
    The span of lines is exactly the kernel of the tensor product of these maps.
    """
    acc: dict[tuple[int, ...], Fraction] = {}
    for x, c in coeffs.items():
        if not c:
            continue
        parts = []
        for a, d in zip(g.coords(x), g.dims):
            if a < d - 1:
                parts.append([(a, 1)])
            else:
                parts.append([(i, -1) for i in range(d - 1)])
        for combo in product(*parts):
            key = tuple(i for i, _ in combo)
            s = prod(v for _, v in combo)
            acc[key] = acc.get(key, 0) + c * s
    return not any(acc.values())


def is_relation(g: GroupSpec, coeffs: Mapping[int, Fraction | int]) -> bool:
    """Independent membership check: cyclotomic for Z_n, tensor map for lattices."""
    if g.is_cyclic:
        return cyclotomic_is_relation(g, coeffs)
    return lattice_is_relation(g, coeffs)


# ------------------------------------------------------------- axis groups


class AxisSpace:
    """Product of cyclic axes with the line-span relation convention."""

    def __init__(self, dims: tuple[int, ...]):
        self.dims = dims
        self.N = prod(dims)
        strides, s = [], 1
        for d in reversed(dims):
            strides.append(s)
            s *= d
        self.strides = tuple(reversed(strides))
        self.full = (1 << self.N) - 1

    def coords(self, i: int) -> tuple[int, ...]:
        return tuple((i // s) % d for s, d in zip(self.strides, self.dims))

    def index(self, c: Sequence[int]) -> int:
        return sum(a * s for a, s in zip(c, self.strides))

    @cached_property
    def phi(self) -> int:
        return prod(d - 1 for d in self.dims)

    def lines(self, axis: int) -> list[tuple[int, ...]]:
        """All lines along ``axis`` as sorted index tuples."""
        d, st = self.dims[axis], self.strides[axis]
        out = []
        for i in range(self.N):
            if (i // st) % d == 0:
                out.append(tuple(i + k * st for k in range(d)))
        return out

    @cached_property
    def layers(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """layers[j][c] = global indices with coordinate j equal to c, in local order."""
        out = []
        for j, (d, st) in enumerate(zip(self.dims, self.strides)):
            per = [[] for _ in range(d)]
            for i in range(self.N):
                per[(i // st) % d].append(i)
            out.append(tuple(tuple(p) for p in per))
        return tuple(out)

    @cached_property
    def local_of(self) -> tuple[tuple[int, ...], ...]:
        """local_of[j][i] = position of global index i inside its axis-j layer."""
        out = []
        for per in self.layers:
            pos = [0] * self.N
            for layer in per:
                for k, i in enumerate(layer):
                    pos[i] = k
            out.append(tuple(pos))
        return tuple(out)

    @cached_property
    def split_order(self) -> tuple[int, ...]:
        """Axes by decreasing dimension; ties broken toward the later axis."""
        return tuple(sorted(range(len(self.dims)), key=lambda j: (-self.dims[j], -j)))

    @cached_property
    def layer_major(self) -> tuple[BitPermuter, ...]:
        """Per axis: permuter placing layer c's bits (in local order) at offset c * N / d."""
        out = []
        for j, d in enumerate(self.dims):
            size = self.N // d
            pos = self.local_of[j]
            st = self.strides[j]
            out.append(BitPermuter([((i // st) % d) * size + pos[i] for i in range(self.N)]))
        return tuple(out)

    @cached_property
    def layer_masks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(mask_of(p) for p in per) for per in self.layers)

    @cached_property
    def line_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(l) for j in range(len(self.dims)) for l in self.lines(j))

    def sub(self, axis: int) -> "AxisSpace":
        return axis_space(self.dims[:axis] + self.dims[axis + 1:])

    def split_axis(self) -> int:
        """Axis used for the spike/layer decomposition: the largest dimension."""
        return max(range(len(self.dims)), key=lambda j: (self.dims[j], j))

    @cached_property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        """Structured basis: lines along the split axis plus layer bases for layers != 0.

        Every vector is the characteristic function of a line, stored as its
        sorted index tuple.
        """
        if not self.dims:
            return ()
        j = self.split_axis()
        out = list(self.lines(j))
        subspace = self.sub(j)
        for c in range(1, self.dims[j]):
            glob = self.layers[j][c]
            for vec in subspace.basis:
                out.append(tuple(glob[i] for i in vec))
        return tuple(out)

    @cached_property
    def annihilator(self) -> tuple[tuple[int, ...], ...]:
        """Integer rows whose common kernel is the span of ``basis``."""
        if not self.basis:
            return tuple(tuple(int(i == j) for j in range(self.N)) for i in range(self.N))
        rows = []
        for vec in self.basis:
            r = [0] * self.N
            for i in vec:
                r[i] = 1
            rows.append(r)
        return tuple(tuple(r) for r in linalg.integer_nullspace_rows(rows, self.N))


@lru_cache(maxsize=None)
def axis_space(dims: tuple[int, ...]) -> AxisSpace:
    return AxisSpace(dims)


@dataclass
class BlockResult:
    qi: bool | None          # None: undecided under caps
    dim: int                 # dimension of relations supported on the block
    qwit: dict[int, int] | None = None        # local quasi-relation
    rwit: dict[int, Fraction] | None = None   # local rational relation
    nodes: int = 0
    method: str = "coset-recursion"


@dataclass(frozen=True)
class Caps:
    d_cap: int = DEFAULT_D_CAP
    node_cap: int = DEFAULT_NODE_CAP


_DEFAULT_CAPS = Caps()
_BLOCK_CACHE: dict[tuple[tuple[int, ...], int], BlockResult] = {}
_BLOCK_CACHE_LIMIT = 3_000_000


def clear_caches() -> None:
    _BLOCK_CACHE.clear()


def _block_la(space: AxisSpace, mask: int, caps: Caps, method: str = "subspace-enumeration") -> BlockResult:
    cols = bits(mask)
    ker = linalg.restricted_kernel(space.annihilator, cols)
    d = ker.dimension
    if d == 0:
        return BlockResult(True, 0, method=method)
    rvec = ker.vector({ker.free[0]: 1})
    rwit = {cols[i]: v for i, v in enumerate(rvec) if v}
    if d > caps.d_cap:
        return BlockResult(None, d, None, rwit, 0, method)
    try:
        vec, nodes = linalg.find_signed_vector(ker, caps.node_cap)
    except linalg.EnumerationLimit:
        return BlockResult(None, d, None, rwit, caps.node_cap, method)
    if vec is None:
        return BlockResult(True, d, None, rwit, nodes, method)
    return BlockResult(False, d, {cols[i]: v for i, v in enumerate(vec) if v}, rwit, nodes, method)


def _decide_axes(space: AxisSpace, mask: int, caps: Caps = _DEFAULT_CAPS, *, store: bool = True) -> BlockResult:
    """Empty Floor recursion on an axis group, linear algebra on irreducible blocks.

    Sub-block results are memoized; ``store=False`` skips caching the top-level mask.
    """
    if mask == 0 or not space.dims:
        return BlockResult(True, 0)
    key = None
    if caps is _DEFAULT_CAPS:
        key = (space.dims, mask)
        hit = _BLOCK_CACHE.get(key)
        if hit is not None:
            return hit
    res = _decide_axes_uncached(space, mask, caps)
    if key is not None and store:
        if len(_BLOCK_CACHE) > _BLOCK_CACHE_LIMIT:
            _BLOCK_CACHE.clear()
        _BLOCK_CACHE[key] = res
    return res


def _decide_axes_uncached(space: AxisSpace, mask: int, caps: Caps) -> BlockResult:
    dims = space.dims
    if len(dims) == 1:
        if mask == space.full:
            full = {i: 1 for i in range(space.N)}
            return BlockResult(False, 1, full, {i: Fraction(1) for i in range(space.N)})
        return BlockResult(True, 0)
    # largest dimension first; ties broken toward the later axis
    for j in space.split_order:
        d = dims[j]
        size = space.N // d
        low = (1 << size) - 1
        pm = space.layer_major[j](mask)
        parts = [(pm >> (c * size)) & low for c in range(d)]
        if all(parts):
            continue
        sub = space.sub(j)
        qi, dim, nodes = True, 0, 0
        qwit = rwit = None
        undecided = False
        for c, local in enumerate(parts):
            if not local:
                continue
            glob = space.layers[j][c]
            r = _decide_axes(sub, local, caps)
            nodes += r.nodes
            dim += r.dim
            if r.rwit and rwit is None:
                rwit = {glob[i]: v for i, v in r.rwit.items()}
            if r.qi is False and qwit is None:
                qwit = {glob[i]: v for i, v in r.qwit.items()}
                qi = False
            elif r.qi is None:
                undecided = True
        if qi and undecided:
            qi = None
        return BlockResult(qi, dim, qwit, rwit, nodes)
    return _block_la(space, mask, caps)


# -------------------------------------------------------- group adapters


@lru_cache(maxsize=None)
def _cyclic_axis_maps(n: int) -> tuple[AxisSpace, tuple[int, ...], tuple[int, ...]]:
    """For square-free n: (space, residue->axis index, axis index->residue)."""
    g = GroupSpec.cyclic(n)
    primes = g.primes
    space = axis_space(tuple(primes))
    to_axis = tuple(space.index([x % p for p in primes]) for x in range(n))
    from_axis = [0] * n
    for x, i in enumerate(to_axis):
        from_axis[i] = x
    return space, to_axis, tuple(from_axis)


@lru_cache(maxsize=None)
def _axis_permuter(n: int) -> BitPermuter:
    return BitPermuter(_cyclic_axis_maps(n)[1])


@lru_cache(maxsize=None)
def _coset_major(n: int, r: int) -> BitPermuter:
    step = n // r
    return BitPermuter([(x % step) * r + x // step for x in range(n)])


def radical_pieces(g: GroupSpec, mask: int) -> list[tuple[int, int]]:
    """Split a cyclic subset over cosets of Z_{n~}: list of (rep y, residue mask in Z_{n~})."""
    n, r = g.n, g.radical
    pm = _coset_major(n, r)(mask)
    low = (1 << r) - 1
    return [(y, (pm >> (y * r)) & low) for y in range(n // r)]


def _decide_squarefree(n: int, residue_mask: int, caps: Caps, store: bool = True) -> tuple[BlockResult, tuple[int, ...]]:
    space, to_axis, from_axis = _cyclic_axis_maps(n)
    return _decide_axes(space, _axis_permuter(n)(residue_mask), caps, store=store), from_axis


def _decide_cyclic(g: GroupSpec, mask: int, caps: Caps) -> BlockResult:
    n, r = g.n, g.radical
    if r == n:
        res, from_axis = _decide_squarefree(n, mask, caps, store=False)
        return _relabel(res, from_axis)
    step = n // r
    qi, dim, nodes = True, 0, 0
    qwit = rwit = None
    undecided = False
    for y, local in radical_pieces(g, mask):
        if not local:
            continue
        res, from_axis = _decide_squarefree(r, local, caps)
        nodes += res.nodes
        dim += res.dim

        def lift(i: int, y=y, from_axis=from_axis) -> int:
            return y + step * from_axis[i]

        if res.rwit and rwit is None:
            rwit = {lift(i): v for i, v in res.rwit.items()}
        if res.qi is False and qwit is None:
            qi = False
            qwit = {lift(i): v for i, v in res.qwit.items()}
        elif res.qi is None:
            undecided = True
    if qi and undecided:
        qi = None
    return BlockResult(qi, dim, qwit, rwit, nodes)


def _relabel(res: BlockResult, from_axis: Sequence[int]) -> BlockResult:
    return BlockResult(
        res.qi, res.dim,
        {from_axis[i]: v for i, v in res.qwit.items()} if res.qwit else None,
        {from_axis[i]: v for i, v in res.rwit.items()} if res.rwit else None,
        res.nodes, res.method,
    )


def _decide(g: GroupSpec, mask: int, caps: Caps) -> BlockResult:
    if g.is_cyclic:
        return _decide_cyclic(g, mask, caps)
    return _decide_axes(axis_space(g.dims), mask, caps, store=False)


# ------------------------------------------------------------ public API


@dataclass(frozen=True)
class RelationBasis:
    group: GroupSpec
    vectors: tuple[Relation, ...]

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    @cached_property
    def annihilator(self) -> tuple[tuple[int, ...], ...]:
        g = self.group
        rows = [[int(c) if c.denominator == 1 else c for c in v.vector()] for v in self.vectors]
        if not rows:
            return tuple(tuple(int(i == j) for j in range(g.order)) for i in range(g.order))
        return tuple(tuple(r) for r in linalg.integer_nullspace_rows(rows, g.order))


@lru_cache(maxsize=256)
def structured_basis(g: GroupSpec) -> RelationBasis:
    """Coset-characteristic basis of the relation space.

    Square-free Z_n: cosets of Z_p for the largest prime p, plus (recursively)
    bases on every coset H + k, k != 0, of the complementary subgroup H.
    General Z_n: the square-free basis copied into each coset of Z_{n~}.
    Lattices: the same recursion over layers.
    """
    if not g.is_cyclic:
        space = axis_space(g.dims)
        return RelationBasis(g, tuple(Relation.indicator(g, v) for v in space.basis))
    n, r = g.n, g.radical
    space, _, from_axis = _cyclic_axis_maps(r)
    step = n // r
    vecs = []
    for y in range(step):
        for v in space.basis:
            vecs.append(Relation.indicator(g, (y + step * from_axis[i] for i in v)))
    return RelationBasis(g, tuple(vecs))


@dataclass(frozen=True)
class SupportSubspace:
    """Relations supported on E, in pivot form over the columns of E."""

    group: GroupSpec
    columns: tuple[int, ...]
    kernel: linalg.RestrictedKernel

    @property
    def dimension(self) -> int:
        return self.kernel.dimension

    @property
    def free_elements(self) -> tuple[int, ...]:
        return tuple(self.columns[i] for i in self.kernel.free)

    def relation(self, values: Mapping[int, int | Fraction]) -> Relation:
        """Subspace vector with the given values on ``free_elements``."""
        local = {self.columns.index(x): v for x, v in values.items()}
        vec = self.kernel.vector(local)
        return Relation(self.group, {self.columns[i]: c for i, c in enumerate(vec) if c})

    def basis(self) -> list[Relation]:
        return [self.relation({x: 1}) for x in self.free_elements]


def restrict_to_support(basis: RelationBasis, E: Subset) -> SupportSubspace:
    if E.group != basis.group:
        raise InvalidInput("subset and basis live in different groups")
    cols = E.elements
    return SupportSubspace(basis.group, cols, linalg.restricted_kernel(basis.annihilator, cols))


@dataclass(frozen=True)
class IndependenceVerdict:
    quasi_independent: bool | None
    independent: bool | None
    witness: Relation | None = None          # quasi-relation on E when not QI
    relation: Relation | None = None         # rational relation on E when not independent
    method: str = "coset-recursion"
    dimension: int | None = None             # dim of relations supported on E
    nodes: int = 0

    @property
    def undecided(self) -> bool:
        return self.quasi_independent is None

    def label(self) -> str:
        if self.quasi_independent is None:
            return "undecided"
        if self.independent:
            return "independent"
        if self.quasi_independent:
            return "quasi-independent"
        return "not quasi-independent"


class WitnessError(AssertionError):
    """A produced witness failed the independent membership check."""


def _checked(E: Subset, coeffs: Mapping[int, Fraction | int] | None, quasi: bool) -> Relation | None:
    if coeffs is None:
        return None
    rel = Relation(E.group, coeffs)
    if rel.is_zero() or any(x not in E for x in rel.support):
        raise WitnessError(f"witness not supported on E: {rel.coefficients}")
    if quasi and not rel.is_quasi:
        raise WitnessError("quasi-witness has entries outside {0, +-1}")
    if not is_relation(E.group, rel.coefficients):
        raise WitnessError(f"witness does not vanish: {rel.coefficients}")
    return rel


def _fast_path(E: Subset) -> IndependenceVerdict | None:
    g = E.group
    k = len(E)
    if k == 0:
        return IndependenceVerdict(True, True, method="fast-path", dimension=0)
    if not g.is_cyclic:
        return None
    p1 = g.primes[0]
    if k < p1:
        return IndependenceVerdict(True, True, method="fast-path", dimension=0)
    c = E.contains_coset()
    if c is not None:
        w = Relation.indicator(g, c.elements)
        return IndependenceVerdict(False, False, w, w, "fast-path")
    if k == p1:
        # not a coset (checked above) of Z_{p1}: independent
        return IndependenceVerdict(True, True, method="fast-path", dimension=0)
    if g.is_square_free and g.n % 2 and len(g.primes) >= 2 and k < p1 + g.primes[1] - 2:
        # contains no coset: quasi-independent; independence left to linear algebra
        return IndependenceVerdict(True, None, method="fast-path")
    return None


def _verdict(E: Subset, res: BlockResult, method: str | None = None) -> IndependenceVerdict:
    qwit = _checked(E, res.qwit, True) if res.qi is False else None
    rwit = _checked(E, res.rwit, False) if res.dim > 0 else None
    return IndependenceVerdict(
        res.qi, res.dim == 0, qwit, rwit, method or res.method, res.dim, res.nodes
    )


def is_quasi_independent(
    E: Subset,
    *,
    fast_paths: bool = True,
    d_cap: int = DEFAULT_D_CAP,
    node_cap: int = DEFAULT_NODE_CAP,
) -> IndependenceVerdict:
    """Decide quasi-independence (and independence) of E with a verified witness."""
    caps = _DEFAULT_CAPS if (d_cap, node_cap) == (DEFAULT_D_CAP, DEFAULT_NODE_CAP) else Caps(d_cap, node_cap)
    if fast_paths:
        v = _fast_path(E)
        if v is not None:
            if v.independent is None:
                res = _decide(E.group, E.mask, caps)
                rwit = _checked(E, res.rwit, False) if res.dim > 0 else None
                return IndependenceVerdict(True, res.dim == 0, None, rwit, "fast-path", res.dim, res.nodes)
            return v
    return _verdict(E, _decide(E.group, E.mask, caps))


def coset_reduction_test(E: Subset, *, d_cap: int = DEFAULT_D_CAP, node_cap: int = DEFAULT_NODE_CAP) -> IndependenceVerdict:
    """Radical-coset split and Empty Floor recursion only (no small-set shortcuts)."""
    return is_quasi_independent(E, fast_paths=False, d_cap=d_cap, node_cap=node_cap)


def linear_algebra_test(E: Subset, *, d_cap: int = DEFAULT_D_CAP, node_cap: int = DEFAULT_NODE_CAP) -> IndependenceVerdict:
    """Whole-group route: restrict the structured basis to E and enumerate, no decomposition."""
    if not E.elements:
        return IndependenceVerdict(True, True, method="subspace-enumeration", dimension=0)
    sub = restrict_to_support(structured_basis(E.group), E)
    ker = sub.kernel
    caps = Caps(d_cap, node_cap)
    # reuse the block routine on an ad hoc kernel
    d = ker.dimension
    rwit = None
    if d:
        rwit = {sub.columns[i]: v for i, v in enumerate(ker.vector({ker.free[0]: 1})) if v}
    if d == 0:
        res = BlockResult(True, 0, method="subspace-enumeration")
    elif d > caps.d_cap:
        res = BlockResult(None, d, None, rwit, 0, "subspace-enumeration")
    else:
        try:
            vec, nodes = linalg.find_signed_vector(ker, caps.node_cap)
        except linalg.EnumerationLimit:
            res = BlockResult(None, d, None, rwit, caps.node_cap, "subspace-enumeration")
        else:
            q = {sub.columns[i]: v for i, v in enumerate(vec) if v} if vec else None
            res = BlockResult(vec is None, d, q, rwit, nodes, "subspace-enumeration")
    return _verdict(E, res)


def is_independent(E: Subset) -> tuple[bool, Relation | None]:
    res = _decide(E.group, E.mask, Caps(d_cap=-1))  # dimension only; skip the signed search
    if res.dim == 0:
        return True, None
    return False, _checked(E, res.rwit, False)


def qi_flag(g: GroupSpec, mask: int, *, fast_paths: bool = True) -> bool | None:
    """Verdict-only entry point over a bitmask (no witness objects built)."""
    if mask == 0:
        return True
    if fast_paths and g.is_cyclic:
        k = mask.bit_count()
        p1 = g.primes[0]
        if k < p1:
            return True
        for cm in _coset_masks(g):
            if mask & cm == cm:
                return False
        if k == p1:
            return True
        if g.is_square_free and g.n % 2 and len(g.primes) >= 2 and k < p1 + g.primes[1] - 2:
            return True
    return _decide(g, mask, _DEFAULT_CAPS).qi


def independence_flag(g: GroupSpec, mask: int) -> bool:
    if mask == 0:
        return True
    if g.is_cyclic and mask.bit_count() > g.phi:
        return False
    return _decide(g, mask, _DEFAULT_CAPS).dim == 0


@lru_cache(maxsize=None)
def _coset_masks(g: GroupSpec) -> tuple[int, ...]:
    from .groups import prime_coset_masks
    return prime_coset_masks(g)
