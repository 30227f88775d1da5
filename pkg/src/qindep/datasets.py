"""Embedded example sets and their verification.

The 3 x 6 x 9 lattice example is stored as published: numbers 1..162,
where number N encodes layer L = (N-1) // 18, row r = ((N-1) % 18) // 6
and column c = (N-1) % 6.  Lattice coordinates are (r, c, L) in
Z_3 x Z_6 x Z_9.  Two listings of the set exist and they differ in one
entry of layer 8, so every reading is decoded and checked separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .groups import GroupSpec, InvalidInput, Subset
from .relations import IndependenceVerdict, is_quasi_independent

LATTICE_369 = GroupSpec.lattice(3, 6, 9)

# by layers, each layer offset by 18 * (layer - 1)
LAYERS_369 = (
    (1, 2, 3, 4, 7, 8, 9, 11, 18),
    (1, 3, 8, 10, 12, 13, 14, 15, 17, 18),
    (3, 4, 5, 6, 8, 9, 10, 11, 13),
    (2, 3, 8, 9, 10, 11, 12, 13, 16, 17),
    (1, 3, 4, 6, 9, 10, 11, 12, 14),
    (1, 2, 3, 4, 5, 7, 8, 12, 15, 17),
    (1, 3, 5, 6, 7, 8, 11, 12, 16),
    (2, 3, 4, 5, 6, 7, 9, 11, 14, 1),
    (1, 2, 4, 5, 7, 8, 9, 10, 18),
)

# the same example in lexicographic order
LEX_369 = (
    1, 2, 3, 4, 7, 8, 9, 11, 18, 21, 22, 23, 24, 26, 27, 28, 29, 31, 37, 39, 40,
    42, 45, 46, 47, 48, 50, 55, 56, 58, 59, 61, 62, 63, 64, 72, 73, 75, 77, 78,
    79, 80, 83, 84, 88, 92, 93, 94, 95, 96, 97, 99, 101, 104, 106, 109, 110, 111,
    112, 113, 115, 116, 120, 123, 125, 128, 129, 134, 135, 136, 137, 138, 139,
    142, 143, 145, 147, 152, 154, 156, 157, 158, 159, 161, 162,
)

DATASETS = ("lattice-3x6x9-85",)


def decode_number(N: int) -> int:
    """Published number 1..162 -> lattice index of (row, column, layer)."""
    if not 1 <= N <= 162:
        raise InvalidInput(f"dataset number {N} out of range 1..162")
    v = N - 1
    layer, r, c = v // 18, (v % 18) // 6, v % 6
    return LATTICE_369.index((r, c, layer))


def layer_numbers(layers) -> list[int]:
    return [x + 18 * i for i, layer in enumerate(layers) for x in layer]


def readings_369() -> dict[str, list[int]]:
    """Every documented reading of the example, as published numbers."""
    literal = layer_numbers(LAYERS_369)
    dropped = layer_numbers(LAYERS_369[:7] + (LAYERS_369[7][:-1],) + LAYERS_369[8:])
    return {
        "by-layers, layer 8 as printed (with 1)": literal,
        "by-layers, layer 8 without the trailing 1": dropped,
        "lexicographic listing": list(LEX_369),
    }


def decoded_layer(numbers: list[int], layer: int) -> list[int]:
    """Numbers of a 1-based layer, shifted back to 1..18."""
    lo = 18 * (layer - 1)
    return sorted(x - lo for x in numbers if lo < x <= lo + 18)


@dataclass(frozen=True)
class ReadingReport:
    name: str
    numbers: tuple[int, ...]
    subset: Subset
    verdict: IndependenceVerdict

    @property
    def cardinality(self) -> int:
        return len(self.subset)

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple(len(decoded_layer(list(self.numbers), k)) for k in range(1, 10))

    def to_json(self) -> dict:
        v = self.verdict
        out = {
            "reading": self.name,
            "cardinality": self.cardinality,
            "layer_sizes": list(self.layer_sizes),
            "verdict": v.label(),
            "relation_dimension": v.dimension,
        }
        if v.witness is not None:
            out["witness"] = v.witness.to_json()
        return out


@dataclass(frozen=True)
class DatasetReport:
    name: str
    readings: tuple[ReadingReport, ...]
    expected_size: int = 85
    notes: tuple[str, ...] = field(default=())

    @property
    def verified(self) -> tuple[ReadingReport, ...]:
        """Readings that give an expected-size quasi-independent set."""
        return tuple(r for r in self.readings
                     if r.cardinality == self.expected_size and r.verdict.quasi_independent is True)

    @property
    def ok(self) -> bool:
        return bool(self.verified)

    def to_json(self) -> dict:
        return {
            "dataset": self.name,
            "group": LATTICE_369.key(),
            "expected_cardinality": self.expected_size,
            "readings": [r.to_json() for r in self.readings],
            "verified_readings": [r.name for r in self.verified],
            "ok": self.ok,
        }

    def summary(self) -> str:
        lines = [f"{self.name} in {LATTICE_369}: expected cardinality {self.expected_size}"]
        for r in self.readings:
            lines.append(f"  {r.name}: {r.cardinality} elements, {r.verdict.label()}")
        if self.ok:
            lines.append("  verified by: " + "; ".join(r.name for r in self.verified))
        else:
            lines.append("  no reading gives a verified set of the expected size")
        return "\n".join(lines)


def dataset_subset(name: str, reading: str = "lexicographic listing") -> Subset:
    if name not in DATASETS:
        raise InvalidInput(f"unknown dataset {name!r}; known: {', '.join(DATASETS)}")
    nums = readings_369()[reading]
    return Subset.of(LATTICE_369, sorted({decode_number(x) for x in nums}))


def verify_dataset(name: str, *, d_cap: int = 40, node_cap: int = 20_000_000) -> DatasetReport:
    if name not in DATASETS:
        raise InvalidInput(f"unknown dataset {name!r}; known: {', '.join(DATASETS)}")
    out = []
    for label, nums in readings_369().items():
        idx = [decode_number(x) for x in nums]
        S = Subset.of(LATTICE_369, sorted(set(idx)))
        v = is_quasi_independent(S, d_cap=d_cap, node_cap=node_cap)
        out.append(ReadingReport(label, tuple(sorted(set(nums))), S, v))
    return DatasetReport(name, tuple(out))


# ------------------------------------------------------------ search seeds

# Quasi-independent subsets found by search (scripts/find_witness.py), as residues.
CYCLIC_SEEDS: dict[int, tuple[int, ...]] = {
    105: (1, 3, 6, 8, 13, 15, 16, 18, 19, 20, 21, 22, 25, 26, 30, 32, 33, 34, 35, 37, 40, 44, 49, 54,
          57, 60, 61, 62, 63, 64, 66, 67, 69, 70, 72, 73, 74, 75, 76, 77, 80, 81, 82, 87, 88, 93, 94,
          97, 98, 99, 100, 101),
}


def cyclic_seed(g: GroupSpec):
    """Embedded lower-bound witness for Z_n, if any (re-verified by the caller)."""
    from .psi import PsiEntry

    if not g.is_cyclic or g.n not in CYCLIC_SEEDS:
        return None
    w = Subset.of(g, CYCLIC_SEEDS[g.n])
    return PsiEntry(g, len(w), "lower-bound", w, "dataset(search seed)")


def lattice_seed(g: GroupSpec):
    from .psi import PsiEntry

    if g != LATTICE_369:
        return None
    w = dataset_subset("lattice-3x6x9-85")
    return PsiEntry(g, len(w), "lower-bound", w, "dataset(lattice-3x6x9-85)")
