"""Search for a large quasi-independent subset of Z_{m q} (m = p1 p2 odd, q prime).

Layers along the Z_q axis are subsets L_0..L_{q-1} of Z_m.  E is QI iff every
layer is QI and no nonzero class of Q[X]/Phi_m is a signed sum over every
layer at once.  A size-phi(m) layer is a basis, so its signed sums contain
every point class: the smaller layers must jointly "uncover" all points.

The search hill-climbs over the small layers; for a fixed choice the best
full-size layers are an exact small set-cover problem.

    python scripts/find_witness.py --m 15 --q 7 --target 52 --seed 9
"""
from __future__ import annotations

import argparse
import itertools
import random
import sys
import time
from dataclasses import dataclass

import numpy as np

from qindep.cyclotomic import power_residues
from qindep.groups import GroupSpec, Subset, crt_combine
from qindep.oracle import oracle_qi_table
from qindep.relations import is_quasi_independent


@dataclass
class Config:
    m: int = 15
    q: int = 7
    target: int = 52
    seed: int = 9
    seconds: float = 1200.0
    patterns: str = "7777,677"
    candidates: int = 40
    patience: int = 30


class LayerModel:
    def __init__(self, m: int, min_size: int):
        g = GroupSpec.cyclic(m)
        self.m = m
        self.phi = g.phi
        self.qi = oracle_qi_table(g)
        self.M = np.array(power_residues(m), dtype=np.int64)  # row x: X^x mod Phi_m
        span = int(np.abs(self.M).sum(axis=0).max()) + 1
        self.weights = (2 * span + 1) ** np.arange(self.phi)
        self.span = span
        self.types: dict[int, list[int]] = {}
        for mask in range(1, 1 << m):
            b = mask.bit_count()
            if min_size <= b <= self.phi and self.qi[mask]:
                self.types.setdefault(b, []).append(mask)
        self.signs = {k: np.array(list(itertools.product((-1, 0, 1), repeat=k)), dtype=np.int64)
                      for k in range(min_size, self.phi + 1)}
        self.S = {mask: self.keys(mask) for b, ms in self.types.items() if b < self.phi for mask in ms}
        self.bases = self.types[self.phi]
        self.all = (1 << len(self.bases)) - 1
        self.contain: dict[int, int] = {}
        for i, mask in enumerate(self.bases):
            for k in self.keys(mask).tolist():
                self.contain[k] = self.contain.get(k, 0) | (1 << i)
        self.extendable = {mask: sum(1 << x for x in range(m) if not mask >> x & 1 and self.qi[mask | 1 << x])
                           for mask in self.S}
        self.by_point = {(b, x): [t for t in self.types[b] if self.extendable[t] >> x & 1]
                         for b in self.types if b < self.phi for x in range(m)}
        self.point_of = {}
        for x in range(m):
            for sgn in (1, -1):
                self.point_of[self._key(sgn * self.M[x])] = x

    def _key(self, v) -> int:
        return int(((v + self.span) * self.weights).sum())

    def keys(self, mask: int) -> np.ndarray:
        els = [x for x in range(self.m) if mask >> x & 1]
        V = self.signs[len(els)] @ self.M[els]
        V = V[np.any(V != 0, axis=1)]
        return np.unique(((V + self.span) * self.weights).sum(axis=1))

    def evaluate(self, small: list[int], nbig: int):
        """(classes left, chosen bases, leftover class keys) for the best choice of bases."""
        common = self.S[small[0]]
        for t in small[1:]:
            common = np.intersect1d(common, self.S[t], assume_unique=True)
        common = common.tolist()
        if not common:
            return 0, [], []
        pattern: dict[int, int] = {}
        for j, c in enumerate(common):
            km = self.all & ~self.contain.get(c, 0)
            while km:
                low = km & -km
                b = low.bit_length() - 1
                pattern[b] = pattern.get(b, 0) | (1 << j)
                km ^= low
        rows: dict[int, int] = {}
        for b, v in pattern.items():
            rows.setdefault(v, b)
        ks = sorted(rows, key=lambda a: -a.bit_count())
        ks = [a for a in ks if not any(b != a and (a | b) == b for b in ks)][:45]
        full = (1 << len(common)) - 1
        best = (len(common), [], common)
        for combo in itertools.combinations(ks, min(nbig, len(ks))):
            left = full
            for a in combo:
                left &= ~a
            if left.bit_count() < best[0]:
                best = (left.bit_count(), [self.bases[rows[a]] for a in combo],
                        [common[j] for j in range(len(common)) if left >> j & 1])
                if not left:
                    break
        return best


def search(cfg: Config, log=print) -> Subset | None:
    pats = [tuple(int(c) for c in p) for p in cfg.patterns.split(",")]
    model = LayerModel(cfg.m, min(min(p) for p in pats))
    rng = random.Random(cfg.seed)
    t0 = time.time()
    g = GroupSpec.cyclic(cfg.m * cfg.q)
    while time.time() - t0 < cfg.seconds:
        pat = rng.choice(pats)
        nbig = cfg.q - len(pat)
        small = [rng.choice(model.types[s]) for s in pat]
        cur, big, rest = model.evaluate(small, nbig)
        stall = 0
        while cur and stall < cfg.patience and time.time() - t0 < cfg.seconds:
            c = rng.randrange(len(small))
            pts = [model.point_of[r] for r in rest if r in model.point_of]
            pool = model.by_point[(pat[c], rng.choice(pts))] if pts and rng.random() < 0.7 else model.types[pat[c]]
            best = None
            for t in rng.sample(pool, min(cfg.candidates, len(pool))):
                trial = small[:c] + [t] + small[c + 1:]
                val, b2, r2 = model.evaluate(trial, nbig)
                if best is None or val < best[0]:
                    best = (val, trial, b2, r2)
            stall = stall + 1 if best[0] >= cur else 0
            if best[0] <= cur:
                cur, small, big, rest = best
        log(f"pattern {pat}: {cur} classes left ({time.time() - t0:.1f}s)")
        if cur:
            continue
        layers = small + big + [rng.choice(model.bases) for _ in range(nbig - len(big))]
        els = sorted(crt_combine([c, y], [cfg.q, cfg.m]) for c, t in enumerate(layers)
                     for y in range(cfg.m) if t >> y & 1)
        E = Subset.of(g, els)
        if len(E) >= cfg.target and is_quasi_independent(E, d_cap=60, node_cap=50_000_000).quasi_independent:
            return E
    return None


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in vars(Config()).items():
        ap.add_argument("--" + f, type=type(v), default=v)
    cfg = Config(**vars(ap.parse_args(argv)))
    E = search(cfg, log=lambda s: print(s, flush=True))
    if E is None:
        print("no witness found within the time limit")
        return 2
    print(f"found {len(E)} elements, verified quasi-independent:")
    print(E)
    return 0


if __name__ == "__main__":
    sys.exit(main())
