"""Permutation experiments: coordinate products versus random permutations.

    python scripts/perm_experiments.py --n 15 --random 10000
"""
from __future__ import annotations

import argparse
import itertools
import random
import sys
from collections import Counter
from dataclasses import dataclass

from qindep.groups import GroupSpec
from qindep.permutations import classify, coordinate_product, preserves_qi, random_perm


@dataclass
class Config:
    n: int = 15
    random: int = 10_000
    seed: int = 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in vars(Config()).items():
        ap.add_argument("--" + f, type=type(v), default=v)
    cfg = Config(**vars(ap.parse_args(argv)))
    g = GroupSpec.cyclic(cfg.n)
    mism = 0
    if g.is_square_free:
        prods = [coordinate_product(g, ps) for ps in
                 itertools.product(*(itertools.permutations(range(p)) for p in g.primes))]
        kept = sum(preserves_qi(s, "exhaustive").preserves for s in prods)
        mism += len(prods) - kept
        print(f"coordinate products: {kept}/{len(prods)} preserve QI")
    rng = random.Random(cfg.seed)
    sizes = Counter()
    for _ in range(cfg.random):
        s = random_perm(g, rng)
        rep = preserves_qi(s, "exhaustive")
        mism += (classify(s) is not None) != rep.preserves
        if rep.counterexample is not None:
            sizes[len(rep.counterexample)] += 1
    print(f"random permutations: {cfg.random}, classifier mismatches: {mism}")
    print("first counterexample size histogram:", dict(sorted(sizes.items())))
    return 1 if mism else 0


if __name__ == "__main__":
    sys.exit(main())
