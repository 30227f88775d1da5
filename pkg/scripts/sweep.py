"""Compare the tester against the sign-vector oracle over every small subset of Z_n.

    python scripts/sweep.py --lo 3 --hi 24 --max-size 10
"""
from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass

from qindep.groups import GroupSpec
from qindep.oracle import oracle_qi_table
from qindep.relations import qi_flag


@dataclass
class Config:
    lo: int = 3
    hi: int = 24
    max_size: int = 10


def sweep(cfg: Config) -> int:
    total_bad = 0
    for n in range(cfg.lo, cfg.hi + 1):
        t0 = time.time()
        g = GroupSpec.cyclic(n)
        table = oracle_qi_table(g)
        count = bad = 0
        for k in range(min(n, cfg.max_size) + 1):
            for c in itertools.combinations(range(n), k):
                m = sum(1 << x for x in c)
                count += 1
                if qi_flag(g, m) != bool(table[m]):
                    bad += 1
                    print(f"  mismatch on Z_{n}: {c}")
        total_bad += bad
        print(f"Z_{n}: {count} subsets, {bad} mismatches ({time.time() - t0:.1f}s)", flush=True)
    return total_bad


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in vars(Config()).items():
        ap.add_argument("--" + f.replace("_", "-"), dest=f, type=type(v), default=v)
    return 1 if sweep(Config(**vars(ap.parse_args(argv)))) else 0


if __name__ == "__main__":
    sys.exit(main())
