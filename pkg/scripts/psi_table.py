"""Fill a Psi table for a range of n and print it.

    python scripts/psi_table.py --hi 60 --table psi-table.json
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from qindep.groups import GroupSpec
from qindep.psi import Budget, PsiTable, psi


@dataclass
class Config:
    lo: int = 2
    hi: int = 60
    table: str = "psi-table.json"
    time_cap: float = 60.0
    long_run: bool = False


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in vars(Config()).items():
        if isinstance(v, bool):
            ap.add_argument("--" + f.replace("_", "-"), dest=f, action="store_true")
        else:
            ap.add_argument("--" + f.replace("_", "-"), dest=f, type=type(v), default=v)
    cfg = Config(**vars(ap.parse_args(argv)))
    path = Path(cfg.table)
    table = PsiTable.load(path) if path.exists() else PsiTable()
    budget = Budget(time_cap=cfg.time_cap, long_run=cfg.long_run)
    for n in range(cfg.lo, cfg.hi + 1):
        e = psi(GroupSpec.cyclic(n), budget, table)
        print(f"{n:4d}  phi={GroupSpec.cyclic(n).phi:4d}  Psi={e.value:4d}  {e.status:11s} {e.provenance}", flush=True)
    table.save(path)
    print(f"saved {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
