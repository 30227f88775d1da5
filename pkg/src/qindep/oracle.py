"""Ground-truth quasi-independence by enumerating sign vectors.

Each element is mapped to an integer evaluation vector: X^x mod Phi_n for
cyclic groups, the tensor of quotient maps for lattices.  A sign vector
eps in {-1,0,1}^E is a quasi-relation iff sum eps_x v_x == 0.  All 3^|E|
sign vectors are covered by a meet-in-the-middle split: every sign vector
is a pair of half-vectors whose sums cancel.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .cyclotomic import power_residues
from .groups import GroupSpec, Subset

DEFAULT_ORACLE_CAP = 14
TABLE_CAP = 24


class OracleRefused(ValueError):
    pass


@lru_cache(maxsize=64)
def evaluation_vectors(g: GroupSpec) -> np.ndarray:
    """Row x = integer image of element x in a space of dimension phi."""
    if g.is_cyclic:
        return np.array(power_residues(g.n), dtype=np.int64).reshape(g.n, -1)
    rows = []
    for x in range(g.order):
        vec = np.ones(1, dtype=np.int64)
        for a, d in zip(g.coords(x), g.dims):
            part = np.zeros(d - 1, dtype=np.int64)
            if a < d - 1:
                part[a] = 1
            else:
                part[:] = -1
            vec = np.kron(vec, part)
        rows.append(vec)
    return np.array(rows, dtype=np.int64)


def _signed_sums(vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All 3^k signed sums of the rows of ``vecs``, plus their support bitmasks."""
    k = vecs.shape[0]
    if k == 0:
        return np.zeros((1, vecs.shape[1]), dtype=np.int64), np.zeros(1, dtype=np.int64)
    signs = np.array(list(product((0, 1, -1), repeat=k)), dtype=np.int64)
    supp = (signs != 0).astype(np.int64) @ (1 << np.arange(k, dtype=np.int64))
    return signs @ vecs, supp


def _keys(sums: np.ndarray) -> np.ndarray:
    """Hashable row keys (byte strings of the int64 rows)."""
    sums = np.ascontiguousarray(sums)
    return sums.view(np.dtype((np.void, sums.dtype.itemsize * sums.shape[1]))).ravel()


def oracle_is_quasi_independent(E: Subset, cap: int = DEFAULT_ORACLE_CAP) -> bool:
    """True iff no nonzero sign vector on E gives a vanishing sum."""
    k = len(E)
    if k > cap:
        raise OracleRefused(f"|E| = {k} exceeds oracle cap {cap}")
    if k == 0:
        return True
    vecs = evaluation_vectors(E.group)[list(E.elements)]
    h = k // 2
    left, lsupp = _signed_sums(vecs[:h])
    right, rsupp = _signed_sums(vecs[h:])
    lkeys = {}
    for key, s in zip(_keys(left).tolist(), lsupp.tolist()):
        lkeys.setdefault(key, []).append(s)
    for key, s in zip(_keys(-right).tolist(), rsupp.tolist()):
        for t in lkeys.get(key, ()):
            if s or t:
                return False
    return True


def oracle_qi_table(g: GroupSpec) -> np.ndarray:
    """Boolean table indexed by bitmask: True iff that subset is quasi-independent.

    Every quasi-relation of the whole group is found by matching half sums;
    its support is marked non-QI and the marks are closed upward over supersets.
    """
    n = g.order
    if n > TABLE_CAP:
        raise OracleRefused(f"table oracle limited to order <= {TABLE_CAP}")
    vecs = evaluation_vectors(g)
    h = n // 2
    left, lsupp = _signed_sums(vecs[:h])
    right, rsupp = _signed_sums(vecs[h:])
    bad = np.zeros(1 << n, dtype=bool)
    # group half sums by value, then pair every left entry with every matching right entry
    lk = _keys(left)
    rk = _keys(-right)
    order_l = np.argsort(lk, kind="stable")
    order_r = np.argsort(rk, kind="stable")
    lk_sorted, rk_sorted = lk[order_l], rk[order_r]
    uniq, l_start, l_count = np.unique(lk_sorted, return_index=True, return_counts=True)
    r_lo = np.searchsorted(rk_sorted, uniq, side="left")
    r_hi = np.searchsorted(rk_sorted, uniq, side="right")
    lsupp_sorted = lsupp[order_l]
    rsupp_sorted = rsupp[order_r] << h
    for u in np.nonzero(r_hi > r_lo)[0]:
        ls = lsupp_sorted[l_start[u]:l_start[u] + l_count[u]]
        rs = rsupp_sorted[r_lo[u]:r_hi[u]]
        masks = (ls[:, None] | rs[None, :]).ravel()
        bad[masks] = True
    bad[0] = False
    # upward closure: a superset of a non-QI set is non-QI
    view = bad
    for i in range(n):
        v = view.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    return ~bad


def oracle_quasi_relation_count(g: GroupSpec) -> int:
    """Number of nonzero quasi-relations on the whole group (diagnostic)."""
    vecs = evaluation_vectors(g)
    n = g.order
    h = n // 2
    left, _ = _signed_sums(vecs[:h])
    right, _ = _signed_sums(vecs[h:])
    lk, rk = _keys(left), _keys(-right)
    uniq_l, cl = np.unique(lk, return_counts=True)
    uniq_r, cr = np.unique(rk, return_counts=True)
    common, il, ir = np.intersect1d(uniq_l, uniq_r, return_indices=True)
    return int((cl[il] * cr[ir]).sum()) - 1


def qi_table_from(flags, n: int) -> np.ndarray:
    return np.fromiter((bool(flags(m)) for m in range(1 << n)), dtype=bool, count=1 << n)
