"""Command-line front end.

Exit codes: 0 affirmative/success, 1 negative with a witness, 2 undecided
or budget exhausted, 3 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import certificates as certs
from .datasets import DATASETS, verify_dataset
from .groups import InvalidInput, Unsupported, parse_group, parse_subset
from .permutations import Perm, classify, is_coset_structured, preserves_qi
from .psi import (
    Budget,
    ExtensionPlan,
    PsiTable,
    corollary_bound,
    extend,
    monotonicity_bounds,
    psi,
    three_prime_bound,
)
from .relations import (
    DEFAULT_D_CAP,
    DEFAULT_NODE_CAP,
    coset_reduction_test,
    is_quasi_independent,
    linear_algebra_test,
    structured_basis,
)

JSON_VERSION = 1
CACHE_ENV = "QINDEP_CACHE_DIR"
TABLE_NAME = "psi-table.json"

EXIT_OK, EXIT_NEGATIVE, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def default_table_path() -> Path:
    base = os.environ.get(CACHE_ENV)
    return Path(base) / TABLE_NAME if base else Path(TABLE_NAME)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"version": JSON_VERSION, **payload}, indent=1, sort_keys=True))
    else:
        print(text)


def _budget(args) -> Budget:
    return Budget(node_cap=args.node_cap, time_cap=args.time_cap, long_run=args.long_run,
                  d_cap=max(args.d_cap, 40))


# ------------------------------------------------------------ commands


def cmd_test(args) -> int:
    if args.certificate:
        data = certs.read_certificate(args.certificate)
        res = certs.check_certificate(data)
        _emit(args, {"certificate": str(args.certificate), "ok": res.ok, "messages": list(res.messages)},
              ("certificate OK: " if res.ok else "certificate REJECTED: ") + "; ".join(res.messages))
        return EXIT_OK if res.ok else EXIT_NEGATIVE
    if not args.subset:
        raise UsageError("test needs a subset or --certificate")
    E = parse_subset(args.subset)
    route = args.route
    if route == "coset":
        v = coset_reduction_test(E, d_cap=args.d_cap, node_cap=args.node_cap)
    elif route == "linear-algebra":
        v = linear_algebra_test(E, d_cap=args.d_cap, node_cap=args.node_cap)
    else:
        v = is_quasi_independent(E, d_cap=args.d_cap, node_cap=args.node_cap)
    data = certs.verdict_certificate(E, v)
    if args.emit_certificate:
        certs.write_certificate(args.emit_certificate, data)
    lines = [f"{E}: {v.label()}"]
    if v.witness is not None:
        lines.append("witness quasi-relation: " + _fmt_relation(v.witness))
    elif v.relation is not None:
        lines.append("rational relation: " + _fmt_relation(v.relation))
    if v.dimension is not None:
        lines.append(f"relations supported on E: dimension {v.dimension}")
    _emit(args, data, "\n".join(lines))
    if v.quasi_independent is None:
        return EXIT_UNDECIDED
    return EXIT_OK if v.quasi_independent else EXIT_NEGATIVE


def _fmt_relation(rel) -> str:
    parts = []
    for x, c in rel.coefficients.items():
        sign = "+" if c > 0 else "-"
        mag = abs(c)
        parts.append(f"{sign}{'' if mag == 1 else str(mag) + '*'}[{x}]")
    return " ".join(parts)


def cmd_basis(args) -> int:
    g = parse_group(args.group)
    b = structured_basis(g)
    vecs = [list(v.support) for v in b.vectors]
    text = [f"structured relation basis of {g}: {b.dimension} coset indicators "
            f"(order {g.order}, phi {g.phi})"]
    if not args.summary:
        text += ["  " + ",".join(map(str, v)) for v in vecs]
    _emit(args, {"group": g.key(), "dimension": b.dimension, "vectors": vecs}, "\n".join(text))
    return EXIT_OK


_PROV_SHORT = {
    "identity(phi-prime-power)": "identity φ",
    "identity(radical-multiplier)": "identity Ψ(pn)=pΨ(n)",
    "identity(strip-two)": "identity Ψ(2n)=Ψ(n)",
}


def _load_table(args) -> PsiTable | None:
    if args.no_table:
        return None
    return PsiTable.load(args.table or default_table_path())


def _save_table(args, table: PsiTable | None) -> None:
    if table is not None and not args.no_table:
        table.save(args.table or default_table_path())


def cmd_psi(args) -> int:
    g = parse_group(args.group)
    table = _load_table(args)
    entry = psi(g, _budget(args), table, use_identities=not args.search_only)
    _save_table(args, table)
    if args.emit_certificate:
        certs.write_certificate(args.emit_certificate, certs.psi_certificate(entry))
    label = "Ψ(" + (str(g.n) if g.is_cyclic else g.key()) + ")"
    sym = "=" if entry.exact else "≥"
    prov = _PROV_SHORT.get(entry.provenance, entry.provenance)
    text = f"{label}{sym}{entry.value} ({entry.status}, {prov})"
    if args.show_witness and entry.witness is not None:
        text += "\nwitness: " + ",".join(map(str, entry.witness.elements))
    _emit(args, entry.to_json(), text)
    return EXIT_OK if entry.exact else EXIT_UNDECIDED


def cmd_extend(args) -> int:
    E = parse_subset(args.subset)
    if not E.group.is_cyclic:
        raise UsageError("extend works on cyclic groups")
    budget = _budget(args)
    plan = ExtensionPlan.build(E.group.n, args.s, args.q, budget=budget)
    R = extend(E, plan, budget=budget)
    payload = {"source": str(E), "s": args.s, "q": args.q, "p_s": plan.p_s, "m": plan.m,
               "result": str(R), "size": len(R)}
    _emit(args, payload, f"{R}\n|E u F| = {len(E)} + {len(R) - len(E)} = {len(R)}, verified quasi-independent")
    return EXIT_OK


def cmd_perm_check(args) -> int:
    sigma = Perm.from_text(args.perm)
    rep = preserves_qi(sigma, args.mode, samples=args.samples, seed=args.seed)
    payload = {**rep.to_json(), "coset_structured": is_coset_structured(sigma)}
    if rep.preserves:
        text = f"preserves quasi-independence ({rep.mode}, {rep.checked} subsets"
        text += ")" if rep.conclusive else "; evidence only)"
        _emit(args, payload, text)
        return EXIT_OK if rep.conclusive else EXIT_UNDECIDED
    _emit(args, payload, f"does not preserve: {rep.counterexample} is "
          f"{'QI' if rep.source_qi else 'not QI'} but its image is {'QI' if rep.image_qi else 'not QI'}")
    return EXIT_NEGATIVE


def cmd_perm_classify(args) -> int:
    sigma = Perm.from_text(args.perm)
    f = classify(sigma)
    if f is None:
        _emit(args, {"perm": args.perm, "factorization": None},
              "no factorization: the structure test fails, so the permutation does not preserve quasi-independence")
        return EXIT_NEGATIVE
    ok = f.compose() == sigma
    _emit(args, {"perm": args.perm, "factorization": f.to_json(), "recomposes": ok},
          json.dumps(f.to_json(), indent=1))
    return EXIT_OK if ok else EXIT_UNDECIDED


def cmd_verify_dataset(args) -> int:
    rep = verify_dataset(args.name, d_cap=args.d_cap if args.d_cap > DEFAULT_D_CAP else 40)
    _emit(args, rep.to_json(), rep.summary())
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_bounds(args) -> int:
    budget = _budget(args)
    table = _load_table(args)
    out = []
    if args.s is not None and args.q is not None:
        out.extend(monotonicity_bounds(args.n, args.s, args.q, table, budget, construct=not args.no_construct))
    if args.corollary is not None:
        out.append(corollary_bound(args.n, args.corollary, table, budget))
    tp = three_prime_bound(args.n)
    if tp is not None:
        out.append(tp)
    if not out:
        raise UsageError("nothing to bound: give --s and --q, or --corollary Q")
    _save_table(args, table)
    payload = {"bounds": [{"group": b.group.key(), "value": b.value, "rule": b.rule,
                           "verified": b.verified, "witness_size": len(b.witness) if b.witness else None}
                          for b in out]}
    _emit(args, payload, "\n".join(b.describe() for b in out))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    report = run_selftest(quick=args.quick)
    _emit(args, {"ok": report.ok, "checks": [c._asdict() for c in report.checks]}, report.summary())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


# ------------------------------------------------------------ parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--d-cap", type=int, default=DEFAULT_D_CAP, help="subspace dimension cap for the signed search")
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP, help="node cap for searches")
    p.add_argument("--time-cap", type=float, default=None, help="seconds before a search stops with a bound")
    p.add_argument("--long-run", action="store_true", help="allow very large exhaustive searches")
    p.add_argument("--table", type=Path, default=None, help=f"Psi table path (default ./{TABLE_NAME} or ${CACHE_ENV})")
    p.add_argument("--no-table", action="store_true", help="do not read or write the Psi table")
    p.add_argument("--jobs", type=int, default=1, help="parallelism degree (searches run serially)")
    p.add_argument("--config", type=Path, default=None, help="JSON file with default flag values")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qindep", description="Quasi-independence of subsets of Z_n and lattices")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    t = sub.add_parser("test", help="decide quasi-independence of a subset")
    t.add_argument("subset", nargs="?", help="n:a,b,c or d1xd2:(i,j),(k,l)")
    t.add_argument("--certificate", type=Path, help="verify a certificate file instead")
    t.add_argument("--emit-certificate", type=Path, help="write a JSON certificate")
    t.add_argument("--route", choices=("default", "coset", "linear-algebra"), default="default")
    t.set_defaults(func=cmd_test)

    b = sub.add_parser("basis", help="print the structured relation basis")
    b.add_argument("group")
    b.add_argument("--summary", action="store_true", help="dimension only")
    b.set_defaults(func=cmd_basis)

    s = sub.add_parser("psi", help="compute Psi with a witness")
    s.add_argument("group")
    s.add_argument("--search-only", action="store_true", help="skip the identities (direct search)")
    s.add_argument("--show-witness", action="store_true")
    s.add_argument("--emit-certificate", type=Path)
    s.set_defaults(func=cmd_psi)

    e = sub.add_parser("extend", help="extend a QI set of Z_n into Z_{qm}")
    e.add_argument("subset")
    e.add_argument("--s", type=int, required=True, help="index (from 1) of the prime p_s to replace")
    e.add_argument("--q", type=int, required=True, help="the new prime q > p_s")
    e.set_defaults(func=cmd_extend)

    pc = sub.add_parser("perm-check", help="test whether a permutation preserves QI")
    pc.add_argument("perm", help="n:image list")
    pc.add_argument("--mode", choices=("auto", "exhaustive", "battery"), default="auto")
    pc.add_argument("--samples", type=int, default=10_000)
    pc.add_argument("--seed", type=int, default=0)
    pc.set_defaults(func=cmd_perm_check)

    pk = sub.add_parser("perm-classify", help="factor a permutation into the structural types")
    pk.add_argument("perm")
    pk.set_defaults(func=cmd_perm_classify)

    vd = sub.add_parser("verify-dataset", help="decode and verify an embedded example")
    vd.add_argument("name", choices=DATASETS)
    vd.set_defaults(func=cmd_verify_dataset)

    bd = sub.add_parser("bounds", help="lower bounds from the monotonicity rules")
    bd.add_argument("n", type=int)
    bd.add_argument("--s", type=int)
    bd.add_argument("--q", type=int)
    bd.add_argument("--corollary", type=int, metavar="Q", help="Psi(nQ) >= (Q-1) Psi(n)")
    bd.add_argument("--no-construct", action="store_true", help="skip building witnesses")
    bd.set_defaults(func=cmd_bounds)

    st = sub.add_parser("selftest", help="oracle, identity and permutation suites")
    st.add_argument("--quick", action="store_true")
    st.set_defaults(func=cmd_selftest)

    for sp in (t, b, s, e, pc, pk, vd, bd, st):
        _common(sp)
    return p


def _apply_config(args, parser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    defaults = {"d_cap": DEFAULT_D_CAP, "node_cap": DEFAULT_NODE_CAP, "time_cap": None,
                "long_run": False, "table": None, "jobs": 1}
    for key, value in data.items():
        key = key.replace("-", "_")
        if key not in defaults:
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) == defaults[key]:  # explicit flags win
            setattr(args, key, Path(value) if key == "table" and value else value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("missing command")
        _apply_config(args, parser)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidInput, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
