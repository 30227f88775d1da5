"""JSON certificates for tester verdicts and Psi entries.

A negative verdict is certified by its witness: the checker only needs the
support, the coefficient range and an exact vanishing test (cyclotomic
remainder for Z_n, tensor quotient map for lattices).  A positive verdict
has no short proof here, so the checker recomputes it through two routes:
the coset-reduction tester and the whole-group linear algebra route, plus
the sign-vector oracle when the set is small enough.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .groups import InvalidInput, Subset, format_subset, parse_subset
from .oracle import DEFAULT_ORACLE_CAP, oracle_is_quasi_independent
from .relations import (
    IndependenceVerdict,
    Relation,
    coset_reduction_test,
    is_independent,
    is_relation,
    linear_algebra_test,
)

SCHEMA = "qindep-certificate/1"


def verdict_certificate(E: Subset, v: IndependenceVerdict) -> dict:
    out = {
        "schema": SCHEMA,
        "kind": "verdict",
        "group": E.group.key(),
        "subset": format_subset(E),
        "verdict": v.label(),
        "quasi_independent": v.quasi_independent,
        "independent": v.independent,
        "method": v.method,
        "relation_dimension": v.dimension,
    }
    if v.witness is not None:
        out["witness"] = v.witness.to_json()
    if v.relation is not None:
        out["relation"] = v.relation.to_json()
    return out


def psi_certificate(entry) -> dict:
    return {"schema": SCHEMA, "kind": "psi", **entry.to_json()}


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    messages: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _check_relation(E: Subset, data: dict, quasi: bool) -> str | None:
    rel = Relation.from_json(E.group, data)
    if rel.is_zero():
        return "witness is the zero function"
    if any(x not in E for x in rel.support):
        return "witness is not supported on the subset"
    if quasi and not rel.is_quasi:
        return "quasi-witness has coefficients outside {0, +-1}"
    if not is_relation(E.group, rel.coefficients):
        return "witness does not vanish"
    return None


def check_certificate(data: dict) -> CheckResult:
    if data.get("schema") != SCHEMA:
        return CheckResult(False, (f"unknown schema {data.get('schema')!r}",))
    kind = data.get("kind")
    if kind == "verdict":
        return _check_verdict(data)
    if kind == "psi":
        return _check_psi(data)
    return CheckResult(False, (f"unknown certificate kind {kind!r}",))


def _check_verdict(data: dict) -> CheckResult:
    E = parse_subset(data["subset"])
    if E.group.key() != data["group"]:
        return CheckResult(False, ("group field does not match the subset",))
    msgs = []
    qi = data.get("quasi_independent")
    ind = data.get("independent")
    if qi is False:
        if "witness" not in data:
            return CheckResult(False, ("negative verdict without a witness",))
        err = _check_relation(E, data["witness"], True)
        if err:
            return CheckResult(False, (err,))
        msgs.append("quasi-relation witness checked exactly")
    elif qi is True:
        a = coset_reduction_test(E, d_cap=60, node_cap=50_000_000)
        b = linear_algebra_test(E, d_cap=60, node_cap=50_000_000)
        if a.quasi_independent is not True or b.quasi_independent is not True:
            return CheckResult(False, (f"recomputation disagrees: {a.label()} / {b.label()}",))
        msgs.append("quasi-independence recomputed by two routes")
        if E.group.is_cyclic and len(E) <= DEFAULT_ORACLE_CAP:
            if not oracle_is_quasi_independent(E):
                return CheckResult(False, ("sign-vector oracle finds a quasi-relation",))
            msgs.append("sign-vector oracle agrees")
    if ind is False:
        if "relation" not in data:
            return CheckResult(False, ("dependence claimed without a relation",))
        err = _check_relation(E, data["relation"], False)
        if err:
            return CheckResult(False, (err,))
        msgs.append("rational relation checked exactly")
    elif ind is True:
        if not is_independent(E)[0]:
            return CheckResult(False, ("independence recomputation failed",))
        msgs.append("independence recomputed")
    if qi is None:
        msgs.append("undecided verdict carries no claim")
    return CheckResult(True, tuple(msgs))


def _check_psi(data: dict) -> CheckResult:
    from .psi import PsiEntry

    entry = PsiEntry.from_json(data)
    if entry.witness is None:
        if entry.status != "claimed":
            return CheckResult(False, ("a verified status needs a witness",))
        return CheckResult(True, ("claimed value without a witness; nothing to verify",))
    ok = entry.verify()
    if ok is False:
        return CheckResult(False, ("Psi witness fails verification",))
    if ok is None:
        return CheckResult(False, ("Psi witness undecided under caps",))
    msg = "witness verified quasi-independent"
    if entry.exact:
        msg += "; exactness rests on the recorded search statistics"
    return CheckResult(True, (msg,))


def write_certificate(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True))


def read_certificate(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read certificate {path}: {exc}") from exc
