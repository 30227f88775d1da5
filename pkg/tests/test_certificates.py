import json

from qindep.certificates import check_certificate, psi_certificate, verdict_certificate
from qindep.groups import GroupSpec, parse_subset
from qindep.psi import psi
from qindep.relations import is_quasi_independent


def cert(text):
    E = parse_subset(text)
    return verdict_certificate(E, is_quasi_independent(E))


def test_negative_roundtrip_and_tamper():
    c = json.loads(json.dumps(cert("15:5,10,3,6,9,12")))
    assert check_certificate(c)
    bad = dict(c, witness={**c["witness"], "5": "-1"})
    assert not check_certificate(bad)
    off = dict(c, witness={"1": "1"})
    assert not check_certificate(off)
    assert not check_certificate({k: v for k, v in c.items() if k != "witness"})


def test_positive_recomputed():
    c = cert("15:1,2,4")
    assert check_certificate(c)
    lie = dict(cert("15:0,5,10"), quasi_independent=True)
    lie.pop("witness")
    assert not check_certificate(lie)


def test_psi_certificate():
    c = psi_certificate(psi(15))
    assert check_certificate(json.loads(json.dumps(c)))
    c["witness"] = list(range(9))
    c["value"] = 9
    assert not check_certificate(c)


def test_claimed_without_witness():
    c = psi_certificate(psi(15))
    c.pop("witness")
    assert not check_certificate(c)
    c["status"] = "claimed"
    assert check_certificate(c)


def test_schema():
    assert not check_certificate({"schema": "other"})
    assert not check_certificate({"schema": "qindep-certificate/1", "kind": "x"})
    assert GroupSpec.cyclic(15).key() == "15"
