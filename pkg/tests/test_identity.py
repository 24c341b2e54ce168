from __future__ import annotations

import pytest

from classicschain.codec import canonical_bytes
from classicschain.errors import IdentityError
from classicschain.identity import Network, Wallet
from classicschain.identity.ca import check_attribute, verify_certificate


@pytest.fixture
def net():
    return Network(seed=b"\x07" * 32)


def test_enroll_issues_verifying_certificate(net):
    ident = net.enroll_identity("WorkshopsOrg", "shop1", "restorer")
    record = net.verify_certificate(ident.certificate)
    assert record["attributes"]["role"] == "restorer"
    assert record["orgName"] == "WorkshopsOrg"


def test_role_org_mismatch(net):
    with pytest.raises(IdentityError) as exc:
        net.enroll_identity("CertifiersOrg", "bob", "owner")
    assert exc.value.code == "ROLE_ORG_MISMATCH"


def test_duplicate_user(net):
    net.enroll_identity("OwnersOrg", "alice", "owner")
    with pytest.raises(IdentityError) as exc:
        net.enroll_identity("OwnersOrg", "alice", "owner")
    assert exc.value.code == "DUPLICATE_USER"


def test_sign_verify_roundtrip_and_tamper(net):
    ident = net.enroll_identity("OwnersOrg", "alice", "owner")
    msg = b"grant read on 1275COOPERS"
    sig = ident.sign(msg)
    assert net.verify(ident.certificate, msg, sig)
    assert not net.verify(ident.certificate, msg[:-1] + b"X", sig)
    assert not net.verify(ident.certificate, msg, sig[:-1] + bytes([sig[-1] ^ 1]))


def test_verify_with_other_identity_cert(net):
    alice = net.enroll_identity("OwnersOrg", "alice", "owner")
    bob = net.enroll_identity("OwnersOrg", "bob", "owner")
    sig = alice.sign(b"m")
    assert not net.verify(bob.certificate, b"m", sig)


def test_no_cross_ca_acceptance(net):
    ident = net.enroll_identity("OwnersOrg", "alice", "owner")
    roots = net.ca_roots()
    # Present the certificate as if issued by another org's CA.
    forged = dict(ident.certificate)
    forged["issuer"] = "WorkshopsOrg"
    record = dict(forged["record"])
    record["orgName"] = "WorkshopsOrg"
    forged["record"] = record
    with pytest.raises(IdentityError) as exc:
        verify_certificate(forged, roots)
    assert exc.value.code == "MALFORMED_CERT"


def test_check_attribute(net):
    shop = net.enroll_identity("WorkshopsOrg", "shop1", "restorer")
    roots = net.ca_roots()
    assert check_attribute(shop.certificate, "restorer", roots)
    assert not check_attribute(shop.certificate, "certifier", roots)


def test_forged_attribute_is_malformed(net):
    shop = net.enroll_identity("WorkshopsOrg", "shop1", "restorer")
    roots = net.ca_roots()
    forged = dict(shop.certificate)
    record = dict(forged["record"])
    attrs = dict(record["attributes"])
    attrs["role"] = "certifier"
    record["attributes"] = attrs
    forged["record"] = record
    with pytest.raises(IdentityError) as exc:
        check_attribute(forged, "certifier", roots)
    assert exc.value.code == "MALFORMED_CERT"


def test_wallet_roundtrip(tmp_path):
    net = Network(seed=b"\x03" * 32, wallet=Wallet(tmp_path / "wallet"))
    ident = net.enroll_identity("OwnersOrg", "alice", "owner")
    reloaded = Wallet(tmp_path / "wallet").load_all(net.ca_roots())
    assert len(reloaded) == 1
    clone = reloaded[0]
    assert clone.user_id == "alice"
    sig = clone.sign(b"hello")
    assert net.verify(ident.certificate, b"hello", sig)


def test_persistent_network_reloads_cas_and_identities(tmp_path):
    net1 = Network.persistent(tmp_path)
    ident = net1.enroll_identity("OwnersOrg", "alice", "owner")
    cert_bytes = canonical_bytes(ident.certificate)
    net2 = Network.persistent(tmp_path)
    again = net2.get_identity("OwnersOrg", "alice")
    assert canonical_bytes(again.certificate) == cert_bytes
    net2.verify_certificate(again.certificate)
