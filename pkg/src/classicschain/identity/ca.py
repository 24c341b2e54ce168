"""Per-organization certificate authorities and enrolled identities.

Four fixed organizations, each with its own Ed25519 root key. A
certificate is a canonical-encoded attribute record signed by the org
CA; attribute checks are pure functions of the certificate, so any
mutation of the attributes invalidates the signature.

Certificate layout::

    {"issuer": <orgName>,
     "record": {"attributes": {...}, "orgName": ..., "publicKey": <hex>,
                "userId": ...},
     "signature": <hex over canonical(record)>}
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..codec import canonical_bytes
from ..errors import (
    DUPLICATE_USER,
    MALFORMED_CERT,
    ROLE_ORG_MISMATCH,
    UNKNOWN_KEY,
    IdentityError,
)

# Fixed topology: three peer organizations plus the ordering organization.
ORG_ROLES = {
    "OwnersOrg": "owner",
    "WorkshopsOrg": "restorer",
    "CertifiersOrg": "certifier",
    "OrderersOrg": "orderer",
}
PEER_ORGS = ("OwnersOrg", "WorkshopsOrg", "CertifiersOrg")


def _private_key_from_seed(seed: bytes) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(seed)


def _public_hex(key: Ed25519PrivateKey) -> str:
    from cryptography.hazmat.primitives.serialization import (
        Encoding,
        PublicFormat,
    )

    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw).hex()


def _private_hex(key: Ed25519PrivateKey) -> str:
    from cryptography.hazmat.primitives.serialization import (
        Encoding,
        NoEncryption,
        PrivateFormat,
    )

    return key.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption()).hex()


@dataclass
class Identity:
    """An enrolled participant able to sign transactions."""

    user_id: str
    org_name: str
    role: str
    attributes: dict
    public_key_hex: str
    certificate: dict
    key_ref: str
    _private_key: Optional[Ed25519PrivateKey] = field(default=None, repr=False)

    def sign(self, message: bytes) -> bytes:
        if self._private_key is None:
            raise IdentityError(UNKNOWN_KEY, f"no private key for {self.user_id}")
        return self._private_key.sign(message)

    @property
    def private_key_hex(self) -> str:
        if self._private_key is None:
            raise IdentityError(UNKNOWN_KEY, f"no private key for {self.user_id}")
        return _private_hex(self._private_key)

    def ref(self) -> dict:
        """The submitter reference embedded in transactions (no PII)."""
        return {
            "userId": self.user_id,
            "orgName": self.org_name,
            "certificate": self.certificate,
        }


class CertificateAuthority:
    """Root of trust for one organization."""

    def __init__(self, org_name: str, seed: bytes | None = None):
        if org_name not in ORG_ROLES:
            raise IdentityError(ROLE_ORG_MISMATCH, f"unknown organization {org_name}")
        self.org_name = org_name
        if seed is None:
            import os

            seed = os.urandom(32)
        self._key = _private_key_from_seed(seed)
        self.root_public_key_hex = _public_hex(self._key)

    def issue(self, user_id: str, role: str, attributes: dict) -> dict:
        record = {
            "attributes": attributes,
            "orgName": self.org_name,
            "publicKey": attributes.get("publicKey", ""),
            "userId": user_id,
        }
        signature = self._key.sign(canonical_bytes(record)).hex()
        return {"issuer": self.org_name, "record": record, "signature": signature}

    def root(self) -> dict:
        return {"orgName": self.org_name, "publicKey": self.root_public_key_hex}

    @property
    def private_seed_hex(self) -> str:
        return _private_hex(self._key)


def verify_certificate(certificate: dict, ca_roots: dict[str, str]) -> dict:
    """Validate a certificate against the known CA roots.

    Returns the signed record on success; raises MALFORMED_CERT on any
    structural or signature problem (including cross-CA presentation).
    """
    try:
        issuer = certificate["issuer"]
        record = certificate["record"]
        signature = bytes.fromhex(certificate["signature"])
        root_hex = ca_roots[issuer]
        if record["orgName"] != issuer:
            raise KeyError("orgName")
        pub = Ed25519PublicKey.from_public_bytes(bytes.fromhex(root_hex))
        pub.verify(signature, canonical_bytes(record))
    except InvalidSignature as exc:
        raise IdentityError(MALFORMED_CERT, "certificate signature invalid") from exc
    except IdentityError:
        raise
    except Exception as exc:
        raise IdentityError(MALFORMED_CERT, f"bad certificate structure: {exc}") from exc
    return record


def verify_with_certificate(certificate: dict, message: bytes, signature: bytes,
                            ca_roots: dict[str, str]) -> bool:
    """Check *signature* over *message* under the certificate's key.

    The certificate itself is validated first; MALFORMED_CERT propagates,
    a merely wrong signature returns False.
    """
    record = verify_certificate(certificate, ca_roots)
    try:
        pub = Ed25519PublicKey.from_public_bytes(bytes.fromhex(record["publicKey"]))
        pub.verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


def check_attribute(certificate: dict, required_role: str, ca_roots: dict[str, str]) -> bool:
    """True iff the certificate's role attribute equals *required_role*.

    Pure function of the certificate; forged attributes surface as
    MALFORMED_CERT because the CA signature no longer verifies.
    """
    record = verify_certificate(certificate, ca_roots)
    return record["attributes"].get("role") == required_role


class Network:
    """The four organizations, their CAs and every enrolled identity."""

    def __init__(self, seed: bytes | None = None, wallet=None,
                 ca_seeds: dict[str, bytes] | None = None):
        self._lock = threading.Lock()
        self._wallet = wallet
        self.cas: dict[str, CertificateAuthority] = {}
        for i, org in enumerate(ORG_ROLES):
            if ca_seeds is not None:
                ca_seed = ca_seeds[org]
            elif seed is not None:
                ca_seed = bytes([seed[j % len(seed)] ^ (i + 1) for j in range(32)])
            else:
                ca_seed = None
            self.cas[org] = CertificateAuthority(org, ca_seed)
        self._identities: dict[tuple[str, str], Identity] = {}
        self._seed = seed
        self._counter = 0
        if wallet is not None:
            for ident in wallet.load_all(self.ca_roots()):
                self._identities[(ident.org_name, ident.user_id)] = ident

    @classmethod
    def persistent(cls, data_dir, seed: bytes | None = None) -> "Network":
        """Load (or bootstrap) a network whose CA keys and wallet live on disk."""
        import json
        from pathlib import Path

        from .wallet import Wallet

        root = Path(data_dir)
        root.mkdir(parents=True, exist_ok=True)
        ca_file = root / "cas.json"
        if ca_file.exists():
            stored = json.loads(ca_file.read_text())
            ca_seeds = {org: bytes.fromhex(h) for org, h in stored.items()}
            return cls(seed=seed, wallet=Wallet(root / "wallet"), ca_seeds=ca_seeds)
        net = cls(seed=seed, wallet=Wallet(root / "wallet"))
        ca_file.write_text(
            json.dumps({org: ca.private_seed_hex for org, ca in net.cas.items()})
        )
        return net

    def ca_roots(self) -> dict[str, str]:
        return {org: ca.root_public_key_hex for org, ca in self.cas.items()}

    def enroll_identity(self, org_name: str, user_id: str, role: str,
                        attributes: dict | None = None) -> Identity:
        if org_name not in ORG_ROLES:
            raise IdentityError(ROLE_ORG_MISMATCH, f"unknown organization {org_name}")
        if ORG_ROLES[org_name] != role:
            raise IdentityError(
                ROLE_ORG_MISMATCH, f"role {role!r} not issued by {org_name}"
            )
        with self._lock:
            if (org_name, user_id) in self._identities:
                raise IdentityError(DUPLICATE_USER, f"{user_id} already enrolled in {org_name}")
            if self._seed is not None:
                self._counter += 1
                material = canonical_bytes(
                    {"n": self._counter, "org": org_name, "seed": self._seed.hex(), "user": user_id}
                )
                import hashlib

                key = _private_key_from_seed(hashlib.sha256(material).digest())
            else:
                key = Ed25519PrivateKey.generate()
            attrs = dict(attributes or {})
            attrs["role"] = role
            attrs["userId"] = user_id
            attrs["publicKey"] = _public_hex(key)
            certificate = self.cas[org_name].issue(user_id, role, attrs)
            key_ref = f"{org_name}__{user_id}"
            ident = Identity(
                user_id=user_id,
                org_name=org_name,
                role=role,
                attributes=attrs,
                public_key_hex=attrs["publicKey"],
                certificate=certificate,
                key_ref=key_ref,
                _private_key=key,
            )
            self._identities[(org_name, user_id)] = ident
            if self._wallet is not None:
                self._wallet.store(ident)
            return ident

    def get_identity(self, org_name: str, user_id: str) -> Identity:
        try:
            return self._identities[(org_name, user_id)]
        except KeyError:
            raise IdentityError(UNKNOWN_KEY, f"{user_id} not enrolled in {org_name}") from None

    def find_user(self, user_id: str) -> Identity | None:
        for (_, uid), ident in self._identities.items():
            if uid == user_id:
                return ident
        return None

    def user_exists(self, user_id: str) -> bool:
        return self.find_user(user_id) is not None

    def remove_identity(self, org_name: str, user_id: str) -> None:
        """Enrollment rollback hook for the gateway's atomic registration."""
        with self._lock:
            self._identities.pop((org_name, user_id), None)
            if self._wallet is not None:
                self._wallet.remove(org_name, user_id)

    def verify_certificate(self, certificate: dict) -> dict:
        return verify_certificate(certificate, self.ca_roots())

    def verify(self, certificate: dict, message: bytes, signature: bytes) -> bool:
        return verify_with_certificate(certificate, message, signature, self.ca_roots())

    def check_attribute(self, identity: Identity, required_role: str) -> bool:
        return check_attribute(identity.certificate, required_role, self.ca_roots())

    def identities(self) -> list[Identity]:
        return list(self._identities.values())


def identity_from_material(material: dict, ca_roots: dict[str, str]) -> Identity:
    """Rebuild an Identity from persisted wallet material."""
    record = verify_certificate(material["certificate"], ca_roots)
    key = None
    if material.get("privateKey"):
        key = _private_key_from_seed(bytes.fromhex(material["privateKey"]))
    return Identity(
        user_id=record["userId"],
        org_name=record["orgName"],
        role=record["attributes"]["role"],
        attributes=record["attributes"],
        public_key_hex=record["publicKey"],
        certificate=material["certificate"],
        key_ref=material.get("keyRef", f"{record['orgName']}__{record['userId']}"),
        _private_key=key,
    )
