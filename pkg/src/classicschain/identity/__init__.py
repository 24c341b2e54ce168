from .ca import (
    CertificateAuthority,
    Identity,
    Network,
    ORG_ROLES,
    PEER_ORGS,
    check_attribute,
    verify_with_certificate,
)
from .wallet import Wallet

__all__ = [
    "CertificateAuthority",
    "Identity",
    "Network",
    "ORG_ROLES",
    "PEER_ORGS",
    "Wallet",
    "check_attribute",
    "verify_with_certificate",
]
