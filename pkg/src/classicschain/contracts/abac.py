"""Attribute-based authorization for the vehicle lifecycle.

Decisions depend only on the caller's certificate attributes (role,
userId) and on-ledger records (ownership, grant table). Because the
records are read through the simulation context, any concurrent grant
change invalidates the transaction at commit time (MVCC), so access is
effectively checked at commit.

Rule summary (role x operation):

    register            restorer | certifier
    add step            restorer with write grant
    add document        owner, or restorer/certifier with write grant
    certify             certifier with any grant (>= read)
    grant/revoke/transfer   owner only
    view card/history   owner, any grantee, or the certifier of record
    list vehicles       self only
"""

from __future__ import annotations

from ..errors import AUTH_DENIED, ContractError
from .assets import ACCESS_LEVELS, access_level_of
from .context import CallerInfo


def deny(reason: str) -> ContractError:
    return ContractError(AUTH_DENIED, reason)


def is_owner(classic: dict, caller: CallerInfo) -> bool:
    return classic["ownerUserId"] == caller.user_id


def require_registrar(caller: CallerInfo) -> None:
    if caller.role not in ("restorer", "certifier"):
        raise deny("registration requires a restoration shop or certification authority")


def require_step_author(classic: dict, access: dict, caller: CallerInfo) -> None:
    if caller.role != "restorer":
        raise deny("restoration steps are recorded by restorers")
    if access_level_of(access, caller.user_id) < ACCESS_LEVELS["write"]:
        raise deny("no write access on this vehicle")


def require_document_author(classic: dict, access: dict, caller: CallerInfo) -> None:
    if is_owner(classic, caller):
        return
    if caller.role in ("restorer", "certifier") and \
            access_level_of(access, caller.user_id) >= ACCESS_LEVELS["write"]:
        return
    raise deny("documents require ownership or write access")


def require_certifier(classic: dict, access: dict, caller: CallerInfo) -> None:
    if caller.role != "certifier":
        raise deny("certification requires a certification body officer")
    if access_level_of(access, caller.user_id) < ACCESS_LEVELS["read"]:
        raise deny("certifier has no access grant on this vehicle")


def require_owner(classic: dict, caller: CallerInfo, action: str) -> None:
    if not is_owner(classic, caller):
        raise deny(f"only the owner may {action}")


def may_view(classic: dict, access: dict, caller: CallerInfo) -> bool:
    if is_owner(classic, caller):
        return True
    if access_level_of(access, caller.user_id) > 0:
        return True
    return (
        caller.role == "certifier"
        and classic.get("certifierUserId") == caller.user_id
    )


def require_view(classic: dict, access: dict, caller: CallerInfo) -> None:
    if not may_view(classic, access, caller):
        raise deny("no access to this vehicle")
