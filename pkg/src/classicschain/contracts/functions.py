"""Vehicle-lifecycle contract functions.

Each handler takes (ctx, args) with args as the fixed string encodings
used on the wire: JSON for structured payloads, bare strings otherwise.
Handlers raise ContractError for every expected rejection and return a
canonical-encodable result.

Writes always touch ``classic:<vin>`` so the vehicle's version count and
change history advance once per committed transaction on that vehicle.
"""

from __future__ import annotations

import datetime
import json

from ..errors import (
    BAD_REQUEST,
    DUPLICATE_STEP,
    GRANTEE_IS_OWNER,
    NO_SUCH_GRANT,
    NO_SUCH_REF,
    SELF_TRANSFER,
    UNKNOWN_USER,
    UNKNOWN_VIN,
    VIN_EXISTS,
    ContractError,
)
from . import abac
from .assets import (
    ACCESS_LEVELS,
    ACTIVITY_TYPES,
    access_key,
    classic_key,
    decode,
    encode,
    new_access,
    new_classic,
    step_key,
    validate_media_ref,
    validate_vin,
)
from .context import TxContext

MIN_VEHICLE_YEAR = 1886


def _parse_json(raw: str, what: str) -> dict | list:
    try:
        return json.loads(raw)
    except (TypeError, ValueError) as exc:
        raise ContractError(BAD_REQUEST, f"malformed {what}: {exc}") from exc


def _need_args(args: list[str], count: int) -> None:
    if len(args) != count:
        raise ContractError(BAD_REQUEST, f"expected {count} args, got {len(args)}")


def _load_classic(ctx: TxContext, vin: str) -> dict:
    raw = ctx.get_state(classic_key(vin))
    if raw is None:
        raise ContractError(UNKNOWN_VIN, f"no vehicle {vin}")
    return decode(raw)


def _load_access(ctx: TxContext, vin: str) -> dict:
    raw = ctx.get_state(access_key(vin))
    return decode(raw) if raw is not None else new_access(vin)


def _certification_tx_id(ctx: TxContext, vin: str, classic: dict) -> str | None:
    if not classic.get("certified"):
        return None
    for entry in reversed(ctx.history(classic_key(vin))):
        if entry.function == "CertifyVehicle":
            return entry.tx_id
    return None


def assemble_card(ctx: TxContext, classic: dict, access: dict,
                  pending_write: bool = False) -> dict:
    vin = classic["vin"]
    steps = []
    for step_id in classic["stepIds"]:
        raw = ctx.get_state(step_key(vin, step_id))
        if raw is not None:
            steps.append(decode(raw))
    return {
        "access": access,
        "certificationTxId": _certification_tx_id(ctx, vin, classic),
        "classic": classic,
        "steps": steps,
        "versionCount": ctx.history_len(classic_key(vin)) + (1 if pending_write else 0),
    }


# -- write functions -----------------------------------------------------


def register_classic(ctx: TxContext, args: list[str]) -> dict:
    abac.require_registrar(ctx.caller)
    _need_args(args, 3)
    vin, details_raw, owner_user_id = args
    validate_vin(vin)
    details = _parse_json(details_raw, "vehicle details")
    if ctx.get_state(classic_key(vin)) is not None:
        raise ContractError(VIN_EXISTS, f"vehicle {vin} already registered")
    if not ctx.user_exists(owner_user_id):
        raise ContractError(UNKNOWN_USER, f"no such user {owner_user_id}")
    try:
        year = int(details["year"])
        classic = new_classic(
            vin,
            str(details["registrationNumber"]),
            str(details["make"]),
            str(details["model"]),
            year,
            owner_user_id,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(BAD_REQUEST, f"bad vehicle details: {exc}") from exc
    current_year = datetime.datetime.fromtimestamp(
        ctx.timestamp / 1000, tz=datetime.timezone.utc
    ).year
    if not MIN_VEHICLE_YEAR <= year <= current_year:
        raise ContractError(BAD_REQUEST, f"year {year} out of range")
    access = new_access(vin)
    ctx.put_state(classic_key(vin), encode(classic))
    ctx.put_state(access_key(vin), encode(access))
    return assemble_card(ctx, classic, access, pending_write=True)


def add_restoration_step(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 3)
    vin, step_raw, evidence_raw = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_step_author(classic, access, ctx.caller)
    step_fields = _parse_json(step_raw, "step")
    evidence_list = _parse_json(evidence_raw, "evidence")
    if not isinstance(evidence_list, list):
        raise ContractError(BAD_REQUEST, "evidence must be a list")
    evidence = [validate_media_ref(ref) for ref in evidence_list]
    try:
        step_id = str(step_fields["stepId"])
        activity = str(step_fields["activityType"])
        step = {
            "activityType": activity,
            "createdAt": ctx.timestamp,
            "description": str(step_fields.get("description", "")),
            "evidence": evidence,
            "materials": [str(m) for m in step_fields.get("materials", [])],
            "performedByUserId": ctx.caller.user_id,
            "stepId": step_id,
            "title": str(step_fields["title"]),
            "tools": [str(t) for t in step_fields.get("tools", [])],
            "vin": vin,
            "workshopOrg": ctx.caller.org_name,
        }
    except (KeyError, TypeError) as exc:
        raise ContractError(BAD_REQUEST, f"bad step fields: {exc}") from exc
    if activity not in ACTIVITY_TYPES:
        raise ContractError(BAD_REQUEST, f"unknown activityType {activity!r}")
    if ctx.get_state(step_key(vin, step_id)) is not None:
        raise ContractError(DUPLICATE_STEP, f"step {step_id} already recorded")
    classic["stepIds"].append(step_id)
    # New work invalidates a prior certification of the documentation.
    classic["certified"] = False
    classic["certifiedAt"] = None
    classic["certifierUserId"] = None
    ctx.put_state(step_key(vin, step_id), encode(step))
    ctx.put_state(classic_key(vin), encode(classic))
    return {"stepId": step_id}


def add_document(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 2)
    vin, doc_raw = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_document_author(classic, access, ctx.caller)
    doc = validate_media_ref(_parse_json(doc_raw, "document"))
    classic["documents"].append(doc)
    ctx.put_state(classic_key(vin), encode(classic))
    return assemble_card(ctx, classic, access)


def certify_vehicle(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 1)
    vin = args[0]
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_certifier(classic, access, ctx.caller)
    classic["certified"] = True
    classic["certifiedAt"] = ctx.timestamp
    classic["certifierUserId"] = ctx.caller.user_id
    ctx.put_state(classic_key(vin), encode(classic))
    return assemble_card(ctx, classic, access)


def grant_access(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 3)
    vin, grantee, level = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_owner(classic, ctx.caller, "grant access")
    if level not in ACCESS_LEVELS:
        raise ContractError(BAD_REQUEST, f"unknown access level {level!r}")
    if not ctx.user_exists(grantee):
        raise ContractError(UNKNOWN_USER, f"no such user {grantee}")
    if grantee == classic["ownerUserId"]:
        raise ContractError(GRANTEE_IS_OWNER, "owner already has full access")
    access["entries"] = [e for e in access["entries"] if e["granteeUserId"] != grantee]
    access["entries"].append({
        "granteeUserId": grantee,
        "grantedAt": ctx.timestamp,
        "grantedByUserId": ctx.caller.user_id,
        "level": level,
    })
    access["entries"].sort(key=lambda e: e["granteeUserId"])
    ctx.put_state(access_key(vin), encode(access))
    ctx.put_state(classic_key(vin), encode(classic))
    return access


def revoke_access(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 2)
    vin, grantee = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_owner(classic, ctx.caller, "revoke access")
    remaining = [e for e in access["entries"] if e["granteeUserId"] != grantee]
    if len(remaining) == len(access["entries"]):
        raise ContractError(NO_SUCH_GRANT, f"{grantee} holds no grant on {vin}")
    access["entries"] = remaining
    ctx.put_state(access_key(vin), encode(access))
    ctx.put_state(classic_key(vin), encode(classic))
    return access


def transfer_ownership(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 2)
    vin, new_owner = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_owner(classic, ctx.caller, "transfer ownership")
    if new_owner == ctx.caller.user_id:
        raise ContractError(SELF_TRANSFER, "cannot transfer to current owner")
    if not ctx.user_exists(new_owner):
        raise ContractError(UNKNOWN_USER, f"no such user {new_owner}")
    classic["ownerUserId"] = new_owner
    # The buyer becomes owner with implicit full access; every prior
    # grant (including the seller's) is wiped.
    access["entries"] = []
    ctx.put_state(classic_key(vin), encode(classic))
    ctx.put_state(access_key(vin), encode(access))
    return assemble_card(ctx, classic, access)


def anchor_media(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 3)
    vin, cid, ref_kind = args
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_document_author(classic, access, ctx.caller)
    flipped = 0
    already = 0
    if ref_kind == "document":
        for ref in classic["documents"]:
            if ref["cid"] == cid:
                if ref["anchorState"] == "anchored":
                    already += 1
                else:
                    ref["anchorState"] = "anchored"
                    flipped += 1
        if flipped:
            ctx.put_state(classic_key(vin), encode(classic))
    elif ref_kind == "evidence":
        for step_id in classic["stepIds"]:
            raw = ctx.get_state(step_key(vin, step_id))
            if raw is None:
                continue
            step = decode(raw)
            step_flips = 0
            for ref in step["evidence"]:
                if ref["cid"] == cid:
                    if ref["anchorState"] == "anchored":
                        already += 1
                    else:
                        ref["anchorState"] = "anchored"
                        step_flips += 1
            if step_flips:
                ctx.put_state(step_key(vin, step_id), encode(step))
                flipped += step_flips
        if flipped:
            ctx.put_state(classic_key(vin), encode(classic))
    else:
        raise ContractError(BAD_REQUEST, f"unknown refKind {ref_kind!r}")
    if flipped == 0 and already == 0:
        raise ContractError(NO_SUCH_REF, f"no {ref_kind} with cid {cid} on {vin}")
    return {"anchored": flipped, "alreadyAnchored": already}


# -- read-only functions ---------------------------------------------------


def get_vehicle_card(ctx: TxContext, args: list[str]) -> dict:
    _need_args(args, 1)
    vin = args[0]
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_view(classic, access, ctx.caller)
    return assemble_card(ctx, classic, access)


def get_vehicle_card_history(ctx: TxContext, args: list[str]) -> list[dict]:
    _need_args(args, 1)
    vin = args[0]
    classic = _load_classic(ctx, vin)
    access = _load_access(ctx, vin)
    abac.require_view(classic, access, ctx.caller)
    out = []
    previous: dict | None = None
    for entry in ctx.history(classic_key(vin)):
        snapshot = decode(entry.value) if entry.value is not None else None
        if previous is None or snapshot is None:
            changes = ["created"]
        else:
            changes = sorted(k for k in snapshot if snapshot[k] != previous.get(k))
        out.append({
            "changes": changes,
            "function": entry.function,
            "snapshot": snapshot,
            "submitter": {"orgName": entry.submitter_org, "userId": entry.submitter_user},
            "timestamp": entry.timestamp,
            "txId": entry.tx_id,
        })
        previous = snapshot
    return out


def list_classics_for_user(ctx: TxContext, args: list[str]) -> list[dict]:
    _need_args(args, 1)
    user_id = args[0]
    if ctx.caller.user_id != user_id:
        raise abac.deny("users may list only their own vehicles")
    out = []
    for key in ctx.scan_keys("classic:"):
        raw = ctx.get_state(key)
        if raw is None:
            continue
        classic = decode(raw)
        vin = classic["vin"]
        access = _load_access(ctx, vin)
        role = None
        level = None
        if classic["ownerUserId"] == user_id:
            role = "owner"
        else:
            for entry in access["entries"]:
                if entry["granteeUserId"] == user_id:
                    role = "granted"
                    level = entry["level"]
                    break
        if role is None:
            continue
        out.append({
            "certified": classic["certified"],
            "level": level,
            "make": classic["make"],
            "model": classic["model"],
            "registrationNumber": classic["registrationNumber"],
            "role": role,
            "vin": vin,
            "year": classic["year"],
        })
    return out
