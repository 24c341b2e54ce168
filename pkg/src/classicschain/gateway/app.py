"""REST surface: one endpoint per contract function plus auth and media.

Routes (JSON bodies, multipart for uploads):

    POST   /users                                register
    POST   /auth/login                           session token
    GET    /users/me                             caller's own record
    GET    /users/{userId}/classics              owned/authorized vehicles
    POST   /classics                             register a vehicle
    POST   /classics/{vin}/restorations          multipart: metadata + files
    POST   /classics/{vin}/documents             multipart: metadata + file
    GET    /classics/{vin}/card
    GET    /classics/{vin}/history
    POST   /classics/{vin}/access                grant
    DELETE /classics/{vin}/access/{userId}       revoke
    POST   /classics/{vin}/owner                 transfer
    GET    /media/{cid}

Contract errors map one-to-one onto HTTP statuses; writes return only
after ledger commit and carry the txId.
"""

from __future__ import annotations

import json
import logging
from typing import Optional

from fastapi import Depends, FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from ..errors import EngineError
from ..ids import new_id
from ..mediastore.store import compute_cid
from .auth import BAD_TOKEN, TOKEN_EXPIRED, TokenError, verify_password
from .system import GatewaySystem

log = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "AUTH_DENIED": 403,
    "UNKNOWN_VIN": 404,
    "UNKNOWN_USER": 404,
    "NO_SUCH_GRANT": 404,
    "NO_SUCH_REF": 404,
    "NOT_FOUND": 404,
    "UNKNOWN_KEY": 404,
    "UNKNOWN_FUNCTION": 404,
    "VIN_EXISTS": 409,
    "MVCC_CONFLICT": 409,
    "DUPLICATE_USER": 409,
    "DUPLICATE_STEP": 409,
    "EMAIL_EXISTS": 409,
    "BAD_VIN": 400,
    "BAD_EVIDENCE": 400,
    "BAD_REQUEST": 400,
    "SELF_TRANSFER": 400,
    "GRANTEE_IS_OWNER": 400,
    "ROLE_ORG_MISMATCH": 400,
    "MALFORMED_CERT": 400,
    "ORDERING_UNAVAILABLE": 503,
    "NO_LEADER": 503,
    "TOO_LARGE": 413,
    "INTEGRITY_FAILURE": 502,
    "IO_FAILURE": 502,
    "ENDORSEMENT_FAIL": 502,
}


def _error_response(code: str, message: str) -> JSONResponse:
    status = _STATUS_BY_CODE.get(code, 500)
    body = {"error": code, "message": message}
    if code == "MVCC_CONFLICT":
        body["retryable"] = True
    return JSONResponse(status_code=status, content=body)


class RegisterUserBody(BaseModel):
    displayName: str = Field(min_length=1)
    email: str = Field(min_length=3, pattern=r"^[^@\s]+@[^@\s]+$")
    password: str = Field(min_length=8)
    org: str
    role: str


class LoginBody(BaseModel):
    email: str
    password: str


class RegisterClassicBody(BaseModel):
    vin: str
    make: str
    model: str
    registrationNumber: str
    year: int
    ownerUserId: str


class GrantBody(BaseModel):
    granteeUserId: str
    level: str


class TransferBody(BaseModel):
    newOwnerUserId: str


def create_app(system: GatewaySystem) -> FastAPI:
    app = FastAPI(title="classicschain-gateway", docs_url=None, redoc_url=None)
    app.state.system = system

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return _error_response(exc.code, exc.message)

    def current_user(request: Request) -> dict:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise TokenHTTP(BAD_TOKEN)
        try:
            claims = system.tokens.verify(header[7:].strip())
        except TokenError as exc:
            raise TokenHTTP(exc.code) from exc
        return claims

    class TokenHTTP(Exception):
        def __init__(self, code: str):
            self.code = code

    @app.exception_handler(TokenHTTP)
    async def token_error_handler(request: Request, exc: TokenHTTP):
        return JSONResponse(status_code=401,
                            content={"error": exc.code, "message": "authentication required"})

    def identity_of(claims: dict):
        ident = system.identity_for(claims["sub"])
        if ident is None:
            raise TokenHTTP(BAD_TOKEN)
        return ident

    # -- registration and sessions --------------------------------------

    @app.post("/users", status_code=201)
    def register_user(body: RegisterUserBody):
        if system.users.email_exists(body.email):
            return _error_response("EMAIL_EXISTS", "email already registered")
        try:
            user_id = system.register_user(body.displayName, body.email,
                                           body.password, body.org, body.role)
        except EngineError:
            raise
        except Exception as exc:  # enrollment infrastructure failure
            log.error("enrollment failed: %s", exc)
            return JSONResponse(status_code=502,
                                content={"error": "ENROLLMENT_FAILED",
                                         "message": str(exc)})
        return {"userId": user_id}

    @app.post("/auth/login")
    def login(body: LoginBody):
        rec = system.users.find_by_email(body.email)
        password_hash = rec.password_hash if rec else None
        if not verify_password(body.password, password_hash) or rec is None:
            return JSONResponse(status_code=401,
                                content={"error": "BAD_CREDENTIALS",
                                         "message": "unknown email or wrong password"})
        token, expiry = system.tokens.issue(rec.user_id, rec.org_name, rec.role)
        return {"expiresAt": expiry, "orgName": rec.org_name, "role": rec.role,
                "token": token, "userId": rec.user_id}

    @app.get("/users/me")
    def whoami(claims: dict = Depends(current_user)):
        rec = system.users.find_by_id(claims["sub"])
        if rec is None:
            raise TokenHTTP(BAD_TOKEN)
        return {"displayName": rec.display_name, "email": rec.email,
                "orgName": rec.org_name, "role": rec.role, "userId": rec.user_id}

    # -- vehicle routes -----------------------------------------------------

    @app.get("/users/{user_id}/classics")
    def list_classics(user_id: str, claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        summaries = system.engine.evaluate_query(ident, "ListClassicsForUser",
                                                 [user_id])
        return {"classics": summaries}

    @app.post("/classics", status_code=201)
    def register_classic(body: RegisterClassicBody,
                         claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        details = json.dumps({
            "make": body.make, "model": body.model,
            "registrationNumber": body.registrationNumber, "year": body.year,
        })
        tx_id, card = system.engine.submit_transaction(
            ident, "RegisterClassic", [body.vin, details, body.ownerUserId])
        return {"card": card, "txId": tx_id}

    @app.get("/classics/{vin}/card")
    def get_card(vin: str, claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        card = system.engine.evaluate_query(ident, "GetVehicleCard", [vin])
        return {"card": card}

    @app.get("/classics/{vin}/history")
    def get_history(vin: str, claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        history = system.engine.evaluate_query(ident, "GetVehicleCardHistory", [vin])
        return {"history": history}

    @app.post("/classics/{vin}/access")
    def grant_access(vin: str, body: GrantBody, claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        tx_id, access = system.engine.submit_transaction(
            ident, "GrantAccess", [vin, body.granteeUserId, body.level])
        system.events.emit("access-granted", vin, ident.user_id,
                           body.granteeUserId, {"level": body.level}, tx_id)
        return {"access": access, "txId": tx_id}

    @app.delete("/classics/{vin}/access/{grantee_id}")
    def revoke_access(vin: str, grantee_id: str,
                      claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        tx_id, access = system.engine.submit_transaction(
            ident, "RevokeAccess", [vin, grantee_id])
        system.events.emit("access-revoked", vin, ident.user_id, grantee_id,
                           {}, tx_id)
        return {"access": access, "txId": tx_id}

    @app.post("/classics/{vin}/owner")
    def transfer_ownership(vin: str, body: TransferBody,
                           claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        tx_id, card = system.engine.submit_transaction(
            ident, "TransferOwnership", [vin, body.newOwnerUserId])
        for recipient in (ident.user_id, body.newOwnerUserId):
            system.events.emit("ownership-transferred", vin, ident.user_id,
                               recipient, {"newOwnerUserId": body.newOwnerUserId},
                               tx_id)
        return {"card": card, "txId": tx_id}

    @app.post("/classics/{vin}/certification")
    def certify(vin: str, claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        tx_id, card = system.engine.submit_transaction(ident, "CertifyVehicle", [vin])
        system.events.emit("certified", vin, ident.user_id,
                           card["classic"]["ownerUserId"], {}, tx_id)
        return {"card": card, "txId": tx_id}

    # -- uploads ---------------------------------------------------------------

    def _intake_files(uploads: list[UploadFile]) -> list[dict]:
        refs = []
        for upload in uploads:
            content = upload.file.read()
            cid = system.media.store(content)
            refs.append({
                "anchorState": "pending",
                "cid": cid,
                "filename": upload.filename or "unnamed",
                "mediaType": upload.content_type or "application/octet-stream",
                "sizeBytes": len(content),
            })
        return refs

    @app.post("/classics/{vin}/restorations", status_code=201)
    def add_restoration(vin: str,
                        metadata: str = Form(...),
                        files: list[UploadFile] = File(default=[]),
                        claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        try:
            meta = json.loads(metadata)
        except ValueError:
            return _error_response("BAD_REQUEST", "metadata is not valid JSON")
        refs = _intake_files(files)
        step = {
            "stepId": new_id(),
            "title": meta.get("title", ""),
            "activityType": meta.get("activityType", "other"),
            "description": meta.get("description", ""),
            "materials": meta.get("materials", []),
            "tools": meta.get("tools", []),
        }
        tx_id, result = system.engine.submit_transaction(
            ident, "AddRestorationStep",
            [vin, json.dumps(step), json.dumps(refs)])
        cids = [r["cid"] for r in refs]
        if system.cfg.anchor.mode == "sync":
            system.anchor_inline(ident, vin, cids, "evidence")
        else:
            system.anchor_background(ident, vin, cids, "evidence")
        owner = _vehicle_owner(vin)
        if owner:
            system.events.emit("step-added", vin, ident.user_id, owner,
                               {"stepId": result["stepId"]}, tx_id)
        return {"evidence": refs, "stepId": result["stepId"], "txId": tx_id}

    @app.post("/classics/{vin}/documents", status_code=201)
    def add_document(vin: str,
                     metadata: str = Form(default="{}"),
                     file: UploadFile = File(...),
                     claims: dict = Depends(current_user)):
        ident = identity_of(claims)
        ref = _intake_files([file])[0]
        tx_id, card = system.engine.submit_transaction(
            ident, "AddDocument", [vin, json.dumps(ref)])
        if system.cfg.anchor.mode == "sync":
            system.anchor_inline(ident, vin, [ref["cid"]], "document")
        else:
            system.anchor_background(ident, vin, [ref["cid"]], "document")
        return {"card": card, "document": ref, "txId": tx_id}

    def _vehicle_owner(vin: str) -> Optional[str]:
        raw = system.engine.read_state(f"classic:{vin}")
        if raw is None:
            return None
        return json.loads(raw)["ownerUserId"]

    @app.get("/media/{cid}")
    def get_media(cid: str, claims: dict = Depends(current_user)):
        content = system.media.get(cid)
        return Response(content=content, media_type="application/octet-stream")

    @app.get("/healthz")
    def healthz():
        return {"blockHeight": system.engine.block_height(), "status": "ok"}

    return app
