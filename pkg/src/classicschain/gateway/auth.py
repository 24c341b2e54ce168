"""Credential hashing and self-contained session tokens.

Passwords: scrypt (memory-hard) with a per-user random salt, encoded as
``scrypt$N$r$p$<salt hex>$<key hex>``. Verification is constant-time and
runs the same work for unknown accounts so login timing does not reveal
whether an email exists.

Tokens: compact signed claims, JWT-shaped (``base64url(header).
base64url(claims).base64url(sig)``) with HMAC-SHA256 under the gateway
token key. Any replica holding the key can verify, so the gateway stays
stateless.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import secrets
import time
from typing import Optional

_SCRYPT_N = 2**14
_SCRYPT_R = 8
_SCRYPT_P = 1

BAD_TOKEN = "BAD_TOKEN"
TOKEN_EXPIRED = "TOKEN_EXPIRED"


class TokenError(Exception):
    def __init__(self, code: str):
        super().__init__(code)
        self.code = code


def hash_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    key = hashlib.scrypt(password.encode("utf-8"), salt=salt,
                         n=_SCRYPT_N, r=_SCRYPT_R, p=_SCRYPT_P, dklen=32)
    return f"scrypt${_SCRYPT_N}${_SCRYPT_R}${_SCRYPT_P}${salt.hex()}${key.hex()}"


_DUMMY_HASH = hash_password("decoy-password-for-constant-time")


def verify_password(password: str, encoded: Optional[str]) -> bool:
    """Check *password* against *encoded*; None runs the decoy hash."""
    if encoded is None:
        encoded = _DUMMY_HASH
        password = password + "\x00decoy"
    try:
        scheme, n, r, p, salt_hex, key_hex = encoded.split("$")
        if scheme != "scrypt":
            return False
        key = hashlib.scrypt(password.encode("utf-8"), salt=bytes.fromhex(salt_hex),
                             n=int(n), r=int(r), p=int(p),
                             dklen=len(key_hex) // 2)
        return hmac.compare_digest(key.hex(), key_hex)
    except (ValueError, TypeError):
        return False


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _unb64(text: str) -> bytes:
    pad = "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(text + pad)


class TokenSigner:
    def __init__(self, key: bytes, expiry_s: int = 24 * 3600,
                 clock=None):
        self._key = key
        self.expiry_s = expiry_s
        self._clock = clock or time.time

    def issue(self, user_id: str, org_name: str, role: str) -> tuple[str, int]:
        now = int(self._clock())
        expiry = now + self.expiry_s
        header = _b64(json.dumps({"alg": "HS256", "typ": "JWT"},
                                 separators=(",", ":")).encode())
        claims = _b64(json.dumps({
            "exp": expiry, "iat": now, "org": org_name, "role": role, "sub": user_id,
        }, separators=(",", ":"), sort_keys=True).encode())
        body = f"{header}.{claims}"
        sig = _b64(hmac.new(self._key, body.encode("ascii"), hashlib.sha256).digest())
        return f"{body}.{sig}", expiry

    def verify(self, token: str) -> dict:
        try:
            header, claims, sig = token.split(".")
            body = f"{header}.{claims}"
            expected = hmac.new(self._key, body.encode("ascii"), hashlib.sha256).digest()
            if not hmac.compare_digest(expected, _unb64(sig)):
                raise TokenError(BAD_TOKEN)
            payload = json.loads(_unb64(claims))
        except TokenError:
            raise
        except Exception as exc:
            raise TokenError(BAD_TOKEN) from exc
        if payload.get("exp", 0) < self._clock():
            raise TokenError(TOKEN_EXPIRED)
        return payload


def load_or_create_token_key(path) -> bytes:
    """Token key file shared by replicas pointed at the same data dir."""
    from pathlib import Path

    path = Path(path)
    if path.exists():
        return bytes.fromhex(path.read_text().strip())
    key = os.urandom(32)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(key.hex())
    return key
