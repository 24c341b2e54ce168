"""File wallet: one canonical-encoded identity file per enrolled user.

Layout: ``<dir>/<orgName>__<userId>.json`` holding the certificate and
the hex private-key seed. The file name doubles as the key reference.
"""

from __future__ import annotations

import os
from pathlib import Path

from ..codec import canonical_bytes, decode_canonical


class Wallet:
    def __init__(self, directory: str | os.PathLike):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def _path(self, org_name: str, user_id: str) -> Path:
        return self.dir / f"{org_name}__{user_id}.json"

    def store(self, identity) -> str:
        material = {
            "certificate": identity.certificate,
            "keyRef": identity.key_ref,
            "orgName": identity.org_name,
            "privateKey": identity.private_key_hex,
            "userId": identity.user_id,
        }
        path = self._path(identity.org_name, identity.user_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(canonical_bytes(material))
        tmp.replace(path)
        return str(path)

    def remove(self, org_name: str, user_id: str) -> None:
        self._path(org_name, user_id).unlink(missing_ok=True)

    def load_all(self, ca_roots: dict[str, str]) -> list:
        from .ca import identity_from_material

        identities = []
        for path in sorted(self.dir.glob("*.json")):
            material = decode_canonical(path.read_bytes())
            identities.append(identity_from_material(material, ca_roots))
        return identities

    def list_refs(self) -> list[str]:
        return [p.stem for p in sorted(self.dir.glob("*.json"))]
