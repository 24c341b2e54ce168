#!/usr/bin/env python3
"""Record UI test fixtures from the real gateway.

Spins up an in-process gateway, walks the lifecycle scenarios the UI
tests need, and saves the raw response bodies under frontend/fixtures/.
Run from the repository root:

    python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import io
import json
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
FIXTURES = REPO_ROOT / "frontend" / "fixtures"
sys.path.insert(0, str(REPO_ROOT / "src"))
sys.path.insert(0, str(REPO_ROOT / "tests"))


def main() -> None:
    from fastapi.testclient import TestClient

    from classicschain.gateway import GatewayConfig, GatewaySystem, create_app

    from engineutil import fast_config

    FIXTURES.mkdir(parents=True, exist_ok=True)
    saved: dict[str, object] = {}

    def save(name: str, body: object) -> None:
        saved[name] = body
        (FIXTURES / f"{name}.json").write_text(
            json.dumps(body, indent=2, sort_keys=True) + "\n")

    with tempfile.TemporaryDirectory(prefix="ccfixtures-") as tmp:
        cfg = GatewayConfig(data_dir=f"{tmp}/data", test_mode=True,
                            batch_timeout_ms=25)
        system = GatewaySystem(cfg, ledger_config=fast_config(batch_timeout_ms=25))
        system.start()
        client = TestClient(create_app(system))
        try:
            def register(name, email, org, role):
                r = client.post("/users", json={
                    "displayName": name, "email": email,
                    "password": "fixture-pw-123", "org": org, "role": role})
                assert r.status_code == 201, r.text
                uid = r.json()["userId"]
                login = client.post("/auth/login", json={
                    "email": email, "password": "fixture-pw-123"})
                assert login.status_code == 200
                return uid, {"Authorization": f"Bearer {login.json()['token']}"}, \
                    login.json()

            owner_id, owner_h, owner_login = register(
                "Olivia Owner", "olivia@fixtures.test", "OwnersOrg", "owner")
            buyer_id, buyer_h, _ = register(
                "Ben Buyer", "ben@fixtures.test", "OwnersOrg", "owner")
            shop_id, shop_h, _ = register(
                "Coopers Garage", "shop@fixtures.test", "WorkshopsOrg", "restorer")
            cert_id, cert_h, _ = register(
                "Vera Veritas", "cert@fixtures.test", "CertifiersOrg", "certifier")
            save("login_owner", owner_login)
            save("users", {"owner": owner_id, "buyer": buyer_id,
                           "shop": shop_id, "certifier": cert_id})

            # Empty garage before anything is registered.
            r = client.get(f"/users/{owner_id}/classics", headers=owner_h)
            save("garage_empty", r.json())

            def register_vehicle(vin, make, model, year):
                r = client.post("/classics", json={
                    "vin": vin, "make": make, "model": model,
                    "registrationNumber": f"FX-{vin[-2:]}", "year": year,
                    "ownerUserId": owner_id}, headers=shop_h)
                assert r.status_code == 201, r.text
                return r.json()

            register_vehicle("1275MK1S", "Mini", "Cooper S", 1967)
            register_vehicle("E2ECAR01", "Jaguar", "E-Type", 1963)
            register_vehicle("911SC1977", "Porsche", "911 SC", 1977)

            # Owner grants: shop writes on the Mini, buyer reads the Jaguar.
            r = client.post("/classics/1275MK1S/access",
                            json={"granteeUserId": shop_id, "level": "write"},
                            headers=owner_h)
            save("grant_response", r.json())
            client.post("/classics/E2ECAR01/access",
                        json={"granteeUserId": buyer_id, "level": "read"},
                        headers=owner_h)

            # Garage views.
            r = client.get(f"/users/{owner_id}/classics", headers=owner_h)
            save("garage_owner", r.json())
            r = client.get(f"/users/{buyer_id}/classics", headers=buyer_h)
            save("garage_buyer_before_revoke", r.json())

            # Step upload with five photos: response has pending evidence.
            files = [("files", (f"photo{i}.jpg",
                                io.BytesIO(b"fixture-jpeg-" + bytes([65 + i]) * 64),
                                "image/jpeg")) for i in range(5)]
            r = client.post(
                "/classics/1275MK1S/restorations",
                data={"metadata": json.dumps({
                    "title": "Full respray", "activityType": "paint",
                    "description": "Bare-metal respray in Tartan Red",
                    "materials": ["primer", "Tartan Red 2K"],
                    "tools": ["spray gun"]})},
                files=files, headers=shop_h)
            assert r.status_code == 201, r.text
            save("upload_response", r.json())

            # Card while anchoring is still pending.
            r = client.get("/classics/1275MK1S/card", headers=owner_h)
            save("card_pending_evidence", r.json())

            # After the background worker finishes, badges flip.
            assert system.anchors.wait_idle(30)
            r = client.get("/classics/1275MK1S/card", headers=owner_h)
            save("card_anchored", r.json())

            # Certification (certifier needs a read grant first).
            client.post("/classics/1275MK1S/access",
                        json={"granteeUserId": cert_id, "level": "read"},
                        headers=owner_h)
            r = client.post("/classics/1275MK1S/certification", headers=cert_h)
            assert r.status_code == 200
            r = client.get("/classics/1275MK1S/card", headers=owner_h)
            save("card_certified", r.json())

            # Histories: a short one and a long (120+ version) one. The
            # long one is churned with a dedicated grantee so other
            # fixtures' garages stay untouched.
            r = client.get("/classics/1275MK1S/history", headers=owner_h)
            save("history_small", r.json())
            churn_id, _, _ = register("Churn", "churn@fixtures.test",
                                      "OwnersOrg", "owner")
            for i in range(117):
                client.post("/classics/911SC1977/access",
                            json={"granteeUserId": churn_id,
                                  "level": ["read", "write"][i % 2]},
                            headers=owner_h)
            r = client.get("/classics/911SC1977/history", headers=owner_h)
            assert len(r.json()["history"]) >= 118
            save("history_long", r.json())

            # Revocation: buyer's Jaguar grant disappears from the garage.
            r = client.delete(f"/classics/E2ECAR01/access/{buyer_id}",
                              headers=owner_h)
            save("revoke_response", r.json())
            r = client.get(f"/users/{buyer_id}/classics", headers=buyer_h)
            save("garage_buyer_after_revoke", r.json())

            # Transfer the Jaguar to the buyer.
            r = client.post("/classics/E2ECAR01/owner",
                            json={"newOwnerUserId": buyer_id}, headers=owner_h)
            assert r.status_code == 200
            save("transfer_response", r.json())

            # Error bodies the UI must handle.
            r = client.get("/classics/E2ECAR01/card", headers=owner_h)
            assert r.status_code == 403
            save("error_forbidden", r.json())
        finally:
            system.close()

    manifest = {name: f"{name}.json" for name in sorted(saved)}
    (FIXTURES / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"recorded {len(saved)} fixtures into {FIXTURES}")


if __name__ == "__main__":
    main()
