"""Test rig for gateway-level suites: an in-process system + HTTP client."""

from __future__ import annotations

from contextlib import contextmanager

from fastapi.testclient import TestClient

from classicschain.gateway import GatewayConfig, GatewaySystem, create_app

from engineutil import fast_config


def make_system(tmp_path, anchor_mode="async", delay_per_file_ms=0,
                batch_timeout_ms=25, webhooks=None) -> GatewaySystem:
    cfg = GatewayConfig(
        data_dir=str(tmp_path / "data"),
        test_mode=True,
        batch_timeout_ms=batch_timeout_ms,
        webhooks=webhooks or [],
    )
    cfg.anchor.mode = anchor_mode
    cfg.anchor.delay_per_file_ms = delay_per_file_ms
    cfg.anchor.backoff_base_s = 0.05
    return GatewaySystem(cfg, ledger_config=fast_config(batch_timeout_ms=batch_timeout_ms))


@contextmanager
def gateway_client(tmp_path, **kwargs):
    system = make_system(tmp_path, **kwargs)
    system.start()
    try:
        client = TestClient(create_app(system), raise_server_exceptions=True)
        yield client, system
    finally:
        system.close()


def register_and_login(client, name, email, org, role, password="correct horse 9"):
    r = client.post("/users", json={
        "displayName": name, "email": email, "password": password,
        "org": org, "role": role,
    })
    assert r.status_code == 201, r.text
    user_id = r.json()["userId"]
    r = client.post("/auth/login", json={"email": email, "password": password})
    assert r.status_code == 200, r.text
    token = r.json()["token"]
    return user_id, {"Authorization": f"Bearer {token}"}


def standard_users(client):
    users = {}
    users["owner"] = register_and_login(client, "Alice Owner", "alice@example.test",
                                        "OwnersOrg", "owner")
    users["buyer"] = register_and_login(client, "Bob Buyer", "bob@example.test",
                                        "OwnersOrg", "owner")
    users["shop"] = register_and_login(client, "Coopers Garage", "shop@example.test",
                                       "WorkshopsOrg", "restorer")
    users["cert"] = register_and_login(client, "Vera Veritas", "cert@example.test",
                                       "CertifiersOrg", "certifier")
    return users


def register_vehicle(client, users, vin="1275MK1S", owner_key="owner",
                     registrar_key="shop"):
    owner_id = users[owner_key][0]
    r = client.post("/classics", json={
        "vin": vin, "make": "Mini", "model": "Cooper S",
        "registrationNumber": "AA-11-22", "year": 1967,
        "ownerUserId": owner_id,
    }, headers=users[registrar_key][1])
    assert r.status_code == 201, r.text
    return r.json()
