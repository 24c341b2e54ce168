"""Command-line entry points.

    classicschain ledger verify <chain-file>
    classicschain identity enroll|list|verify ...
    classicschain media verify-all --root <dir>
    classicschain gateway serve --config <file>
    classicschain bench run|sweep|anchor-compare ...
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path


def _cmd_ledger_verify(args) -> int:
    from .ledger.blockfile import verify_chain

    result = verify_chain(args.path)
    if result.ok:
        print("OK")
        return 0
    print(f"FAIL block={result.first_bad_block} reason={result.reason}")
    return 1


def _cmd_identity_enroll(args) -> int:
    from .identity import Network

    net = Network.persistent(args.data_dir)
    from .identity.ca import ORG_ROLES

    role = args.role or ORG_ROLES[args.org]
    ident = net.enroll_identity(args.org, args.user, role,
                                {"shopName": args.shop} if args.shop else None)
    print(f"enrolled {ident.user_id} in {ident.org_name} (role {ident.role}), "
          f"keyRef {ident.key_ref}")
    return 0


def _cmd_identity_list(args) -> int:
    from .identity import Network

    net = Network.persistent(args.data_dir)
    for ident in sorted(net.identities(), key=lambda i: (i.org_name, i.user_id)):
        print(f"{ident.org_name:<16}{ident.user_id:<28}{ident.role}")
    return 0


def _cmd_identity_verify(args) -> int:
    from .identity import Network

    net = Network.persistent(args.data_dir)
    ident = net.get_identity(args.org, args.user)
    net.verify_certificate(ident.certificate)
    print(f"certificate of {args.user} verifies under {args.org} CA")
    return 0


def _cmd_media_verify_all(args) -> int:
    from .mediastore import MediaStore

    store = MediaStore(args.root)
    results = store.verify_all()
    bad = [cid for cid, ok in results if not ok]
    print(f"checked {len(results)} objects, {len(bad)} corrupt")
    for cid in bad:
        print(f"CORRUPT {cid}")
    return 1 if bad else 0


def _cmd_gateway_serve(args) -> int:
    import uvicorn

    from .gateway import GatewaySystem, create_app, load_config

    cfg = load_config(args.config)
    if not cfg.test_mode and not (cfg.tls_certfile and cfg.tls_keyfile):
        print("refusing to serve plain HTTP outside test mode; configure TLS "
              "or set testMode", file=sys.stderr)
        return 2
    system = GatewaySystem(cfg).start()
    app = create_app(system)
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port,
                    ssl_certfile=cfg.tls_certfile, ssl_keyfile=cfg.tls_keyfile,
                    log_level="info")
    finally:
        system.close()
    return 0


def _ephemeral_direct_target(tmp, n_vehicles=10):
    from .bench import LedgerDirectTarget
    from .identity import Network
    from .ledger import LedgerConfig, LedgerEngine
    from .ledger.raft import RaftConfig

    net = Network()
    engine = LedgerEngine(
        net, data_dir=Path(tmp) / "ledger",
        config=LedgerConfig(batch_timeout_ms=50,
                            raft=RaftConfig(election_timeout_min_ms=40,
                                            election_timeout_max_ms=80,
                                            heartbeat_ms=10)),
    ).start()
    target = LedgerDirectTarget(engine, net, n_vehicles=n_vehicles)
    return engine, target


def _ephemeral_rest_target(tmp):
    from fastapi.testclient import TestClient

    from .bench.targets import RestTarget
    from .gateway import GatewayConfig, GatewaySystem, create_app

    cfg = GatewayConfig(data_dir=str(Path(tmp) / "gw"), test_mode=True,
                        batch_timeout_ms=100)
    system = GatewaySystem(cfg).start()
    client = TestClient(create_app(system))

    def register(name, email, org, role):
        r = client.post("/users", json={"displayName": name, "email": email,
                                        "password": "bench-password-1",
                                        "org": org, "role": role})
        user_id = r.json()["userId"]
        token = client.post("/auth/login", json={
            "email": email, "password": "bench-password-1"}).json()["token"]
        return user_id, {"Authorization": f"Bearer {token}"}

    owner_id, owner_h = register("Bench Owner", "owner@bench.test", "OwnersOrg", "owner")
    shop_id, shop_h = register("Bench Shop", "shop@bench.test", "WorkshopsOrg", "restorer")
    vins = [f"RESTSEED{i:05d}" for i in range(10)]
    for vin in vins:
        client.post("/classics", json={"vin": vin, "make": "Mini", "model": "B",
                                       "registrationNumber": "r", "year": 1965,
                                       "ownerUserId": owner_id}, headers=shop_h)
    target = RestTarget(client, {"owner": owner_h, "shop": shop_h}, vins, owner_id)
    return system, target


def _cmd_bench_run(args) -> int:
    from .bench import run_workload
    from .bench.report import Collector, render_summary, write_csv
    from .bench.workload import WorkloadSpec

    spec = WorkloadSpec.from_dict(json.loads(Path(args.spec).read_text()))
    with tempfile.TemporaryDirectory(prefix="ccbench-") as tmp:
        if spec.target == "rest":
            system, target = _ephemeral_rest_target(tmp)
            closer = system.close
        else:
            engine, target = _ephemeral_direct_target(tmp)
            closer = engine.close
        try:
            collector = Collector()
            report = run_workload(spec, target.ops(), collector)
        finally:
            closer()
    if args.out:
        write_csv(collector.samples(), args.out)
        print(f"raw samples -> {args.out}")
    print(render_summary(
        report,
        header="workload report (absolute numbers are hardware-bound; "
               "compare shapes and ratios)",
    ))
    return 0


def _parse_rates(text: str) -> list[float]:
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        rates = []
        rate = start
        while rate <= stop + 1e-9:
            rates.append(rate)
            rate += step
        return rates
    return [float(x) for x in text.split(",")]


def _cmd_bench_sweep(args) -> int:
    from .bench import sweep_saturation
    from .bench.sweep import render_curve

    with tempfile.TemporaryDirectory(prefix="ccbench-") as tmp:
        engine, target = _ephemeral_direct_target(tmp)
        try:
            result = sweep_saturation(args.op, _parse_rates(args.rates),
                                      target.ops(), duration_s=args.duration,
                                      concurrency=args.concurrency)
        finally:
            engine.close()
    print(render_curve(result))
    return 0


def _cmd_bench_anchor_compare(args) -> int:
    from fastapi.testclient import TestClient

    from .bench.anchors import compare_anchor_modes, render_comparison
    from .gateway import GatewayConfig, GatewaySystem, create_app

    file_counts = [int(x) for x in args.file_counts.split(",")]

    def make_client(mode):
        tmp = tempfile.TemporaryDirectory(prefix=f"ccanchor-{mode}-")
        cfg = GatewayConfig(data_dir=str(Path(tmp.name) / "gw"), test_mode=True,
                            batch_timeout_ms=100)
        cfg.anchor.mode = mode
        cfg.anchor.delay_per_file_ms = args.delay_ms
        system = GatewaySystem(cfg).start()
        client = TestClient(create_app(system))
        r = client.post("/users", json={"displayName": "O", "email": f"o@{mode}.test",
                                        "password": "bench-password-1",
                                        "org": "OwnersOrg", "role": "owner"})
        owner_id = r.json()["userId"]
        r = client.post("/users", json={"displayName": "S", "email": f"s@{mode}.test",
                                        "password": "bench-password-1",
                                        "org": "WorkshopsOrg", "role": "restorer"})
        shop_id = r.json()["userId"]
        token = client.post("/auth/login", json={
            "email": f"s@{mode}.test", "password": "bench-password-1"}).json()["token"]
        shop_h = {"Authorization": f"Bearer {token}"}
        counter = [0]

        def new_vin():
            counter[0] += 1
            vin = f"ANCH{mode.upper()}{counter[0]:06d}"
            client.post("/classics", json={"vin": vin, "make": "M", "model": "X",
                                           "registrationNumber": "r", "year": 1965,
                                           "ownerUserId": owner_id}, headers=shop_h)
            ot = client.post("/auth/login", json={
                "email": f"o@{mode}.test", "password": "bench-password-1"}).json()["token"]
            client.post(f"/classics/{vin}/access",
                        json={"granteeUserId": shop_id, "level": "write"},
                        headers={"Authorization": f"Bearer {ot}"})
            return vin

        def cleanup():
            system.close()
            tmp.cleanup()

        return client, new_vin, shop_h, cleanup

    result = compare_anchor_modes(make_client, file_counts, args.requests)
    print(render_comparison(result))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="classicschain")
    sub = parser.add_subparsers(dest="command", required=True)

    ledger = sub.add_parser("ledger", help="chain file tooling")
    ledger_sub = ledger.add_subparsers(dest="sub", required=True)
    verify = ledger_sub.add_parser("verify", help="verify a chain file")
    verify.add_argument("path")
    verify.set_defaults(fn=_cmd_ledger_verify)

    identity = sub.add_parser("identity", help="enrollment and wallets")
    identity_sub = identity.add_subparsers(dest="sub", required=True)
    enroll = identity_sub.add_parser("enroll")
    enroll.add_argument("--data-dir", required=True)
    enroll.add_argument("--org", required=True)
    enroll.add_argument("--user", required=True)
    enroll.add_argument("--role")
    enroll.add_argument("--shop")
    enroll.set_defaults(fn=_cmd_identity_enroll)
    ilist = identity_sub.add_parser("list")
    ilist.add_argument("--data-dir", required=True)
    ilist.set_defaults(fn=_cmd_identity_list)
    iverify = identity_sub.add_parser("verify")
    iverify.add_argument("--data-dir", required=True)
    iverify.add_argument("--org", required=True)
    iverify.add_argument("--user", required=True)
    iverify.set_defaults(fn=_cmd_identity_verify)

    media = sub.add_parser("media", help="media store tooling")
    media_sub = media.add_subparsers(dest="sub", required=True)
    mverify = media_sub.add_parser("verify-all")
    mverify.add_argument("--root", required=True)
    mverify.set_defaults(fn=_cmd_media_verify_all)

    gateway = sub.add_parser("gateway", help="REST gateway")
    gateway_sub = gateway.add_subparsers(dest="sub", required=True)
    serve = gateway_sub.add_parser("serve")
    serve.add_argument("--config", required=True)
    serve.set_defaults(fn=_cmd_gateway_serve)

    bench = sub.add_parser("bench", help="load generation")
    bench_sub = bench.add_subparsers(dest="sub", required=True)
    brun = bench_sub.add_parser("run")
    brun.add_argument("--spec", required=True)
    brun.add_argument("--out", help="write raw samples CSV here")
    brun.set_defaults(fn=_cmd_bench_run)
    bsweep = bench_sub.add_parser("sweep")
    bsweep.add_argument("--op", default="write_register")
    bsweep.add_argument("--rates", default="5:100:5",
                        help="start:stop:step or comma list")
    bsweep.add_argument("--duration", type=float, default=10.0)
    bsweep.add_argument("--concurrency", type=int, default=64)
    bsweep.set_defaults(fn=_cmd_bench_sweep)
    bcomp = bench_sub.add_parser("anchor-compare")
    bcomp.add_argument("--file-counts", default="0,2,5")
    bcomp.add_argument("--requests", type=int, default=30)
    bcomp.add_argument("--delay-ms", type=int, default=1000)
    bcomp.set_defaults(fn=_cmd_bench_anchor_compare)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
