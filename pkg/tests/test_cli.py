from __future__ import annotations

from classicschain.cli import main
from classicschain.mediastore import MediaStore

from chainutil import make_chain


def test_ledger_verify_ok_and_fail(tmp_path, capsys):
    path = tmp_path / "chain.blocks"
    make_chain(path, 5)
    assert main(["ledger", "verify", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "OK"

    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0x01
    path.write_bytes(bytes(data))
    assert main(["ledger", "verify", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_identity_enroll_list_verify(tmp_path, capsys):
    data_dir = str(tmp_path / "net")
    assert main(["identity", "enroll", "--data-dir", data_dir,
                 "--org", "WorkshopsOrg", "--user", "shop1",
                 "--shop", "Coopers"]) == 0
    assert main(["identity", "list", "--data-dir", data_dir]) == 0
    out = capsys.readouterr().out
    assert "shop1" in out
    assert main(["identity", "verify", "--data-dir", data_dir,
                 "--org", "WorkshopsOrg", "--user", "shop1"]) == 0


def test_media_verify_all(tmp_path, capsys):
    store = MediaStore(tmp_path / "media")
    store.store(b"good bytes")
    bad = store.store(b"bytes to corrupt")
    assert main(["media", "verify-all", "--root", str(tmp_path / "media")]) == 0
    store.path_for(bad).write_bytes(b"corruption")
    assert main(["media", "verify-all", "--root", str(tmp_path / "media")]) == 1
    assert "CORRUPT" in capsys.readouterr().out


def test_bench_run_ledger_direct(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(
        '{"target": "ledger-direct", "mode": "open",'
        ' "mix": {"read_card": 1.0}, "sendRate": 40, "durationS": 0.5,'
        ' "concurrency": 8}')
    out_csv = tmp_path / "raw.csv"
    assert main(["bench", "run", "--spec", str(spec), "--out", str(out_csv)]) == 0
    out = capsys.readouterr().out
    assert "read_card" in out
    header = out_csv.read_text().splitlines()[0]
    assert header == "ts,op,latency_ms,status"
