from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from ccslm.cli import run_cli
from ccslm.service import create_app

PROGRAMS = Path(__file__).parent.parent / "programs"

STORE = (PROGRAMS / "store.ccslm").read_text()
LOOP = (PROGRAMS / "loop.ccslm").read_text()


@pytest.fixture
def client():
    return TestClient(create_app())


def load(client, source):
    response = client.post("/program", json={"source": source})
    assert response.status_code == 200, response.text
    return response.json()["programId"]


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_post_program_ok(client):
    response = client.post("/program", json={"source": STORE})
    assert response.status_code == 200
    body = response.json()
    assert body["diagnostics"] == []
    assert body["programId"]


def test_post_program_errors(client):
    response = client.post("/program", json={"source": "main = a:{tau}.0_0"})
    assert response.status_code == 400
    assert response.json()["diagnostics"]
    response = client.post("/program", json={"source": "main = sigma.0_0"})
    assert response.status_code == 400
    assert any(d["code"] == "wf/clock-stability" for d in response.json()["diagnostics"])


def test_fresh_id_per_post(client):
    assert load(client, STORE) != load(client, STORE)


def test_transitions_match_engine(client):
    pid = load(client, "main = a:{a}.0_0 | ~a.0_0")
    listing = client.get(f"/program/{pid}/state/0/transitions").json()
    assert [e["action"] for e in listing] == ["tau", "~a"]
    tau = listing[0]
    assert tau["blocking"] == [{"horizon": 0, "labels": []}, {"horizon": 0, "labels": ["a"]}]
    assert tau["prediction"] == {"h0": [], "h1": []}
    assert [e["index"] for e in listing] == [0, 1]


def test_mutually_self_blocking_pair_has_single_entry(client):
    # with both sides self-blocking, even the solo steps are suppressed
    pid = load(client, "main = a:{a}.0_0 | ~a:{~a}.0_0")
    listing = client.get(f"/program/{pid}/state/0/transitions").json()
    assert len(listing) == 1
    assert listing[0]["action"] == "tau"


def test_step_and_undo(client):
    pid = load(client, STORE)
    listing = client.get(f"/program/{pid}/state/0/transitions").json()
    assert len(listing) == 1 and listing[0]["action"] == "tau"
    step = client.post(f"/program/{pid}/step", json={"from": 0, "index": 0})
    assert step.status_code == 200
    new_state = step.json()["newState"]
    assert new_state == listing[0]["target"]
    undo = client.post(f"/program/{pid}/undo")
    assert undo.status_code == 200
    assert undo.json()["newState"] == 0


def test_step_conflicts(client):
    pid = load(client, STORE)
    # index out of range
    response = client.post(f"/program/{pid}/step", json={"from": 0, "index": 99})
    assert response.status_code == 409
    # stale cursor
    client.get(f"/program/{pid}/state/0/transitions")
    client.post(f"/program/{pid}/step", json={"from": 0, "index": 0})
    response = client.post(f"/program/{pid}/step", json={"from": 0, "index": 0})
    assert response.status_code == 409
    # undo below the initial state
    client.post(f"/program/{pid}/undo")
    response = client.post(f"/program/{pid}/undo")
    assert response.status_code == 409


def test_unknown_ids(client):
    assert client.get("/program/999/state/0/transitions").status_code == 404
    assert client.post("/program/999/step", json={"from": 0, "index": 0}).status_code == 404
    pid = load(client, STORE)
    assert client.get(f"/program/{pid}/state/42/transitions").status_code == 404
    assert client.post(f"/program/{pid}/step", json={"from": 42, "index": 0}).status_code == 404
    assert client.post(f"/program/{pid}/step", json={"index": 0}).status_code == 400


def test_lts_and_coherence_endpoints(client):
    pid = load(client, LOOP)
    lts = client.get(f"/program/{pid}/lts").json()
    assert len(lts["states"]) == 3
    # the loop's once-per-cycle w is not self-blocking, so its self-pair
    # is an independent divergence without reconvergence
    report = client.get(f"/program/{pid}/coherence").json()
    assert report["verdict"] == "incoherent"
    pid = load(client, STORE)
    report = client.get(f"/program/{pid}/coherence").json()
    assert report["verdict"] == "coherent"


def test_api_matches_cli_bytes(client, capsys, tmp_path):
    """The CLI and the API answer the same question byte-identically."""
    pid = load(client, LOOP)
    api_lts = client.get(f"/program/{pid}/lts").content.decode()
    assert run_cli(["lts", str(PROGRAMS / "loop.ccslm"), "--format", "json"]) == 0
    cli_lts = capsys.readouterr().out.strip()
    assert cli_lts == api_lts

    api_report = client.get(f"/program/{pid}/coherence").content.decode()
    assert run_cli(["coherence", str(PROGRAMS / "loop.ccslm"), "--json"]) == 1
    cli_report = capsys.readouterr().out.strip()
    assert cli_report == api_report


def test_transitions_listing_matches_cli_step(client, capsys):
    """The stepper and the API list the same transitions for the same state."""
    import io
    import sys

    pid = load(client, STORE)
    api = client.get(f"/program/{pid}/state/0/transitions").json()

    old_stdin = sys.stdin
    sys.stdin = io.StringIO("q\n")
    try:
        assert run_cli(["step", str(PROGRAMS / "store.ccslm")]) == 0
    finally:
        sys.stdin = old_stdin
    out = capsys.readouterr().out
    for entry in api:
        assert f"[{entry['index']}]" in out
        assert f"-> {entry['target']}" in out


def test_sessions_do_not_interfere(client):
    pid1 = load(client, STORE)
    pid2 = load(client, STORE)
    client.get(f"/program/{pid1}/state/0/transitions")
    client.post(f"/program/{pid1}/step", json={"from": 0, "index": 0})
    listing = client.get(f"/program/{pid2}/state/0/transitions")
    assert listing.status_code == 200
    step = client.post(f"/program/{pid2}/step", json={"from": 0, "index": 0})
    assert step.status_code == 200
