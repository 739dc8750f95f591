"""HTTP service: catalog, session lifecycle, foil submission, persistence.

Uses the in-process test client; the small budgets keep each explanation to a
few hundred simulator calls.
"""
import time

import pytest
from fastapi.testclient import TestClient

from foilscope.service import create_app

SMALL = {"budget": 120, "walk_length": 8}


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def _create(client, **overrides):
    body = {"map_id": "sokoban_switch", "seed": 5, "config": SMALL}
    body.update(overrides)
    return client.post("/sessions", json=body)


# --- catalog -----------------------------------------------------------------------


def test_map_catalog(client):
    response = client.get("/maps")
    assert response.status_code == 200
    payload = response.json()
    assert payload["v"] == 1
    by_id = {m["map_id"]: m for m in payload["maps"]}
    assert set(by_id) == {"sokoban_switch", "sokoban_cell", "key_quest_s1", "key_quest_s4"}
    switch = by_id["sokoban_switch"]
    assert switch["variants"] == ["sokoban-switch-prec", "sokoban-switch-cost"]
    assert switch["default_variant"] == "sokoban-switch-prec"
    assert by_id["key_quest_s1"]["variants"] == ["key-quest"]
    assert all(m["title"] for m in payload["maps"])


# --- session creation ---------------------------------------------------------------


def test_create_session_defaults_to_first_variant(client):
    response = _create(client)
    assert response.status_code == 201
    body = response.json()
    assert body["v"] == 1
    assert body["map_id"] == "sokoban_switch"
    assert body["variant"] == "sokoban-switch-prec"
    assert body["seed"] == 5
    assert body["plan_cost"] == 18.0
    assert body["history"] == []
    assert len(body["session_id"]) == 16
    # presentation extras alongside the session payload
    assert isinstance(body["grid"], list) and body["grid"][0].startswith("#")
    assert all("@" not in row and "$" not in row for row in body["grid"])
    assert len(body["plan_states"]) == len(body["plan"]) + 1
    assert body["plan_states"][0]["agent"] == [3, 1]
    names = [v["name"] for v in body["vocabulary_info"]]
    assert "switch_on" in names and "not_switch_on" in names
    info = {v["name"]: v["description"] for v in body["vocabulary_info"]}
    assert info["switch_on"] == "switch on"


def test_create_session_is_idempotent(client):
    first = _create(client)
    second = _create(client)
    assert first.status_code == second.status_code == 201
    assert first.json() == second.json()
    other_seed = _create(client, seed=6)
    assert other_seed.json()["session_id"] != first.json()["session_id"]


def test_alias_ids_pin_the_variant(client):
    cost = client.post(
        "/sessions", json={"map_id": "sokoban_switch_cost", "seed": 5, "config": SMALL}
    )
    assert cost.status_code == 201
    assert cost.json()["map_id"] == "sokoban_switch"
    assert cost.json()["variant"] == "sokoban-switch-cost"
    prec = client.post(
        "/sessions", json={"map_id": "sokoban_switch_prec", "seed": 5, "config": SMALL}
    )
    assert prec.json()["variant"] == "sokoban-switch-prec"
    assert prec.json()["session_id"] == _create(client).json()["session_id"]


def test_create_session_rejections(client):
    assert _create(client, map_id="atlantis").status_code == 404
    assert _create(client, variant="sokoban-moon-gravity").status_code == 422
    assert _create(client, config={"budget": 1, "mood": "upbeat"}).status_code == 422
    assert _create(client, config={"budget": -3}).status_code == 422


def test_get_session(client):
    created = _create(client).json()
    fetched = client.get(f"/sessions/{created['session_id']}")
    assert fetched.status_code == 200
    assert fetched.json() == created
    assert client.get("/sessions/0000000000000000").status_code == 404


# --- foil submission -----------------------------------------------------------------


def test_submit_failing_foil(client):
    session = _create(client).json()
    response = client.post(
        f"/sessions/{session['session_id']}/foils",
        json={"actions": ["push-right", "push-right"]},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["v"] == 1
    assert body["explanation"]["kind"] == "missing-precondition"
    assert body["explanation"]["concept"] == "switch_on"
    assert body["rendered_text"] == (
        "The action push-right failed in the state as the precondition "
        "switch_on was false in the state."
    )
    assert body["confidence"] == body["explanation"]["confidence"] > 0.9
    assert body["trace"][0] == 0.5
    assert len(body["trace"]) == SMALL["budget"] + 1


def test_submit_costlier_foil(client):
    session = _create(client, map_id="sokoban_switch_cost").json()
    foil = ["noop", "noop"] + session["plan"]
    response = client.post(f"/sessions/{session['session_id']}/foils", json={"actions": foil})
    assert response.status_code == 200
    body = response.json()
    assert body["explanation"]["kind"] == "cost-abstraction"
    assert body["explanation"]["foil_cost"] == 20.0
    assert body["trace"] is None
    entries = body["explanation"]["entries"]
    assert body["confidence"] == min(e["confidence"] for e in entries)


def test_submit_preferred_foil(client):
    session = _create(client).json()
    response = client.post(
        f"/sessions/{session['session_id']}/foils", json={"actions": session["plan"]}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["explanation"]["kind"] == "foil-preferred"
    assert body["confidence"] is None
    assert body["trace"] is None


def test_submit_foil_rejections(client):
    session = _create(client).json()
    sid = session["session_id"]
    empty = client.post(f"/sessions/{sid}/foils", json={"actions": []})
    assert empty.status_code == 422
    unknown = client.post(f"/sessions/{sid}/foils", json={"actions": ["moonwalk"]})
    assert unknown.status_code == 422
    assert unknown.json()["detail"] == {
        "message": "unknown action mnemonic 'moonwalk'",
        "token": "moonwalk",
    }
    missing = client.post("/sessions/feedfacefeedface/foils", json={"actions": ["noop"]})
    assert missing.status_code == 404


def test_history_accumulates_in_order(client):
    session = _create(client).json()
    sid = session["session_id"]
    client.post(f"/sessions/{sid}/foils", json={"actions": ["push-right", "push-right"]})
    client.post(f"/sessions/{sid}/foils", json={"actions": session["plan"]})
    body = client.get(f"/sessions/{sid}").json()
    kinds = [h["explanation"]["kind"] for h in body["history"]]
    assert kinds == ["missing-precondition", "foil-preferred"]
    assert body["history"][0]["foil"] == ["push-right", "push-right"]


# --- persistence ---------------------------------------------------------------------


def test_sessions_survive_restart(tmp_path):
    data_dir = str(tmp_path / "sessions")
    foil = {"actions": ["push-right", "push-right"]}
    # an uninterrupted control run: ask the same foil twice
    with TestClient(create_app()) as control:
        sid = _create(control).json()["session_id"]
        control.post(f"/sessions/{sid}/foils", json=foil)
        control_second = control.post(f"/sessions/{sid}/foils", json=foil).json()
    with TestClient(create_app(data_dir=data_dir)) as client:
        assert _create(client).json()["session_id"] == sid
        client.post(f"/sessions/{sid}/foils", json=foil)
        saved = client.get(f"/sessions/{sid}").json()
    # a fresh process replays the stored payload from its seeds
    with TestClient(create_app(data_dir=data_dir)) as client:
        restored = client.get(f"/sessions/{sid}")
        assert restored.status_code == 200
        assert restored.json() == saved
        # and continues exactly where the uninterrupted run would be
        again = client.post(f"/sessions/{sid}/foils", json=foil).json()
        assert again == control_second


# --- compute cap ----------------------------------------------------------------------


def test_over_cap_submissions_poll(client_factory=None):
    with TestClient(create_app(compute_cap=50)) as client:
        session = _create(client).json()  # budget 120 > cap 50
        sid = session["session_id"]
        accepted = client.post(
            f"/sessions/{sid}/foils", json={"actions": ["push-right", "push-right"]}
        )
        assert accepted.status_code == 202
        token = accepted.json()["poll"]
        deadline = time.monotonic() + 10.0
        while True:
            polled = client.get(f"/polls/{token}")
            if polled.status_code == 200:
                break
            assert polled.status_code == 202
            assert time.monotonic() < deadline, "poll never completed"
            time.sleep(0.02)
        body = polled.json()
        assert body["explanation"]["concept"] == "switch_on"
        assert client.get("/polls/deadbeef").status_code == 404
        # under-cap requests still answer inline
        small = _create(client, config={"budget": 40, "walk_length": 8}).json()
        inline = client.post(
            f"/sessions/{small['session_id']}/foils",
            json={"actions": ["push-right", "push-right"]},
        )
        assert inline.status_code == 200
