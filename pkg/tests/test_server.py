from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from chordblocks.server import create_app


@pytest.fixture
def client(store_dir):
    app = create_app(store_dir=str(store_dir))
    with TestClient(app) as c:
        yield c


def act(client, session_id: str, payload: dict):
    return client.post(f"/sessions/{session_id}/actions", json=payload)


def new_session(client) -> str:
    response = client.post("/sessions", json={"session_id": "s1", "now": 0.0})
    assert response.json()["ok"]
    return response.json()["session"]["id"]


class TestStaticEndpoints:
    def test_levels_in_teaching_order(self, client):
        body = client.get("/levels").json()
        assert body["ok"]
        assert [lv["teaches"] for lv in body["levels"]] == [
            "I", "IV", "V", "ii", "iii", "vi", "vii",
        ]
        assert body["levels"][0]["scale_circle"] == ["C", "D", "E", "F", "G", "A", "B"]

    def test_symbols_match_engine_table(self, client):
        body = client.get("/symbols").json()
        by_degree = {s["degree"]: s for s in body["symbols"]}
        assert by_degree["I"]["symbol"] == {
            "arrangement": "single", "shapes": ["square"],
        }
        assert by_degree["vii"]["symbol"] == {
            "arrangement": "doubled", "shapes": ["triangle", "triangle"],
        }
        assert by_degree["vi"]["symbol"] == {
            "arrangement": "overlap", "shapes": ["square", "circle"],
        }

    def test_matrix_totals(self, client):
        matrix = client.get("/matrix").json()["matrix"]
        assert matrix["allowed_count"] == 45

    def test_analyze_ok(self, client):
        response = client.post(
            "/analyze", json={"degrees": ["I", "IV", "I", "V", "I"]}
        )
        analysis = response.json()["analysis"]
        assert analysis["base"] == ["I", "V", "I"]
        assert analysis["prolongations"] == [
            {"kind": "neighbor", "anchor": 0, "inner": ["IV"]}
        ]

    def test_analyze_unparseable(self, client):
        response = client.post("/analyze", json={"degrees": ["I", "V", "IV"]})
        assert response.status_code == 400
        body = response.json()
        assert body["ok"] is False
        assert body["error"] == "E_UNPARSEABLE"
        assert "1" in body["message"]

    def test_render_returns_midi_bytes(self, client):
        building = client.get("/levels").json()["levels"][2]["demo_building"]
        response = client.post("/render", json={"building": building})
        assert response.status_code == 200
        assert response.headers["content-type"] == "audio/midi"
        assert response.content.startswith(b"MThd")

    def test_render_rejects_invalid_building(self, client):
        bad = {
            "key": "C",
            "base": [
                {"degree": "V", "tenon": ["dominant", "tonic"],
                 "mortise": ["dominant"]},
                {"degree": "IV", "tenon": ["tonic", "subdominant", "dominant"],
                 "mortise": ["subdominant"]},
            ],
            "prolongations": [],
        }
        response = client.post("/render", json={"building": bad})
        assert response.status_code == 400
        assert response.json()["error"] == "E_VALIDATION_FAILED"

    def test_unknown_fields_rejected(self, client):
        response = client.post(
            "/analyze", json={"degrees": ["I"], "surprise": True}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["ok"] is False
        assert body["error"] == "E_SCHEMA"


class TestSessionEndpoints:
    def test_create_and_fetch(self, client):
        session_id = new_session(client)
        body = client.get(f"/sessions/{session_id}").json()
        assert body["session"]["mode"] == "idle"
        assert body["session"]["unlocks"]["1"] == "unlocked"
        assert body["session"]["unlocks"]["2"] == "locked"

    def test_missing_session_404(self, client):
        response = client.get("/sessions/ghost")
        assert response.status_code == 404
        assert response.json()["error"] == "E_NOT_FOUND"

    def test_locked_level_rejected(self, client):
        session_id = new_session(client)
        response = act(client, session_id,
                       {"action": "start_level", "level": 3, "now": 0.0})
        assert response.status_code == 400
        assert response.json()["error"] == "E_LOCKED_LEVEL"

    def test_illegal_transition_code(self, client):
        session_id = new_session(client)
        act(client, session_id, {"action": "start_level", "level": 1, "now": 0.0})
        response = act(client, session_id,
                       {"action": "advance", "to": "submit", "now": 1.0})
        assert response.status_code == 400
        assert response.json()["error"] == "E_ILLEGAL_TRANSITION"

    def test_unknown_action_rejected_by_schema(self, client):
        session_id = new_session(client)
        response = act(client, session_id, {"action": "explode"})
        assert response.status_code == 422
        assert response.json()["error"] == "E_SCHEMA"

    def test_action_with_unknown_field_rejected(self, client):
        session_id = new_session(client)
        response = act(client, session_id,
                       {"action": "start_level", "level": 1, "cheat": True})
        assert response.status_code == 422

    def test_probe_row_outside_enum_rejected(self, client):
        session_id = new_session(client)
        response = act(client, session_id,
                       {"action": "probe", "block": "b", "x": 0.0, "y": 5})
        assert response.status_code == 422
        assert response.json()["error"] == "E_SCHEMA"

    def test_garbage_arrangement_keys_rejected(self, client):
        session_id = new_session(client)
        act(client, session_id, {"action": "start_level", "level": 1, "now": 0.0})
        response = act(client, session_id, {
            "action": "advance", "to": "submit", "arrangement": {"abc": "b0"},
        })
        assert response.status_code == 400
        assert response.json()["error"] == "E_SCHEMA"

    def test_render_bounds_enforced(self, client):
        building = client.get("/levels").json()["levels"][0]["demo_building"]
        response = client.post(
            "/render", json={"building": building, "tempo_bpm": 0}
        )
        assert response.status_code == 422
        assert response.json()["error"] == "E_SCHEMA"

    def complete_level(self, client, session_id: str, level: int):
        act(client, session_id,
            {"action": "start_level", "level": level, "now": 0.0})
        step = "intro"
        while step != "reconstruct":
            response = act(client, session_id,
                           {"action": "advance", "to": "next", "now": 0.0})
            step = response.json()["result"]["step"]
        snapshot = client.get(f"/sessions/{session_id}").json()["session"]
        arrangement = self.solve(snapshot)
        response = act(client, session_id, {
            "action": "advance", "to": "submit",
            "arrangement": arrangement, "now": 1.0,
        })
        assert response.json()["result"]["step"] == "complete"

    @staticmethod
    def solve(snapshot: dict) -> dict[str, str]:
        """Derive the solved arrangement from public data only."""
        building = snapshot["demo_building"]
        slots = snapshot["puzzle"]["slots"]
        blocks = {b["id"]: b["degree"] for b in snapshot["puzzle"]["blocks"]}
        wanted = {}
        for slot in slots:
            if slot["role"] == "base":
                degree = building["base"][slot["anchor"]]["degree"]
            else:
                match = next(
                    p for p in building["prolongations"]
                    if p["kind"] == slot["role"] and p["anchor"] == slot["anchor"]
                )
                degree = match["inner"][slot["inner_index"]]
            wanted[slot["index"]] = degree
        arrangement: dict[str, str] = {}
        free = dict(blocks)
        for index, degree in wanted.items():
            block_id = next(b for b, d in free.items() if d == degree)
            del free[block_id]
            arrangement[str(index)] = block_id
        return arrangement

    def test_full_level_via_api(self, client):
        session_id = new_session(client)
        self.complete_level(client, session_id, 1)
        snapshot = client.get(f"/sessions/{session_id}").json()["session"]
        assert snapshot["progress"]["completed_levels"] == [1]
        assert [e["degree"] for e in snapshot["palette"]] == ["I"]

    def test_event_stream_matches_command_order(self, client):
        session_id = new_session(client)
        act(client, session_id, {"action": "start_level", "level": 1, "now": 0.0})
        act(client, session_id, {"action": "advance", "to": "next", "now": 1.0})
        body = client.get(f"/sessions/{session_id}/events.json").json()
        types = [e["type"] for e in body["events"]]
        assert types == ["session_started", "level_started", "step_advanced"]
        incremental = client.get(
            f"/sessions/{session_id}/events.json", params={"after": 1}
        ).json()
        assert [e["seq"] for e in incremental["events"]] == [2]

    def test_sse_stream_replays_events(self, client):
        session_id = new_session(client)
        act(client, session_id, {"action": "start_level", "level": 1, "now": 0.0})
        with client.stream(
            "GET", f"/sessions/{session_id}/events", params={"after": -1}
        ) as response:
            payload = b"".join(response.iter_raw())
        frames = [f for f in payload.decode().split("\n\n") if f.strip()]
        assert len(frames) == 2
        assert frames[0].startswith("id: 0\nevent: session_started")
        data_line = [l for l in frames[1].splitlines() if l.startswith("data:")][0]
        record = json.loads(data_line[5:])
        assert record["type"] == "level_started"
        assert record["data"]["level"] == 1

    def test_save_and_load_via_api(self, client):
        session_id = new_session(client)
        act(client, session_id, {"action": "start_level", "level": 1, "now": 0.0})
        response = act(client, session_id, {"action": "save"})
        assert response.json()["ok"]
        response = client.post("/sessions/load", json={"session_id": session_id})
        assert response.json()["session"]["step"] == "intro"

    def test_probe_attach_over_protocol(self, client):
        session_id = new_session(client)
        self.complete_level(client, session_id, 1)
        act(client, session_id, {"action": "enter_creation", "now": 2.0})
        a = act(client, session_id,
                {"action": "assemble", "degree": "I", "now": 2.0})
        b = act(client, session_id,
                {"action": "assemble", "degree": "I", "now": 2.0})
        a_id = a.json()["result"]["id"]
        b_id = b.json()["result"]["id"]
        act(client, session_id, {"action": "place_seed", "block": a_id, "now": 3.0})
        probe = act(client, session_id, {
            "action": "probe", "block": b_id, "x": 1.1, "y": 0, "now": 4.0,
        })
        result = probe.json()["result"]
        assert result["kind"] == "attract"
        assert result["click_sound"] is True
        attach = act(client, session_id, {
            "action": "attach", "block": b_id, "target": a_id,
            "side": "right", "now": 5.0,
        })
        assert attach.json()["result"] == {"x": 1, "y": 0}
