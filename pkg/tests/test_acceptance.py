"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the checklist.
Every expected value is either computed by an independently coded oracle
in this file (or oracles.py / smf_reader.py) or asserted directly from
fixed definitions; nothing is copied out of the implementation.
"""

from __future__ import annotations

import itertools
import json
import subprocess
import sys
import time
from collections import Counter

import pytest
from fastapi.testclient import TestClient

from chordblocks.blocks import DEGREES, can_connect, make_block
from chordblocks.content import (
    LEVEL_FILE_NAMES,
    canonical_level_doc,
    default_content_dir,
    dump_canonical,
    read_json,
)
from chordblocks.grammar import (
    UnparseableSequence,
    check_reconstruction,
    flatten,
    parse_building,
    shuffle_puzzle,
)
from chordblocks.learning import level_sequence
from chordblocks.midi import playback_events, render_midi
from chordblocks.server import create_app
from chordblocks.session import load_session, new_session, save_session
from chordblocks.theory import Key, ScaleDegree

from oracles import (
    decomposition_shape,
    greedy_decomposition,
    oracle_classify,
    oracle_connects,
)
from smf_reader import read_smf

C = Key.of("C")


def passed(name: str) -> None:
    print(f"ACCEPTANCE: {name}: PASS")


class TestCompatibilityOracle:
    def test_brute_force_matches_rule_table_oracle(self):
        start = time.monotonic()
        blocks = {d: make_block(d, block_id=d.roman_label) for d in DEGREES}
        forbidden = set()
        for a in DEGREES:
            for b in DEGREES:
                engine = can_connect(blocks[a], blocks[b])
                oracle = oracle_connects(a.roman_label, b.roman_label)
                assert engine == oracle, (a, b)
                if not engine:
                    forbidden.add((a.roman_label, b.roman_label))
        assert forbidden == {
            ("V", "IV"), ("V", "ii"), ("vii", "IV"), ("vii", "ii"),
        }
        assert 49 - len(forbidden) == 45
        elapsed = time.monotonic() - start
        assert elapsed < 1.0, f"compatibility check took {elapsed:.3f}s"
        passed("compatibility oracle (49 pairs, 4 forbidden, < 1s)")


class TestGrammarExhaustiveness:
    def test_all_sequences_up_to_length_4(self):
        start = time.monotonic()
        degrees = list(ScaleDegree)
        checked = 0
        for n in (1, 2, 3, 4):
            for combo in itertools.product(degrees, repeat=n):
                checked += 1
                seq = tuple(d.roman_label for d in combo)
                first_break = next(
                    (
                        i
                        for i, (a, b) in enumerate(zip(seq, seq[1:]))
                        if not oracle_connects(a, b)
                    ),
                    None,
                )
                if first_break is not None:
                    with pytest.raises(UnparseableSequence) as err:
                        parse_building(list(combo), C)
                    assert err.value.index == first_break, seq
                    continue
                tree = parse_building(list(combo), C)
                assert tuple(
                    d.roman_label for d in flatten(tree.building)
                ) == seq, seq
                expected = greedy_decomposition(seq)
                assert expected is not None, seq
                base, prolongs = decomposition_shape(expected)
                assert tuple(
                    b.degree.roman_label for b in tree.building.base
                ) == base, seq
                assert tuple(
                    (
                        p.kind.value,
                        p.anchor,
                        tuple(b.degree.roman_label for b in p.inner),
                    )
                    for p in tree.building.prolongations
                ) == prolongs, seq
        assert checked == 2800
        elapsed = time.monotonic() - start
        assert elapsed < 10.0, f"grammar sweep took {elapsed:.3f}s"
        passed(f"grammar exhaustiveness ({checked} sequences, flatten∘parse = id, < 10s)")

    def test_classifier_agrees_with_oracle(self):
        from chordblocks.grammar import StructureKind, classify_segment

        mapping = {
            StructureKind.NEIGHBOR: "neighbor",
            StructureKind.PASSING: "passing",
            StructureKind.NATURAL: "natural",
            None: None,
        }
        total = 0
        for n in (2, 3, 4):
            for combo in itertools.product(ScaleDegree, repeat=n):
                total += 1
                got = classify_segment(list(combo), C)
                want = oracle_classify(tuple(d.roman_label for d in combo))
                assert mapping[got] == want, combo
        assert total == 49 + 343 + 2401
        passed(f"classifier agreement ({total} segments vs oracle)")


class TestContentValidation:
    def test_levels_check_cli_passes_on_stock_content(self):
        result = subprocess.run(
            [sys.executable, "-m", "chordblocks.cli", "levels", "check"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stdout + result.stderr
        assert "ok: 7 levels valid" in result.stdout
        for line, teaches in zip(
            result.stdout.splitlines(), ["I", "IV", "V", "ii", "iii", "vi", "vii"]
        ):
            assert f"teaches {teaches}" in line
        passed("content validation (CLI levels check, 7 levels in order)")

    def test_twinkle_building_ships_in_level_3(self):
        # The classic nursery-tune harmonization: I I | IV I | V I,
        # with the IV hanging as a neighbor over the second tonic.
        levels = level_sequence()
        twinkle = levels[2].demo_building
        assert [d.roman_label for d in flatten(twinkle)] == [
            "I", "I", "IV", "I", "V", "I",
        ]
        assert [b.degree.roman_label for b in twinkle.base] == ["I", "I", "V", "I"]
        kinds = [(p.kind.value, p.anchor) for p in twinkle.prolongations]
        assert kinds == [("neighbor", 1)]
        passed("Twinkle demo building ships in level 3 and validates")


class TestMidiCorrectness:
    def test_all_stock_buildings_render_valid_smf(self):
        for level in level_sequence():
            building = level.demo_building
            surface = flatten(building)
            data = render_midi(building, tempo_bpm=level.tempo_bpm).data
            again = render_midi(building, tempo_bpm=level.tempo_bpm).data
            assert data == again, "rendering must be deterministic"
            assert data[:8] == b"MThd\x00\x00\x00\x06"

            parsed = read_smf(data)
            assert parsed.format == 0
            assert parsed.ntrks == 1
            assert parsed.division == 480

            ons = [e for e in parsed.events if e.kind == "note_on"]
            offs = [e for e in parsed.events if e.kind == "note_off"]
            assert len(ons) == 3 * len(surface)
            assert len(offs) == 3 * len(surface)
            balance: Counter = Counter()
            for e in parsed.events:
                if e.kind == "note_on":
                    balance[e.note] += 1
                elif e.kind == "note_off":
                    balance[e.note] -= 1
            assert all(v == 0 for v in balance.values())

            got = [
                (e.tick, e.kind, e.note)
                for e in parsed.events
                if e.kind in ("note_on", "note_off")
            ]
            expected = [
                (e.tick, e.kind.value, e.note)
                for e in playback_events(building, chord_beats=level.chord_beats)
            ]
            assert got == expected
        passed("MIDI correctness (header, 3x counts, balance, independent reader)")


class TestPuzzleProperties:
    def test_original_arrangement_completes_for_all_stock_demos(self):
        for level in level_sequence():
            building = level.demo_building
            blocks = building.all_blocks()
            assert len(blocks) <= 8
            puzzle = shuffle_puzzle(building, level.puzzle_seed)
            original = {i: block.id for i, block in enumerate(blocks)}
            assert check_reconstruction(puzzle, original).complete, level.id
        passed("puzzle: original arrangement accepted for all stock demos")

    def test_brute_force_all_placements_small_buildings(self):
        checked_buildings = 0
        for level in level_sequence():
            building = level.demo_building
            blocks = building.all_blocks()
            if len(blocks) > 5:
                continue
            checked_buildings += 1
            puzzle = shuffle_puzzle(building, level.puzzle_seed)
            ids = [b.id for b in puzzle.blocks]
            degree_of = {b.id: b.degree for b in puzzle.blocks}
            for perm in itertools.permutations(ids):
                arrangement = dict(enumerate(perm))
                expected = all(
                    degree_of[block_id] == puzzle.targets[slot]
                    for slot, block_id in arrangement.items()
                )
                result = check_reconstruction(puzzle, arrangement)
                assert result.complete == expected, (level.id, perm)
        assert checked_buildings >= 1
        passed(
            f"puzzle: exhaustive placement check on {checked_buildings} stock buildings"
        )


class TestFlowIntegrity:
    @staticmethod
    def solve(snapshot: dict) -> dict[str, str]:
        building = snapshot["demo_building"]
        slots = snapshot["puzzle"]["slots"]
        blocks = {b["id"]: b["degree"] for b in snapshot["puzzle"]["blocks"]}
        arrangement: dict[str, str] = {}
        free = dict(blocks)
        for slot in slots:
            if slot["role"] == "base":
                degree = building["base"][slot["anchor"]]["degree"]
            else:
                match = next(
                    p
                    for p in building["prolongations"]
                    if p["kind"] == slot["role"] and p["anchor"] == slot["anchor"]
                )
                degree = match["inner"][slot["inner_index"]]
            block_id = next(b for b, d in free.items() if d == degree)
            del free[block_id]
            arrangement[str(slot["index"])] = block_id
        return arrangement

    def test_scripted_session_completes_all_levels_via_api(self, tmp_path):
        app = create_app(store_dir=str(tmp_path))
        with TestClient(app) as client:
            created = client.post("/sessions", json={"now": 0.0}).json()
            session_id = created["session"]["id"]

            def act(payload: dict) -> dict:
                return client.post(
                    f"/sessions/{session_id}/actions", json=payload
                ).json()

            # Illegal and locked transitions return typed errors.
            locked = act({"action": "start_level", "level": 2, "now": 0.0})
            assert locked == {
                "ok": False,
                "error": "E_LOCKED_LEVEL",
                "message": locked["message"],
            }
            act({"action": "start_level", "level": 1, "now": 0.0})
            illegal = act({"action": "advance", "to": "submit", "now": 0.0})
            assert illegal["ok"] is False
            assert illegal["error"] == "E_ILLEGAL_TRANSITION"

            clock = 1.0
            for level in range(1, 8):
                response = act(
                    {"action": "start_level", "level": level, "now": clock}
                )
                assert response["ok"], response
                step = response["result"]["step"]
                while step != "reconstruct":
                    response = act(
                        {"action": "advance", "to": "next", "now": clock}
                    )
                    step = response["result"]["step"]
                    clock += 1.0
                premature = act(
                    {"action": "advance", "to": "submit",
                     "arrangement": {}, "now": clock}
                )
                assert premature["ok"] is False
                assert premature["error"] == "E_PUZZLE_INCOMPLETE"
                snapshot = client.get(f"/sessions/{session_id}").json()["session"]
                response = act({
                    "action": "advance",
                    "to": "submit",
                    "arrangement": self.solve(snapshot),
                    "now": clock,
                })
                assert response["ok"], response
                assert response["result"]["step"] == "complete"
                clock += 1.0

            snapshot = client.get(f"/sessions/{session_id}").json()["session"]
            assert snapshot["progress"]["completed_levels"] == list(range(1, 8))
            assert [e["degree"] for e in snapshot["palette"]] == [
                "I", "IV", "V", "ii", "iii", "vi", "vii",
            ]
            assert all(v == "completed" for v in snapshot["unlocks"].values())

            # The full palette immediately supports creation.
            response = act({"action": "enter_creation", "now": clock})
            assert [e["degree"] for e in response["result"]["palette"]] == [
                "I", "IV", "V", "ii", "iii", "vi", "vii",
            ]
        passed("flow integrity (7 levels via API, typed errors, full palette)")


class TestRoundTrips:
    def test_content_documents_byte_identical(self):
        for name in LEVEL_FILE_NAMES:
            path = default_content_dir() / name
            original = path.read_text(encoding="utf-8")
            doc = read_json(path)
            assert dump_canonical(canonical_level_doc(doc)) == original, name
        passed("round-trip: content documents byte-identical")

    def test_session_documents_byte_identical(self, tmp_path):
        levels = level_sequence()
        session = new_session(levels, session_id="rt", now=0.0)
        session.start_level(1, now=1.0)
        from chordblocks.learning import LessonStep

        while session.step is not LessonStep.RECONSTRUCT:
            session.advance("next", now=2.0)
        puzzle = session.puzzle
        remaining = list(puzzle.blocks)
        for i, target in enumerate(puzzle.targets):
            block = next(b for b in remaining if b.degree == target)
            remaining.remove(block)
            session.puzzle_place(i, block.id, now=3.0 + i)
        session.advance("submit", now=10.0)
        session.enter_creation(now=11.0)
        a = session.assemble_block("I", now=12.0)["id"]
        session.place_seed(a, 0, now=13.0)
        session.finalize_composition("loop", now=14.0)

        path = save_session(tmp_path, session)
        first = path.read_bytes()
        loaded = load_session(tmp_path, "rt", levels)
        save_session(tmp_path, loaded)
        assert path.read_bytes() == first
        record = json.loads(first)
        assert record["session"] == loaded.to_record()
        passed("round-trip: session documents byte-identical")
