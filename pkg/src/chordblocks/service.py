"""Transport-independent engine façade used by both the HTTP server and tests.

Owns the loaded content, the live sessions, and one lock per session so
commands inside a session apply strictly in arrival order. Every method
either returns plain JSON-serializable data or raises an EngineError
whose ``code`` the transport maps onto the wire.
"""

from __future__ import annotations

import threading
import time
from collections import defaultdict
from pathlib import Path

from .blocks import (
    DEGREES,
    compatibility_matrix,
    default_mortise,
    default_tenon,
    function_names,
    symbol_for,
    symbol_to_record,
)
from .content import building_from_doc, building_to_doc
from .errors import EngineError
from .grammar import flatten, parse_building, validate_building
from .learning import IllegalTransition, Level, level_sequence
from .midi import render_midi
from .session import NotFound, Session, load_session, new_session, save_session
from .theory import Key, functions_of, parse_degree, scale_notes


class EngineService:
    def __init__(
        self,
        content_dir: str | Path | None = None,
        store_dir: str | Path | None = None,
    ) -> None:
        self.levels: list[Level] = level_sequence(content_dir)
        self.store_dir = Path(store_dir) if store_dir else None
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    # -- static views ---------------------------------------------------

    def levels_view(self) -> list[dict]:
        return [
            {
                "id": lv.id,
                "teaches": lv.teaches.roman_label,
                "key": lv.key.tonic.spelled_name,
                "intro_text": lv.intro_text,
                "includes_basics": lv.includes_basics,
                "steps": [s.value for s in lv.steps()],
                "demo_building": building_to_doc(lv.demo_building),
                "surface": [d.roman_label for d in flatten(lv.demo_building)],
                "scale_circle": [
                    p.spelled_name for p in scale_notes(lv.key)
                ],
                "puzzle_seed": lv.puzzle_seed,
                "tempo_bpm": lv.tempo_bpm,
                "chord_beats": lv.chord_beats,
            }
            for lv in self.levels
        ]

    def symbols_view(self) -> list[dict]:
        out = []
        for d in DEGREES:
            profile = functions_of(d)
            out.append(
                {
                    "degree": d.roman_label,
                    "symbol": symbol_to_record(symbol_for(d)),
                    "functions": function_names(profile.functions),
                    "strength": profile.strength.value,
                    "tenon": function_names(
                        default_tenon(d).allowed_successor_functions
                    ),
                    "mortise": function_names(
                        default_mortise(d).accepted_own_functions
                    ),
                }
            )
        return out

    def matrix_view(self) -> dict:
        matrix = compatibility_matrix()
        return {
            "degrees": [d.roman_label for d in DEGREES],
            "allowed": matrix,
            "allowed_count": sum(sum(row) for row in matrix),
        }

    def analyze(self, degree_labels: list[str], key_name: str = "C") -> dict:
        key = Key.of(key_name)
        seq = [parse_degree(label) for label in degree_labels]
        tree = parse_building(seq, key)
        building = tree.building
        return {
            "key": key.tonic.spelled_name,
            "surface": [d.roman_label for d in flatten(building)],
            "base": [b.degree.roman_label for b in building.base],
            "prolongations": [
                {
                    "kind": p.kind.value,
                    "anchor": p.anchor,
                    "inner": [b.degree.roman_label for b in p.inner],
                }
                for p in building.prolongations
            ],
            "building": building_to_doc(building),
            "text": tree.describe(),
        }

    def render_building_doc(
        self, building_doc: dict, tempo_bpm: float = 90, chord_beats: int = 2
    ) -> bytes:
        building = building_from_doc(building_doc)
        report = validate_building(building)
        if not report.ok:
            from .creation import ValidationFailed

            raise ValidationFailed(report)
        return render_midi(building, tempo_bpm=tempo_bpm, chord_beats=chord_beats).data

    # -- sessions ---------------------------------------------------------

    def create_session(self, session_id: str | None = None,
                       now: float | None = None) -> Session:
        session = new_session(self.levels, session_id, self._now(now))
        self._sessions[session.id] = session
        return session

    def session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFound(f"no session {session_id!r}", session=session_id) from None

    def events(self, session_id: str, after: int = -1) -> list[dict]:
        return self.session(session_id).events_since(after)

    def save(self, session_id: str) -> str:
        if self.store_dir is None:
            raise EngineError("no session store configured")
        path = save_session(self.store_dir, self.session(session_id))
        return str(path)

    def load(self, session_id: str) -> Session:
        if self.store_dir is None:
            raise EngineError("no session store configured")
        session = load_session(self.store_dir, session_id, self.levels)
        self._sessions[session.id] = session
        return session

    @staticmethod
    def _now(now: float | None) -> float:
        return time.time() if now is None else now

    # -- action dispatch ----------------------------------------------------

    def act(self, session_id: str, action: dict) -> dict:
        """Apply one session command; commands serialize per session."""
        session = self.session(session_id)
        with self._locks[session_id]:
            return self._dispatch(session, dict(action))

    def _dispatch(self, session: Session, action: dict) -> dict:
        kind = action.pop("action", None)
        now = self._now(action.pop("now", None))
        handlers = {
            "start_level": self._act_start_level,
            "advance": self._act_advance,
            "probe": self._act_probe,
            "attach": self._act_attach,
            "place_seed": self._act_place_seed,
            "detach": self._act_detach,
            "puzzle_place": self._act_puzzle_place,
            "puzzle_clear": self._act_puzzle_clear,
            "enter_creation": self._act_enter_creation,
            "assemble": self._act_assemble,
            "finalize": self._act_finalize,
            "play": self._act_play,
            "hint_check": self._act_hint_check,
            "save": self._act_save,
        }
        handler = handlers.get(kind)
        if handler is None:
            raise IllegalTransition(f"unknown action {kind!r}")
        return handler(session, now, **action)

    def _act_start_level(self, session: Session, now: float, level: int) -> dict:
        step = session.start_level(level, now)
        return {"step": step.value, "level": level}

    def _act_advance(self, session: Session, now: float, to: str = "next",
                     arrangement: dict | None = None) -> dict:
        parsed = None
        if arrangement is not None:
            try:
                parsed = {int(k): v for k, v in arrangement.items()}
            except (TypeError, ValueError):
                from .content import SchemaViolation

                raise SchemaViolation("arrangement keys must be slot indices") from None
        step = session.advance(to, parsed, now)
        return {"step": step.value}

    def _act_probe(self, session: Session, now: float, block: str,
                   x: float, y: int) -> dict:
        return session.probe(block, x, y, now).to_record()

    def _act_attach(self, session: Session, now: float, block: str,
                    target: str, side: str) -> dict:
        pos = session.attach(block, target, side, now)
        return {"x": pos.x, "y": pos.y}

    def _act_place_seed(self, session: Session, now: float, block: str,
                        x: float = 0.0) -> dict:
        pos = session.place_seed(block, x, now)
        return {"x": pos.x, "y": pos.y}

    def _act_detach(self, session: Session, now: float, block: str) -> dict:
        session.detach(block, now)
        return {"detached": block}

    def _act_puzzle_place(self, session: Session, now: float, slot: int,
                          block: str) -> dict:
        record = session.puzzle_place(slot, block, now)
        return {"ok_placement": record["data"]["ok"],
                "violations": record["data"]["violations"]}

    def _act_puzzle_clear(self, session: Session, now: float, slot: int) -> dict:
        session.puzzle_clear(slot, now)
        return {"cleared": slot}

    def _act_enter_creation(self, session: Session, now: float) -> dict:
        session.enter_creation(now)
        return {"palette": session.palette()}

    def _act_assemble(self, session: Session, now: float, degree: str,
                      tenon: list[str] | None = None,
                      mortise: list[str] | None = None) -> dict:
        return session.assemble_block(degree, tenon, mortise, now)

    def _act_finalize(self, session: Session, now: float, name: str) -> dict:
        composition = session.finalize_composition(name, now)
        return {
            "name": composition.name,
            "building": building_to_doc(composition.building),
            "surface": [d.roman_label for d in composition.surface()],
        }

    def _act_play(self, session: Session, now: float) -> dict:
        events = session.play(now)
        return {"events": events, "ticks_per_quarter": 480}

    def _act_hint_check(self, session: Session, now: float) -> dict:
        hint = session.hint_check(now)
        return {"hint": hint.to_record() if hint else None}

    def _act_save(self, session: Session, now: float) -> dict:
        del now
        return {"path": self.save(session.id)}
