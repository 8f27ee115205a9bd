"""Sessions: one learner's serialized command stream, event log, and save files.

A session is either idle, inside a learning level (walking the lesson
steps), or in creation mode. Every state change appends a record to the
session's event log, which is what the API streams incrementally; hint
evaluation is a pure function of that timeline plus the clock values
commands pass in, so replays are deterministic.

Save files are canonical JSON wrapped with a checksum and written
atomically (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .blocks import block_to_record, symbol_to_record
from .content import building_to_doc, dump_canonical
from .creation import (
    Composition,
    CreationLocked,
    assemble,
    finalize,
    palette,
)
from .errors import EngineError
from .grammar import (
    Building,
    Puzzle,
    ReconstructionResult,
    check_reconstruction,
    shuffle_puzzle,
    validate_building,
)
from .layout import LayoutPosition, Side, SnapEvent, Workspace, seed_workspace
from .learning import (
    Hint,
    HintConfig,
    HintState,
    IllegalTransition,
    LessonStep,
    Level,
    LevelState,
    LockedLevel,
    Progress,
    PuzzleIncomplete,
    evaluate_hint,
    unlock_state,
)
from .midi import playback_events
from .theory import Key, parse_degree

SESSION_SCHEMA_VERSION = 1


class NotFound(EngineError):
    code = "E_NOT_FOUND"


class CorruptState(EngineError):
    code = "E_CORRUPT_STATE"


@dataclass
class Session:
    id: str
    levels: list[Level]
    progress: Progress = field(default_factory=Progress)
    mode: str = "idle"                    # "idle" | "learning" | "creation"
    level_id: int | None = None
    step: LessonStep | None = None
    submit_attempts: int = 0
    workspace: Workspace | None = None
    puzzle: Puzzle | None = None
    arrangement: dict[int, str] = field(default_factory=dict)
    hints: HintState = field(default_factory=HintState)
    hint_config: HintConfig = field(default_factory=HintConfig)
    compositions: list[Composition] = field(default_factory=list)
    event_log: list[dict] = field(default_factory=list)

    # -- events ---------------------------------------------------------

    def _emit(self, event_type: str, at: float | None = None, **data: object) -> dict:
        record = {
            "seq": len(self.event_log),
            "type": event_type,
            "at": at,
            "data": data,
        }
        self.event_log.append(record)
        return record

    def events_since(self, after: int = -1) -> list[dict]:
        return [e for e in self.event_log if e["seq"] > after]

    # -- level flow -------------------------------------------------------

    def level(self) -> Level:
        if self.level_id is None:
            raise IllegalTransition("no level in progress")
        return self.levels[self.level_id - 1]

    def start_level(self, level_id: int, now: float = 0.0) -> LessonStep:
        if not 1 <= level_id <= len(self.levels):
            raise NotFound(f"no level {level_id}", level=level_id)
        state = unlock_state(self.progress)[level_id]
        if state is LevelState.LOCKED:
            raise LockedLevel(
                f"level {level_id} is locked; finish level {level_id - 1} first",
                level=level_id,
            )
        self.mode = "learning"
        self.level_id = level_id
        self.step = LessonStep.INTRO
        self.submit_attempts = 0
        self.workspace = None
        self.puzzle = None
        self.arrangement = {}
        self.hints = HintState(last_action_at=now)
        self._emit("level_started", now, level=level_id, step=self.step.value)
        return self.step

    def advance(self, action: str, arrangement: dict[int, str] | None = None,
                now: float = 0.0) -> LessonStep:
        """Move the lesson forward: "next" between steps, "submit" at the puzzle."""
        if self.mode != "learning" or self.step is None:
            raise IllegalTransition("no lesson in progress")
        level = self.level()
        steps = level.steps()
        index = steps.index(self.step)
        if self.step is LessonStep.RECONSTRUCT:
            if action != "submit":
                raise IllegalTransition(
                    f"step {self.step} accepts only submit", step=self.step.value
                )
            result = self.submit_reconstruction(arrangement, now)
            del result  # raises PuzzleIncomplete unless complete
        elif action != "next":
            raise IllegalTransition(
                f"unknown action {action!r} at step {self.step}", step=self.step.value
            )
        elif self.step is LessonStep.COMPLETE:
            raise IllegalTransition("level already complete", step=self.step.value)
        else:
            self.step = steps[index + 1]
            if self.step is LessonStep.DEMO_BUILD:
                self._open_demo_workspace()
            elif self.step is LessonStep.RECONSTRUCT:
                self._open_puzzle()
        self.hints.touch(now)
        self._emit("step_advanced", now, level=level.id, step=self.step.value)
        return self.step

    def _open_demo_workspace(self) -> None:
        level = self.level()
        self.workspace = seed_workspace(
            level.key, level.demo_building.all_blocks()
        )

    def _open_puzzle(self) -> None:
        level = self.level()
        self.puzzle = shuffle_puzzle(level.demo_building, level.puzzle_seed)
        self.arrangement = {}
        self.workspace = None

    def submit_reconstruction(
        self, arrangement: dict[int, str] | None = None, now: float = 0.0
    ) -> ReconstructionResult:
        if self.step is not LessonStep.RECONSTRUCT or self.puzzle is None:
            raise IllegalTransition("no puzzle to submit")
        if arrangement is not None:
            self.arrangement = dict(arrangement)
        self.submit_attempts += 1
        result = check_reconstruction(self.puzzle, self.arrangement)
        if not result.complete:
            self._emit(
                "reconstruction_rejected", now,
                correct_slots=sorted(result.correct_slots),
                violations=len(result.violations),
            )
            raise PuzzleIncomplete(
                f"{len(result.correct_slots)} of {len(self.puzzle.slots)} slots correct",
                correct=sorted(result.correct_slots),
            )
        level = self.level()
        self.step = LessonStep.COMPLETE
        self.progress.complete_level(level.id, self.submit_attempts)
        self.hints.record_success(now)
        self._emit(
            "level_completed", now,
            level=level.id,
            attempts=self.submit_attempts,
            learned=[d.roman_label for d in sorted(
                self.progress.learned_degrees, key=lambda d: d.value)],
        )
        return result

    # -- puzzle interaction -------------------------------------------------

    def puzzle_place(self, slot: int, block_id: str, now: float = 0.0) -> dict:
        if self.step is not LessonStep.RECONSTRUCT or self.puzzle is None:
            raise IllegalTransition("no puzzle in progress")
        trial = dict(self.arrangement)
        trial.pop(slot, None)
        # A block may be moved between slots; drop its previous placement.
        trial = {s: b for s, b in trial.items() if b != block_id}
        trial[slot] = block_id
        result = check_reconstruction(self.puzzle, trial)
        self.arrangement = trial
        clashes = [
            v for v in result.violations
            if slot in (v.left_slot, v.right_slot)
        ]
        if clashes:
            self.hints.record_failure(now)
        else:
            self.hints.record_success(now)
        record = self._emit(
            "puzzle_placed", now,
            slot=slot, block=block_id, ok=not clashes,
            violations=[
                {"left_slot": v.left_slot, "right_slot": v.right_slot}
                for v in clashes
            ],
        )
        return record

    def puzzle_clear(self, slot: int, now: float = 0.0) -> None:
        if self.step is not LessonStep.RECONSTRUCT:
            raise IllegalTransition("no puzzle in progress")
        self.arrangement.pop(slot, None)
        self.hints.touch(now)
        self._emit("puzzle_cleared", now, slot=slot)

    # -- workspace interaction ------------------------------------------

    def _active_workspace(self) -> Workspace:
        if self.workspace is None:
            raise IllegalTransition("no workspace open in this step")
        return self.workspace

    def probe(self, block_id: str, x: float, y: int, now: float = 0.0) -> SnapEvent:
        event = self._active_workspace().probe(block_id, LayoutPosition(x, y))
        self._emit("snap", now, block=block_id, **event.to_record())
        return event

    def attach(self, block_id: str, target_id: str, side: str,
               now: float = 0.0) -> LayoutPosition:
        ws = self._active_workspace()
        try:
            pos = ws.attach(block_id, target_id, Side(side))
        except EngineError as exc:
            self.hints.record_failure(now)
            self._emit("attach_failed", now, block=block_id, target=target_id,
                       side=side, error=exc.code)
            raise
        self.hints.record_success(now)
        self._emit("attached", now, block=block_id, target=target_id, side=side,
                   x=pos.x, y=pos.y)
        return pos

    def place_seed(self, block_id: str, x: float = 0.0, now: float = 0.0) -> LayoutPosition:
        pos = self._active_workspace().place_seed(block_id, x)
        self.hints.record_success(now)
        self._emit("seed_placed", now, block=block_id, x=pos.x)
        return pos

    def detach(self, block_id: str, now: float = 0.0) -> None:
        self._active_workspace().detach(block_id)
        self.hints.touch(now)
        self._emit("detached", now, block=block_id)

    # -- creation mode ----------------------------------------------------

    def enter_creation(self, now: float = 0.0) -> None:
        if 1 not in self.progress.completed_levels:
            raise CreationLocked("finish level 1 to unlock creation mode")
        self.mode = "creation"
        self.level_id = None
        self.step = None
        self.puzzle = None
        self.arrangement = {}
        self.workspace = Workspace(self.levels[0].key)
        self.hints = HintState(last_action_at=now)
        self._emit("creation_entered", now)

    def palette(self) -> list[dict]:
        return [entry.to_record() for entry in palette(self.progress)]

    def assemble_block(
        self,
        degree_label: str,
        tenon_names: list[str] | None = None,
        mortise_names: list[str] | None = None,
        now: float = 0.0,
    ) -> dict:
        if self.mode != "creation":
            raise IllegalTransition("assembling blocks happens in creation mode")
        block = assemble(
            self.progress, parse_degree(degree_label), tenon_names, mortise_names
        )
        self._active_workspace().add_block(block)
        self.hints.touch(now)
        record = block_to_record(block)
        record["symbol"] = symbol_to_record(block.symbol)
        self._emit("block_assembled", now, **record)
        return record

    def finalize_composition(self, name: str, now: float = 0.0) -> Composition:
        if self.mode != "creation":
            raise IllegalTransition("finalize happens in creation mode")
        composition = finalize(self._active_workspace(), name, now, self.id)
        self.compositions.append(composition)
        self._emit(
            "composition_finalized", now,
            name=name,
            surface=[d.roman_label for d in composition.surface()],
        )
        return composition

    # -- playback ---------------------------------------------------------

    def _playable_building(self) -> Building:
        if self.mode == "learning" and self.step in (
            LessonStep.DEMO_BUILD, LessonStep.RECONSTRUCT, LessonStep.COMPLETE,
        ):
            return self.level().demo_building
        if self.mode == "creation":
            building = self._active_workspace().derive_building()
            report = validate_building(building)
            if not report.ok:
                from .creation import ValidationFailed

                raise ValidationFailed(report)
            return building
        raise IllegalTransition("nothing to play in this state")

    def play(self, now: float = 0.0) -> list[dict]:
        building = self._playable_building()
        if self.mode == "learning":
            level = self.level()
            tempo, beats = level.tempo_bpm, level.chord_beats
        else:
            tempo, beats = 90.0, 2
        events = [e.to_record() for e in playback_events(building, chord_beats=beats)]
        self.hints.touch(now)
        self._emit("playback", now, tempo_bpm=tempo, ticks_per_quarter=480,
                   events=events)
        return events

    # -- hints --------------------------------------------------------------

    def _next_slot_hint(self) -> tuple[int, str] | None:
        if self.puzzle is not None:
            for i, slot in enumerate(self.puzzle.slots):
                placed = self.arrangement.get(i)
                target = self.puzzle.targets[i]
                if placed is None or not any(
                    b.id == placed and b.degree == target for b in self.puzzle.blocks
                ):
                    return (i, target.roman_label)
            return None
        if self.workspace is not None and self.mode == "learning":
            demo = self.level().demo_building
            row = self.workspace.base_degrees()
            if len(row) < len(demo.base):
                return (len(row), demo.base[len(row)].degree.roman_label)
        return None

    def _has_open_work(self) -> bool:
        if self.puzzle is not None:
            return len(self.arrangement) < len(self.puzzle.slots)
        if self.workspace is not None:
            return bool(self.workspace.detached_ids())
        return False

    def hint_check(self, now: float = 0.0) -> Hint | None:
        if self.step not in (LessonStep.DEMO_BUILD, LessonStep.RECONSTRUCT):
            return None
        hint = evaluate_hint(
            self.hints, now, self._has_open_work(), self._next_slot_hint(),
            self.hint_config,
        )
        if hint is not None:
            self._emit("hint", now, kind=hint.kind, text=hint.text, slot=hint.slot)
        return hint

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        """Client-facing view of the session (no hidden puzzle answers)."""
        view: dict = {
            "id": self.id,
            "mode": self.mode,
            "level_id": self.level_id,
            "step": self.step.value if self.step else None,
            "progress": self.progress.to_record(),
            "unlocks": {
                str(n): s.value for n, s in unlock_state(self.progress).items()
            },
            "palette": self.palette(),
            "events": len(self.event_log),
        }
        if self.puzzle is not None:
            view["puzzle"] = {
                "slots": self.puzzle.skeleton(),
                "blocks": [
                    dict(block_to_record(b), symbol=symbol_to_record(b.symbol))
                    for b in self.puzzle.blocks
                ],
                "arrangement": {str(k): v for k, v in sorted(self.arrangement.items())},
            }
        if self.workspace is not None:
            view["workspace"] = self.workspace.to_state()
        if self.mode == "learning" and self.step in (
            LessonStep.DEMO_BUILD, LessonStep.RECONSTRUCT, LessonStep.COMPLETE,
        ):
            view["demo_building"] = building_to_doc(self.level().demo_building)
        return view

    # -- persistence ----------------------------------------------------

    def to_record(self) -> dict:
        return {
            "schema_version": SESSION_SCHEMA_VERSION,
            "id": self.id,
            "mode": self.mode,
            "level_id": self.level_id,
            "step": self.step.value if self.step else None,
            "submit_attempts": self.submit_attempts,
            "progress": self.progress.to_record(),
            "workspace": self.workspace.to_state() if self.workspace else None,
            "arrangement": [[k, v] for k, v in sorted(self.arrangement.items())],
            "hints": self.hints.to_record(),
            "compositions": [
                {
                    "name": c.name,
                    "created_at": c.created_at,
                    "author_session": c.author_session,
                    "building": building_to_doc(c.building),
                }
                for c in self.compositions
            ],
            "event_log": self.event_log,
        }

    @classmethod
    def from_record(cls, record: dict, levels: list[Level]) -> "Session":
        from .content import building_from_doc

        if record.get("schema_version") != SESSION_SCHEMA_VERSION:
            raise CorruptState("unsupported session schema version")
        session = cls(
            id=record["id"],
            levels=levels,
            progress=Progress.from_record(record["progress"]),
            mode=record["mode"],
            level_id=record["level_id"],
            step=LessonStep(record["step"]) if record["step"] else None,
            submit_attempts=record["submit_attempts"],
            workspace=(
                Workspace.from_state(record["workspace"])
                if record["workspace"]
                else None
            ),
            arrangement={int(k): v for k, v in record["arrangement"]},
            hints=HintState.from_record(record["hints"]),
            compositions=[
                Composition(
                    name=c["name"],
                    building=building_from_doc(c["building"]),
                    created_at=c["created_at"],
                    author_session=c["author_session"],
                )
                for c in record["compositions"]
            ],
            event_log=list(record["event_log"]),
        )
        if session.step is LessonStep.RECONSTRUCT and session.level_id:
            level = session.levels[session.level_id - 1]
            session.puzzle = shuffle_puzzle(level.demo_building, level.puzzle_seed)
        return session


def new_session(levels: list[Level], session_id: str | None = None,
                now: float = 0.0) -> Session:
    session = Session(id=session_id or uuid.uuid4().hex[:12], levels=levels)
    session.hints.touch(now)
    session._emit("session_started", now, session=session.id)
    return session


# ---------------------------------------------------------------------------
# Save files
# ---------------------------------------------------------------------------


def _session_path(store_dir: str | Path, session_id: str) -> Path:
    return Path(store_dir) / f"{session_id}.json"


def save_session(store_dir: str | Path, session: Session) -> Path:
    """Atomic write: payload checksummed, temp file renamed into place."""
    record = session.to_record()
    payload = dump_canonical(record)
    checksum = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    document = dump_canonical({"checksum": checksum, "session": record})
    path = _session_path(store_dir, session.id)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".session-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(document)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def load_session(store_dir: str | Path, session_id: str,
                 levels: list[Level]) -> Session:
    path = _session_path(store_dir, session_id)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise NotFound(f"no saved session {session_id!r}", session=session_id) from None
    try:
        document = json.loads(text)
        checksum = document["checksum"]
        record = document["session"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise CorruptState(f"save file for {session_id!r} is unreadable",
                           session=session_id) from None
    payload = dump_canonical(record)
    actual = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    if actual != checksum:
        raise CorruptState(f"checksum mismatch for session {session_id!r}",
                           session=session_id)
    return Session.from_record(record, levels)
