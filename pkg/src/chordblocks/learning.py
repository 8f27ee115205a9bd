"""Learning Mode: the seven guided levels, progress tracking, and hints.

Levels teach the diatonic chords in a fixed order. Each level walks a
linear lesson (intro, basics in level 1 only, the new chord, a demo
building, then rebuilding it from shuffled blocks), and a level's demo
may only use chords taught at or before that level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .content import (
    LEVEL_FILE_NAMES,
    SchemaViolation,
    building_from_doc,
    level_from_doc,
    read_json,
    resolve_content_dir,
)
from .errors import EngineError
from .grammar import Building, flatten, validate_building
from .theory import Key, ScaleDegree, parse_degree

TEACHING_ORDER = (
    ScaleDegree.I,
    ScaleDegree.IV,
    ScaleDegree.V,
    ScaleDegree.ii,
    ScaleDegree.iii,
    ScaleDegree.vi,
    ScaleDegree.vii,
)


class ChordNotYetTaught(EngineError):
    code = "E_CHORD_NOT_YET_TAUGHT"


class LockedLevel(EngineError):
    code = "E_LOCKED_LEVEL"


class IllegalTransition(EngineError):
    code = "E_ILLEGAL_TRANSITION"


class PuzzleIncomplete(EngineError):
    code = "E_PUZZLE_INCOMPLETE"


class LessonStep(Enum):
    INTRO = "intro"
    CHORD_BASICS = "chord_basics"
    NEW_CHORD = "new_chord"
    DEMO_BUILD = "demo_build"
    RECONSTRUCT = "reconstruct"
    COMPLETE = "complete"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Level:
    id: int
    teaches: ScaleDegree
    key: Key
    intro_text: str
    includes_basics: bool
    demo_building: Building
    puzzle_seed: int
    tempo_bpm: float = 90
    chord_beats: int = 2

    def steps(self) -> list[LessonStep]:
        order = [LessonStep.INTRO]
        if self.includes_basics:
            order.append(LessonStep.CHORD_BASICS)
        order += [
            LessonStep.NEW_CHORD,
            LessonStep.DEMO_BUILD,
            LessonStep.RECONSTRUCT,
            LessonStep.COMPLETE,
        ]
        return order


def taught_through(level_id: int) -> set[ScaleDegree]:
    """Chords available at a level: everything taught at or before it."""
    return set(TEACHING_ORDER[:level_id])


def level_sequence(content_dir: str | Path | None = None) -> list[Level]:
    """Load and cross-validate the seven level files from a content directory."""
    directory = resolve_content_dir(content_dir)
    levels: list[Level] = []
    for index, name in enumerate(LEVEL_FILE_NAMES, start=1):
        path = directory / name
        doc = level_from_doc(read_json(path), where=name)
        if doc["level_id"] != index:
            raise SchemaViolation(f"{name}: level_id must be {index}")
        teaches = parse_degree(doc["teaches"])
        if teaches is not TEACHING_ORDER[index - 1]:
            raise SchemaViolation(
                f"{name}: level {index} must teach "
                f"{TEACHING_ORDER[index - 1].roman_label}, not {doc['teaches']}"
            )
        if doc["includes_basics"] != (index == 1):
            raise SchemaViolation(
                f"{name}: chord basics belong to level 1 only"
            )
        building = building_from_doc(doc["demo_building"], where=f"{name}.demo_building")
        if building.key != Key.of(doc["key"]):
            raise SchemaViolation(f"{name}: demo building key differs from level key")
        report = validate_building(building)
        if not report.ok:
            raise SchemaViolation(
                f"{name}: demo building invalid: {report.describe()}"
            )
        available = taught_through(index)
        for degree in flatten(building):
            if degree not in available:
                raise ChordNotYetTaught(
                    f"{name}: demo uses {degree.roman_label}, taught later",
                    level=index,
                    degree=degree.roman_label,
                )
        levels.append(
            Level(
                id=index,
                teaches=teaches,
                key=Key.of(doc["key"]),
                intro_text=doc["intro_text"],
                includes_basics=doc["includes_basics"],
                demo_building=building,
                puzzle_seed=doc["puzzle_seed"],
                tempo_bpm=doc["tempo_bpm"],
                chord_beats=doc["chord_beats"],
            )
        )
    return levels


# ---------------------------------------------------------------------------
# Progress
# ---------------------------------------------------------------------------


class LevelState(Enum):
    LOCKED = "locked"
    UNLOCKED = "unlocked"
    COMPLETED = "completed"


@dataclass
class LevelStats:
    plays: int = 0
    best_attempts: int | None = None

    def record(self, attempts: int) -> None:
        self.plays += 1
        if self.best_attempts is None or attempts < self.best_attempts:
            self.best_attempts = attempts


@dataclass
class Progress:
    completed_levels: set[int] = field(default_factory=set)
    stats: dict[int, LevelStats] = field(default_factory=dict)

    @property
    def learned_degrees(self) -> set[ScaleDegree]:
        return {TEACHING_ORDER[n - 1] for n in self.completed_levels}

    def complete_level(self, level_id: int, attempts: int) -> None:
        self.completed_levels.add(level_id)
        self.stats.setdefault(level_id, LevelStats()).record(attempts)

    def to_record(self) -> dict:
        return {
            "completed_levels": sorted(self.completed_levels),
            "stats": {
                str(n): {"plays": s.plays, "best_attempts": s.best_attempts}
                for n, s in sorted(self.stats.items())
            },
        }

    @classmethod
    def from_record(cls, record: dict) -> "Progress":
        return cls(
            completed_levels=set(record["completed_levels"]),
            stats={
                int(n): LevelStats(s["plays"], s["best_attempts"])
                for n, s in record["stats"].items()
            },
        )


def unlock_state(progress: Progress) -> dict[int, LevelState]:
    """Sequential unlocking; completed levels stay replayable."""
    states: dict[int, LevelState] = {}
    for n in range(1, 8):
        if n in progress.completed_levels:
            states[n] = LevelState.COMPLETED
        elif n == 1 or (n - 1) in progress.completed_levels:
            states[n] = LevelState.UNLOCKED
        else:
            states[n] = LevelState.LOCKED
    return states


# ---------------------------------------------------------------------------
# Hints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HintConfig:
    idle_seconds: float = 10.0
    fail_threshold: int = 3
    cooldown_seconds: float = 30.0


@dataclass(frozen=True)
class Hint:
    kind: str          # "idle" | "struggle"
    text: str
    slot: int | None
    at: float

    def to_record(self) -> dict:
        return {"kind": self.kind, "text": self.text, "slot": self.slot, "at": self.at}


@dataclass
class HintState:
    last_action_at: float = 0.0
    failed_connects: int = 0
    last_hint_at: dict[str, float] = field(default_factory=dict)
    emitted: list[Hint] = field(default_factory=list)

    def touch(self, now: float) -> None:
        self.last_action_at = max(self.last_action_at, now)

    def record_failure(self, now: float) -> None:
        self.failed_connects += 1
        self.touch(now)

    def record_success(self, now: float) -> None:
        self.failed_connects = 0
        self.touch(now)

    def to_record(self) -> dict:
        return {
            "last_action_at": self.last_action_at,
            "failed_connects": self.failed_connects,
            "last_hint_at": dict(sorted(self.last_hint_at.items())),
            "emitted": [h.to_record() for h in self.emitted],
        }

    @classmethod
    def from_record(cls, record: dict) -> "HintState":
        return cls(
            last_action_at=record["last_action_at"],
            failed_connects=record["failed_connects"],
            last_hint_at=dict(record["last_hint_at"]),
            emitted=[
                Hint(h["kind"], h["text"], h["slot"], h["at"])
                for h in record["emitted"]
            ],
        )


def evaluate_hint(
    state: HintState,
    now: float,
    has_open_work: bool,
    next_slot: tuple[int, str] | None,
    config: HintConfig | None = None,
) -> Hint | None:
    """Fire at most one hint; struggle beats idle when both trigger.

    ``next_slot`` is (slot index, expected chord label) for the next
    position worth working on; the hint names that one step only.
    """
    cfg = config or HintConfig()

    def ready(kind: str) -> bool:
        last = state.last_hint_at.get(kind)
        return last is None or now - last >= cfg.cooldown_seconds

    hint: Hint | None = None
    if state.failed_connects >= cfg.fail_threshold and ready("struggle"):
        text = "Those blocks keep repelling - check the connector functions."
        if next_slot is not None:
            text += f" Slot {next_slot[0]} wants the {next_slot[1]} chord."
        hint = Hint("struggle", text, next_slot[0] if next_slot else None, now)
        state.failed_connects = 0
    elif (
        has_open_work
        and now - state.last_action_at > cfg.idle_seconds
        and ready("idle")
    ):
        text = "Still with us? There are blocks left to place."
        if next_slot is not None:
            text += f" Try slot {next_slot[0]} next: it wants the {next_slot[1]} chord."
        hint = Hint("idle", text, next_slot[0] if next_slot else None, now)
    if hint is not None:
        state.last_hint_at[hint.kind] = now
        state.emitted.append(hint)
    return hint
