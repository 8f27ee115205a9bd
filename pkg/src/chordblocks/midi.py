"""Triad voicings, playback event streams, and Standard MIDI File export.

Output is a format-0 SMF with a single track at 480 ticks per quarter
note. Rendering is bit-exact: the same building always produces the
same bytes (full status bytes, minimal-length delta times).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

from .grammar import Building, flatten
from .theory import Key, ScaleDegree, chord_tones

TICKS_PER_QUARTER = 480
DEFAULT_TEMPO_BPM = 90
DEFAULT_CHORD_BEATS = 2
DEFAULT_VELOCITY = 80

_MIDDLE_C = 60  # C4


@dataclass(frozen=True)
class Voicing:
    """Root-position close triad, root in octave 4 (60-71)."""

    notes: tuple[int, int, int]

    def __post_init__(self) -> None:
        if not (self.notes[0] < self.notes[1] < self.notes[2]):
            raise ValueError("voicing notes must ascend")
        if not 60 <= self.notes[0] <= 71:
            raise ValueError("root must lie in octave 4")


def voice_chord(degree: ScaleDegree, key: Key) -> Voicing:
    """Place the diatonic triad with its root in octave 4, stacking upward."""
    root_pc, third_pc, fifth_pc = (t.value for t in chord_tones(degree, key))
    root = _MIDDLE_C + root_pc
    third = root + (third_pc - root_pc) % 12
    fifth = root + (fifth_pc - root_pc) % 12
    return Voicing((root, third, fifth))


class EventKind(Enum):
    NOTE_ON = "note_on"
    NOTE_OFF = "note_off"


@dataclass(frozen=True)
class PlaybackEvent:
    tick: int
    kind: EventKind
    note: int
    velocity: int

    def to_record(self) -> dict:
        return {
            "tick": self.tick,
            "kind": self.kind.value,
            "note": self.note,
            "velocity": self.velocity,
        }


def playback_events(
    building: Building,
    chord_beats: int = DEFAULT_CHORD_BEATS,
    velocity: int = DEFAULT_VELOCITY,
) -> list[PlaybackEvent]:
    """The building's surface sequence as a tick-ordered note event stream.

    Each surface chord holds for ``chord_beats`` beats; note-offs land
    before the next chord's note-ons at the shared boundary tick.
    """
    if chord_beats < 1:
        raise ValueError("chord_beats must be at least 1")
    slot_ticks = chord_beats * TICKS_PER_QUARTER
    events: list[PlaybackEvent] = []
    for i, degree in enumerate(flatten(building)):
        start, end = i * slot_ticks, (i + 1) * slot_ticks
        notes = voice_chord(degree, building.key).notes
        events.extend(
            PlaybackEvent(start, EventKind.NOTE_ON, n, velocity) for n in notes
        )
        events.extend(PlaybackEvent(end, EventKind.NOTE_OFF, n, 0) for n in notes)
    # Stable tick order with note-offs first at boundary ticks.
    events.sort(key=lambda e: (e.tick, e.kind is EventKind.NOTE_ON, e.note))
    return events


@dataclass(frozen=True)
class MidiDocument:
    data: bytes
    tempo_bpm: float

    def __post_init__(self) -> None:
        if not self.data.startswith(b"MThd\x00\x00\x00\x06"):
            raise ValueError("not a standard MIDI header")


def encode_vlq(value: int) -> bytes:
    """Variable-length quantity, minimal-length encoding."""
    if value < 0:
        raise ValueError("delta times must be nonnegative")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


def render_midi(
    building: Building,
    tempo_bpm: float = DEFAULT_TEMPO_BPM,
    key: Key | None = None,
    chord_beats: int = DEFAULT_CHORD_BEATS,
    velocity: int = DEFAULT_VELOCITY,
) -> MidiDocument:
    """Render a building to a format-0 SMF (tempo meta at tick 0, channel 0).

    ``key`` overrides the building's own key for voicing when given.
    """
    if tempo_bpm <= 0:
        raise ValueError("tempo must be positive")
    voiced = building if key is None else Building(
        key, building.base, building.prolongations
    )
    events = playback_events(voiced, chord_beats=chord_beats, velocity=velocity)

    track = bytearray()
    micros_per_quarter = round(60_000_000 / tempo_bpm)
    track += encode_vlq(0) + b"\xff\x51\x03" + micros_per_quarter.to_bytes(3, "big")
    cursor = 0
    for e in events:
        track += encode_vlq(e.tick - cursor)
        status = 0x90 if e.kind is EventKind.NOTE_ON else 0x80
        track += bytes((status, e.note, e.velocity))
        cursor = e.tick
    track += encode_vlq(0) + b"\xff\x2f\x00"

    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, TICKS_PER_QUARTER)
    chunk = b"MTrk" + struct.pack(">I", len(track)) + bytes(track)
    return MidiDocument(header + chunk, tempo_bpm)
