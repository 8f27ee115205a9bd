"""Pitch classes, major keys, scale degrees, diatonic triads, harmonic functions.

Everything downstream (blocks, grammar, audio) is built on the seven
diatonic degrees of a major key and their three harmonic functions.
All values here are immutable lookup-table material.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EngineError

# ---------------------------------------------------------------------------
# Spelling tables
# ---------------------------------------------------------------------------

SHARP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
FLAT_NAMES = ("C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B")

# Tonics that spell their scale with sharps vs. flats. Every major key is
# reachable under exactly one of the two tables (F# rather than Gb, Db
# rather than C#), so display names are deterministic.
SHARP_KEY_TONICS = frozenset({0, 2, 4, 6, 7, 9, 11})  # C D E F# G A B
FLAT_KEY_TONICS = frozenset({1, 3, 5, 8, 10})         # Db Eb F Ab Bb

KEY_TONIC_NAMES = ("C", "G", "D", "A", "E", "B", "F#", "F", "Bb", "Eb", "Ab", "Db")

# Major scale: W-W-H-W-W-W-H from the tonic, as semitone offsets.
MAJOR_SCALE_STEPS = (0, 2, 4, 5, 7, 9, 11)


class UnknownDegree(EngineError):
    code = "E_UNKNOWN_DEGREE"


class UnknownKey(EngineError):
    code = "E_UNKNOWN_KEY"


# ---------------------------------------------------------------------------
# Pitch classes and keys
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PitchClass:
    """A pitch class 0-11 (C = 0) plus its display spelling."""

    value: int
    spelled_name: str

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 11:
            raise ValueError(f"pitch class out of range: {self.value}")
        if self.spelled_name not in (SHARP_NAMES[self.value], FLAT_NAMES[self.value]):
            raise ValueError(
                f"spelling {self.spelled_name!r} does not name pitch class {self.value}"
            )

    @classmethod
    def spelled(cls, value: int, *, flats: bool = False) -> "PitchClass":
        table = FLAT_NAMES if flats else SHARP_NAMES
        return cls(value % 12, table[value % 12])

    def __str__(self) -> str:
        return self.spelled_name


@dataclass(frozen=True)
class Key:
    """A major key. Major is the only supported mode."""

    tonic: PitchClass
    mode: str = "major"

    def __post_init__(self) -> None:
        if self.mode != "major":
            raise ValueError(f"unsupported mode: {self.mode}")

    @classmethod
    def of(cls, tonic_name: str) -> "Key":
        """Build a key from one of the twelve canonical tonic names."""
        if tonic_name not in KEY_TONIC_NAMES:
            raise UnknownKey(f"unknown key tonic: {tonic_name!r}", tonic=tonic_name)
        if tonic_name in SHARP_NAMES:
            value = SHARP_NAMES.index(tonic_name)
        else:
            value = FLAT_NAMES.index(tonic_name)
        return cls(PitchClass(value, tonic_name))

    @property
    def uses_flats(self) -> bool:
        return self.tonic.value in FLAT_KEY_TONICS

    @property
    def name(self) -> str:
        return f"{self.tonic.spelled_name} major"

    def __str__(self) -> str:
        return self.name


# ---------------------------------------------------------------------------
# Scale degrees
# ---------------------------------------------------------------------------


class ScaleDegree(Enum):
    """The seven diatonic degrees; member names are the roman labels.

    Case encodes triad quality in major: upper = major triad, lower =
    minor (or diminished, for vii).
    """

    I = 1
    ii = 2
    iii = 3
    IV = 4
    V = 5
    vi = 6
    vii = 7

    @property
    def degree(self) -> int:
        return self.value

    @property
    def roman_label(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.name


DEGREES = tuple(ScaleDegree)


def parse_degree(text: str) -> ScaleDegree:
    """Parse a roman-numeral token; exactly the seven canonical labels, case-sensitive."""
    try:
        return ScaleDegree[text]
    except KeyError:
        raise UnknownDegree(f"unknown scale degree: {text!r}", token=text) from None


# ---------------------------------------------------------------------------
# Harmonic functions
# ---------------------------------------------------------------------------


class HarmonicFunction(Enum):
    TONIC = "tonic"
    SUBDOMINANT = "subdominant"
    DOMINANT = "dominant"

    def __str__(self) -> str:
        return self.value


# Canonical display/packing order for function sets.
FUNCTION_ORDER = (
    HarmonicFunction.TONIC,
    HarmonicFunction.SUBDOMINANT,
    HarmonicFunction.DOMINANT,
)


class Strength(Enum):
    NORMAL = "normal"
    STRONG = "strong"


@dataclass(frozen=True)
class FunctionProfile:
    """One or two harmonic functions plus a strength marker.

    Strong profiles are single-function by definition (ii and vii, the
    intensified subdominant and dominant).
    """

    functions: frozenset[HarmonicFunction]
    strength: Strength = Strength.NORMAL

    def __post_init__(self) -> None:
        if not 1 <= len(self.functions) <= 2:
            raise ValueError("a profile carries one or two functions")
        if self.strength is Strength.STRONG and len(self.functions) != 1:
            raise ValueError("strong profiles are single-function")

    def ordered_functions(self) -> tuple[HarmonicFunction, ...]:
        return tuple(f for f in FUNCTION_ORDER if f in self.functions)


_T, _S, _D = FUNCTION_ORDER

FUNCTION_PROFILES: dict[ScaleDegree, FunctionProfile] = {
    ScaleDegree.I: FunctionProfile(frozenset({_T})),
    ScaleDegree.ii: FunctionProfile(frozenset({_S}), Strength.STRONG),
    ScaleDegree.iii: FunctionProfile(frozenset({_T, _D})),
    ScaleDegree.IV: FunctionProfile(frozenset({_S})),
    ScaleDegree.V: FunctionProfile(frozenset({_D})),
    ScaleDegree.vi: FunctionProfile(frozenset({_T, _S})),
    ScaleDegree.vii: FunctionProfile(frozenset({_D}), Strength.STRONG),
}


def functions_of(degree: ScaleDegree) -> FunctionProfile:
    """Harmonic function profile of a diatonic degree (key-independent)."""
    return FUNCTION_PROFILES[degree]


# ---------------------------------------------------------------------------
# Scales and the scale circle
# ---------------------------------------------------------------------------


def scale_notes(key: Key) -> list[PitchClass]:
    """The seven scale members of a major key, tonic first, spelled per key."""
    return [
        PitchClass.spelled(key.tonic.value + step, flats=key.uses_flats)
        for step in MAJOR_SCALE_STEPS
    ]


@dataclass(frozen=True)
class ScaleCircle:
    """The key's seven notes arranged clockwise; index arithmetic wraps mod 7."""

    key: Key
    notes: tuple[PitchClass, ...]

    def note_at(self, index: int) -> PitchClass:
        return self.notes[index % 7]

    def successor(self, note: PitchClass) -> PitchClass:
        return self.note_at(self.position_of(note) + 1)

    def position_of(self, note: PitchClass | str) -> int:
        name = note if isinstance(note, str) else note.spelled_name
        for i, n in enumerate(self.notes):
            if n.spelled_name == name:
                return i
        raise ValueError(f"{name!r} is not in {self.key}")


def scale_circle(key: Key) -> ScaleCircle:
    return ScaleCircle(key, tuple(scale_notes(key)))


def chord_tones(degree: ScaleDegree, key: Key) -> list[PitchClass]:
    """Root, third, fifth of a diatonic triad: scale members at circular offsets 0, 2, 4."""
    notes = scale_notes(key)
    root = degree.value - 1
    return [notes[(root + offset) % 7] for offset in (0, 2, 4)]
