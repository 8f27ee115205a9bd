"""Chord-block harmony engine.

Diatonic chords become connectable blocks, chord progressions become
validated buildings, and a guided seven-level flow plus a free creation
mode sit on top - with MIDI export and an HTTP service for interactive
clients.
"""

from .blocks import (
    BlockSymbol,
    MusicalBlock,
    Shape,
    can_connect,
    compatibility_matrix,
    make_block,
    successor_table,
    symbol_for,
)
from .errors import EngineError
from .grammar import (
    Building,
    ParseTree,
    Prolongation,
    ProlongationSpec,
    StructureKind,
    build,
    check_reconstruction,
    classify_segment,
    flatten,
    parse_building,
    shuffle_puzzle,
    validate_building,
)
from .layout import LayoutPosition, Side, SnapEvent, SnapKind, Workspace
from .learning import Level, LessonStep, Progress, level_sequence, unlock_state
from .midi import MidiDocument, playback_events, render_midi, voice_chord
from .theory import (
    FunctionProfile,
    HarmonicFunction,
    Key,
    PitchClass,
    ScaleDegree,
    chord_tones,
    functions_of,
    parse_degree,
    scale_circle,
    scale_notes,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
