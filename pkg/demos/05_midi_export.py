"""Hear a building: triad voicings, playback events, MIDI file export.

Run: python demos/05_midi_export.py   (writes demo_song.mid)
"""

from pathlib import Path

from chordblocks import (
    Key,
    ScaleDegree,
    flatten,
    parse_building,
    parse_degree,
    playback_events,
    render_midi,
    voice_chord,
)

C = Key.of("C")

# Chords voice as close root-position triads with the root in octave 4.
for degree in (ScaleDegree.I, ScaleDegree.V, ScaleDegree.vii):
    print(f"{degree.roman_label:3s} -> {voice_chord(degree, C).notes}")

# Compose by parsing a surface, then look at the event stream.
tree = parse_building([parse_degree(t) for t in "I vi IV V I".split()], C)
building = tree.building
events = playback_events(building, chord_beats=2)
print(f"\n{len(flatten(building))} chords -> {len(events)} note events")
for event in events[:8]:
    print(f"  tick {event.tick:5d} {event.kind.value:8s} note {event.note}")

# And render to a byte-exact standard MIDI file.
doc = render_midi(building, tempo_bpm=96)
out = Path(__file__).parent / "demo_song.mid"
out.write_bytes(doc.data)
print(f"\nwrote {len(doc.data)} bytes to {out.name} at {doc.tempo_bpm} BPM")
print("header:", doc.data[:14].hex(" "))
