"""Walk the theory layer: scales, the scale circle, triads, and functions.

Run: python demos/01_scale_circle_and_triads.py
"""

from chordblocks import (
    Key,
    ScaleDegree,
    chord_tones,
    functions_of,
    scale_circle,
    scale_notes,
)

# Every major key spells its seven notes deterministically: sharp keys
# with sharps, flat keys with flats.
for tonic in ("C", "G", "F", "Eb", "F#"):
    key = Key.of(tonic)
    print(f"{key.name:9s} -> {' '.join(str(n) for n in scale_notes(key))}")

# The scale circle arranges those notes clockwise; stepping off the end
# wraps back to the tonic, which is what makes stepwise motion circular.
circle = scale_circle(Key.of("C"))
print("\nclockwise from C:", " ".join(str(n) for n in circle.notes))
print("after B comes", circle.successor(circle.note_at(6)))

# Triads stack every other circle position: offsets 0, 2, 4.
print("\ndiatonic triads in C major:")
for degree in ScaleDegree:
    tones = " ".join(str(t) for t in chord_tones(degree, Key.of("C")))
    profile = functions_of(degree)
    functions = "+".join(f.value for f in profile.ordered_functions())
    marker = " (strong)" if profile.strength.value == "strong" else ""
    print(f"  {degree.roman_label:3s} = {tones:10s} {functions}{marker}")
