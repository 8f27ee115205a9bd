"""A scripted learner: level 1 end to end, then a first composition.

Run: python demos/06_full_session.py
"""

from chordblocks.learning import LessonStep, level_sequence
from chordblocks.session import new_session

levels = level_sequence()
session = new_session(levels, session_id="demo", now=0.0)

# Walk the lesson steps of level 1.
session.start_level(1, now=1.0)
while session.step is not LessonStep.RECONSTRUCT:
    print("step:", session.step.value)
    session.advance("next", now=2.0)
print("step:", session.step.value)

# Stall long enough and the engine offers a nudge.
hint = session.hint_check(now=15.0)
print("hint:", hint.text if hint else None)

# Solve the puzzle by matching chords to slots.
puzzle = session.puzzle
free = list(puzzle.blocks)
for i, target in enumerate(puzzle.targets):
    block = next(b for b in free if b.degree == target)
    free.remove(block)
    session.puzzle_place(i, block.id, now=16.0 + i)
session.advance("submit", now=20.0)
print("step:", session.step.value, "| learned:",
      sorted(d.roman_label for d in session.progress.learned_degrees))

# Creation mode opens after level 1. Compose, snap, finalize, play.
session.enter_creation(now=21.0)
print("palette:", [e["degree"] for e in session.palette()])
first = session.assemble_block("I", now=22.0)["id"]
second = session.assemble_block("I", now=22.0)["id"]
session.place_seed(first, 0, now=23.0)
print("probe near the open slot:",
      session.probe(second, 1.1, 0, now=24.0).kind.value)
session.attach(second, first, "right", now=25.0)
composition = session.finalize_composition("two tonics", now=26.0)
print("finalized:", composition.name,
      "->", " ".join(d.roman_label for d in composition.surface()))
print("playback events:", len(session.play(now=27.0)))

print("\nevent log:")
for event in session.event_log:
    print(f"  {event['seq']:3d} {event['type']}")
