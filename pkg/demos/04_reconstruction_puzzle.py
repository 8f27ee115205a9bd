"""The level-end puzzle: shuffle a building, rebuild it, get graded.

Run: python demos/04_reconstruction_puzzle.py
"""

from chordblocks import check_reconstruction, shuffle_puzzle
from chordblocks.learning import level_sequence

# Take level 3's demo building (the nursery-tune harmonization) and
# shuffle its blocks with the level's own seed: same seed, same order.
level = level_sequence()[2]
puzzle = shuffle_puzzle(level.demo_building, level.puzzle_seed)
print("shuffled blocks:", " ".join(str(b.degree) for b in puzzle.blocks))
print("skeleton slots :", [f"{s.role}@{s.anchor}" for s in puzzle.slots])

# An empty board is merely incomplete, never wrong.
print("\nempty board ->", check_reconstruction(puzzle, {}).status.value)

# Place two blocks that cannot stand next to each other and the engine
# points at the seam.
v_block = next(b for b in puzzle.blocks if b.degree.roman_label == "V")
ii_like = next(b for b in puzzle.blocks if b.degree.roman_label == "IV")
result = check_reconstruction(puzzle, {2: v_block.id, 3: ii_like.id})
print("V then IV   ->", [
    f"slots {v.left_slot}-{v.right_slot}" for v in result.violations
])

# Grading is by chord identity per slot, so any I-block fits an I-slot.
solution = {}
free = list(puzzle.blocks)
for i, target in enumerate(puzzle.targets):
    block = next(b for b in free if b.degree == target)
    free.remove(block)
    solution[i] = block.id
print("solved board ->", check_reconstruction(puzzle, solution).status.value)
