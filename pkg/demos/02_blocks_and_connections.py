"""Musical blocks: symbols, tenon/mortise connectors, and who connects to whom.

Run: python demos/02_blocks_and_connections.py
"""

from chordblocks import ScaleDegree, can_connect, compatibility_matrix, make_block, symbol_for

# Each chord's visual symbol is derived from its harmonic functions:
# squares are stable, triangles tense, circles smooth; strong chords
# double their shape, dual-function chords overlap two shapes.
print("symbols:")
for degree in ScaleDegree:
    symbol = symbol_for(degree)
    shapes = " + ".join(s.value for s in symbol.shapes)
    print(f"  {degree.roman_label:3s} {symbol.arrangement.value:8s} {shapes}")

# A block's tenon lists the functions allowed to follow it; the mortise
# is the block's own functions. Blocks connect when tenon meets mortise.
v = make_block(ScaleDegree.V)
one = make_block(ScaleDegree.I)
four = make_block(ScaleDegree.IV)
six = make_block(ScaleDegree.vi)
print("\nV -> I ?", can_connect(v, one), " (the classic resolution)")
print("V -> IV?", can_connect(v, four), "(tension never falls back to motion)")
print("V -> vi?", can_connect(v, six), " (the deceptive escape hatch)")

# The whole rulebook is a 7x7 grid; exactly four cells repel.
matrix = compatibility_matrix()
labels = [d.roman_label for d in ScaleDegree]
print("\n    " + " ".join(f"{l:>3}" for l in labels))
for label, row in zip(labels, matrix):
    print(f"{label:>3} " + " ".join(f"{'.' if ok else 'x':>3}" for ok in row))
print(sum(sum(r) for r in matrix), "of 49 ordered pairs connect")
