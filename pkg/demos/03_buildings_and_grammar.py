"""Buildings: composing with prolongations and parsing surfaces back.

Run: python demos/03_buildings_and_grammar.py
"""

from chordblocks import (
    Key,
    ProlongationSpec,
    StructureKind,
    build,
    classify_segment,
    flatten,
    parse_building,
    parse_degree,
    validate_building,
)

C = Key.of("C")


def degs(text):
    return [parse_degree(t) for t in text.split()]


# A building is a base row plus prolongations hung above it. This one
# says: the IV chord is just a neighbor excursion inside a long tonic.
building = build(
    C,
    degs("I I V I"),
    [ProlongationSpec(StructureKind.NEIGHBOR, 1, tuple(degs("IV")))],
)
print("base      :", " ".join(str(b.degree) for b in building.base))
print("surface   :", " ".join(str(d) for d in flatten(building)))
print("valid     :", validate_building(building).ok)

# Parsing goes the other way: give the surface, get the structure.
tree = parse_building(degs("I ii iii V I"), C)
print("\nparse of I ii iii V I:")
print(tree.describe())

# Segment classification, with neighbor taking precedence over passing
# and both over a plain natural run.
for text in ("I V I", "I ii iii", "I IV V", "V IV"):
    kind = classify_segment(degs(text), C)
    print(f"{text:10s} -> {kind.value if kind else 'invalid'}")

# Some surfaces refuse to parse: the forbidden V -> IV motion splits them.
try:
    parse_building(degs("I V IV"), C)
except Exception as exc:
    print("\nI V IV ->", exc)
