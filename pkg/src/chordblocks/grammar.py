"""Harmony-structure grammar over chord blocks.

A *building* is a horizontal base row of blocks (the natural progression)
plus at most one layer of prolongations above it: *neighbor* structures
that leave and return to one base chord, and *passing* structures that
walk stepwise between two adjacent base chords. ``flatten`` expands a
building to the chord sequence it plays; ``parse_building`` is the
inverse direction, reducing a surface sequence to a building.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .blocks import MusicalBlock, can_connect, degrees_connect, make_block
from .errors import EngineError
from .theory import Key, ScaleDegree


class StructureKind(Enum):
    NATURAL = "natural"
    NEIGHBOR = "neighbor"
    PASSING = "passing"

    def __str__(self) -> str:
        return self.value


class SequenceTooShort(EngineError):
    code = "E_SEQUENCE_TOO_SHORT"


class UnparseableSequence(EngineError):
    code = "E_UNPARSEABLE"

    def __init__(self, index: int) -> None:
        super().__init__(
            f"adjacent chords at positions {index} and {index + 1} cannot connect",
            index=index,
        )
        self.index = index


class BuildError(EngineError):
    code = "E_BUILD"

    def __init__(self, violation: "Violation") -> None:
        super().__init__(violation.message, **violation.location())
        self.violation = violation


class BaseBreak(BuildError):
    code = "E_BASE_BREAK"


class BadNeighbor(BuildError):
    code = "E_BAD_NEIGHBOR"


class BadPassing(BuildError):
    code = "E_BAD_PASSING"


class AnchorConflict(BuildError):
    code = "E_ANCHOR_CONFLICT"


class AnchorOutOfRange(BuildError):
    code = "E_ANCHOR_OUT_OF_RANGE"


class PuzzleError(EngineError):
    code = "E_PUZZLE"


class UnknownBlock(PuzzleError):
    code = "E_UNKNOWN_BLOCK"


class UnknownSlot(PuzzleError):
    code = "E_UNKNOWN_SLOT"


class SlotReuse(PuzzleError):
    code = "E_SLOT_REUSE"


# ---------------------------------------------------------------------------
# Building data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prolongation:
    """Inner blocks hung above the base row.

    Neighbor: anchored on base index ``anchor``; plays base-inner...-base.
    Passing: anchored on the gap between base ``anchor`` and ``anchor+1``;
    plays between them.
    """

    kind: StructureKind
    anchor: int
    inner: tuple[MusicalBlock, ...]

    def __post_init__(self) -> None:
        if self.kind not in (StructureKind.NEIGHBOR, StructureKind.PASSING):
            raise ValueError("prolongation kind must be neighbor or passing")
        if not 1 <= len(self.inner) <= 2:
            raise ValueError("prolongation carries one or two inner blocks")


@dataclass(frozen=True)
class Building:
    """Base row plus prolongations. May be structurally invalid; see validate_building."""

    key: Key
    base: tuple[MusicalBlock, ...]
    prolongations: tuple[Prolongation, ...] = ()

    def all_blocks(self) -> list[MusicalBlock]:
        """Every distinct block: base row left-to-right, then inner blocks."""
        blocks = list(self.base)
        for p in sorted(self.prolongations, key=lambda p: (p.anchor, p.kind.value)):
            blocks.extend(p.inner)
        return blocks

    def prolongation_at(
        self, kind: StructureKind, anchor: int
    ) -> Prolongation | None:
        for p in self.prolongations:
            if p.kind is kind and p.anchor == anchor:
                return p
        return None


@dataclass(frozen=True)
class ProlongationSpec:
    """Degree-level prolongation description used by build()."""

    kind: StructureKind
    anchor: int
    inner_degrees: tuple[ScaleDegree, ...]


@dataclass(frozen=True)
class ParseTree:
    """A building plus the structure label of each node (base row + prolongations)."""

    building: Building

    @property
    def base_label(self) -> StructureKind:
        return StructureKind.NATURAL

    @property
    def labels(self) -> tuple[StructureKind, ...]:
        return tuple(p.kind for p in self.building.prolongations)

    def describe(self) -> str:
        lines = [f"base: {' '.join(str(b.degree) for b in self.building.base)}"]
        for p in sorted(
            self.building.prolongations, key=lambda p: (p.anchor, p.kind.value)
        ):
            inner = " ".join(str(b.degree) for b in p.inner)
            if p.kind is StructureKind.NEIGHBOR:
                where = f"base[{p.anchor}]"
            else:
                where = f"gap {p.anchor}-{p.anchor + 1}"
            lines.append(f"  {p.kind.value}({inner}) at {where}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Segment classification
# ---------------------------------------------------------------------------


def step_between(a: ScaleDegree, b: ScaleDegree) -> int | None:
    """+1/-1 when b is one diatonic step above/below a on the scale circle."""
    diff = (b.value - a.value) % 7
    if diff == 1:
        return 1
    if diff == 6:
        return -1
    return None


def _pairs_connect(seq: Sequence[ScaleDegree]) -> bool:
    return all(degrees_connect(a, b) for a, b in zip(seq, seq[1:]))


def _is_neighbor_window(seq: Sequence[ScaleDegree]) -> bool:
    return (
        3 <= len(seq) <= 4
        and seq[0] == seq[-1]
        and all(inner != seq[0] for inner in seq[1:-1])
        and _pairs_connect(seq)
    )


def _is_passing_window(seq: Sequence[ScaleDegree]) -> bool:
    if not 3 <= len(seq) <= 4 or not _pairs_connect(seq):
        return False
    steps = {step_between(a, b) for a, b in zip(seq, seq[1:])}
    return len(steps) == 1 and None not in steps


def classify_segment(
    seq: Sequence[ScaleDegree], key: Key | None = None
) -> StructureKind | None:
    """Classify a chord segment; precedence neighbor > passing > natural.

    Returns None for segments that fit no structure (some adjacent pair
    cannot connect). Classification is function-based and therefore the
    same in every major key.
    """
    del key
    if len(seq) < 2:
        raise SequenceTooShort("a segment needs at least two chords")
    if _is_neighbor_window(seq):
        return StructureKind.NEIGHBOR
    if _is_passing_window(seq):
        return StructureKind.PASSING
    if _pairs_connect(seq):
        return StructureKind.NATURAL
    return None


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    index: int | None = None
    block_ids: tuple[str, ...] = ()

    def location(self) -> dict:
        out: dict = {}
        if self.index is not None:
            out["index"] = self.index
        if self.block_ids:
            out["block_ids"] = list(self.block_ids)
        return out


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{v.code}: {v.message}" for v in self.violations)


def _neighbor_violation(anchor: MusicalBlock, inner: Sequence[MusicalBlock]) -> str | None:
    chain = [anchor, *inner, anchor]
    for left, right in zip(chain, chain[1:]):
        if not can_connect(left, right):
            return f"{left.degree} cannot connect to {right.degree}"
    for blk in inner:
        if blk.degree == anchor.degree:
            return f"inner chord {blk.degree} repeats the anchor"
    return None


def _passing_violation(
    left: MusicalBlock, inner: Sequence[MusicalBlock], right: MusicalBlock
) -> str | None:
    chain = [left, *inner, right]
    steps = {
        step_between(a.degree, b.degree) for a, b in zip(chain, chain[1:])
    }
    if len(steps) != 1 or None in steps:
        degrees = " ".join(str(b.degree) for b in chain)
        return f"roots of {degrees} do not move stepwise in one direction"
    for a, b in zip(chain, chain[1:]):
        if not can_connect(a, b):
            return f"{a.degree} cannot connect to {b.degree}"
    return None


def building_violations(building: Building) -> list[Violation]:
    """Every invariant violation in a (possibly partial) building."""
    violations: list[Violation] = []
    base = building.base
    if not base:
        violations.append(Violation("empty_base", "base row is empty"))
        return violations
    for i, (left, right) in enumerate(zip(base, base[1:])):
        if not can_connect(left, right):
            violations.append(
                Violation(
                    "base_break",
                    f"base pair {i}-{i + 1}: {left.degree} cannot connect to {right.degree}",
                    index=i,
                    block_ids=(left.id, right.id),
                )
            )
    seen: set[tuple[StructureKind, int]] = set()
    for p in building.prolongations:
        is_neighbor = p.kind is StructureKind.NEIGHBOR
        max_anchor = len(base) - 1 if is_neighbor else len(base) - 2
        if not 0 <= p.anchor <= max_anchor:
            violations.append(
                Violation(
                    "anchor_out_of_range",
                    f"{p.kind.value} anchor {p.anchor} outside base row of {len(base)}",
                    index=p.anchor,
                    block_ids=tuple(b.id for b in p.inner),
                )
            )
            continue
        if (p.kind, p.anchor) in seen:
            violations.append(
                Violation(
                    "anchor_conflict",
                    f"second {p.kind.value} prolongation at anchor {p.anchor}",
                    index=p.anchor,
                    block_ids=tuple(b.id for b in p.inner),
                )
            )
            continue
        seen.add((p.kind, p.anchor))
        if is_neighbor:
            problem = _neighbor_violation(base[p.anchor], p.inner)
            code = "bad_neighbor"
        else:
            problem = _passing_violation(base[p.anchor], p.inner, base[p.anchor + 1])
            code = "bad_passing"
        if problem:
            violations.append(
                Violation(
                    code,
                    f"{p.kind.value} at anchor {p.anchor}: {problem}",
                    index=p.anchor,
                    block_ids=tuple(b.id for b in p.inner),
                )
            )
    return violations


def validate_building(building: Building) -> ValidationReport:
    """Report every violation; empty report means the building is valid."""
    return ValidationReport(tuple(building_violations(building)))


_VIOLATION_ERRORS: dict[str, type[BuildError]] = {
    "base_break": BaseBreak,
    "bad_neighbor": BadNeighbor,
    "bad_passing": BadPassing,
    "anchor_conflict": AnchorConflict,
    "anchor_out_of_range": AnchorOutOfRange,
}


# ---------------------------------------------------------------------------
# Construction and flattening
# ---------------------------------------------------------------------------


def build(
    key: Key,
    base_degrees: Sequence[ScaleDegree],
    prolongation_specs: Iterable[ProlongationSpec] = (),
) -> Building:
    """Construct a building from default blocks and raise on the first violation.

    Block ids are deterministic: base blocks b0..bn, inner blocks
    n<anchor>i<j> (neighbor) or g<anchor>i<j> (passing gap).
    """
    base = tuple(
        make_block(deg, block_id=f"b{i}") for i, deg in enumerate(base_degrees)
    )
    prolongations = []
    for spec in prolongation_specs:
        tag = "n" if spec.kind is StructureKind.NEIGHBOR else "g"
        inner = tuple(
            make_block(deg, block_id=f"{tag}{spec.anchor}i{j}")
            for j, deg in enumerate(spec.inner_degrees)
        )
        prolongations.append(Prolongation(spec.kind, spec.anchor, inner))
    building = Building(key, base, tuple(prolongations))
    violations = building_violations(building)
    if violations:
        first = violations[0]
        raise _VIOLATION_ERRORS.get(first.code, BuildError)(first)
    return building


def surface_blocks(building: Building) -> list[MusicalBlock]:
    """Blocks in playing order; a neighbor's anchor block appears twice."""
    out: list[MusicalBlock] = []
    for i, block in enumerate(building.base):
        out.append(block)
        neighbor = building.prolongation_at(StructureKind.NEIGHBOR, i)
        if neighbor is not None:
            out.extend(neighbor.inner)
            out.append(block)
        passing = building.prolongation_at(StructureKind.PASSING, i)
        if passing is not None:
            out.extend(passing.inner)
    return out


def flatten(building: Building) -> list[ScaleDegree]:
    """The surface chord sequence the building plays, left to right."""
    return [block.degree for block in surface_blocks(building)]


# ---------------------------------------------------------------------------
# Parsing (surface sequence -> building)
# ---------------------------------------------------------------------------


def parse_building(seq: Sequence[ScaleDegree], key: Key) -> ParseTree:
    """Reduce a surface sequence to a building, greedy leftmost-longest.

    At each position the longest neighbor window (4 then 3) is tried,
    then the longest passing window, then the chord stays in the base
    row. A passing window is only reduced when its two endpoints can
    also connect directly, since they become adjacent base blocks.
    """
    if not seq:
        raise SequenceTooShort("cannot parse an empty sequence")
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        if not degrees_connect(a, b):
            raise UnparseableSequence(i)

    base_degrees: list[ScaleDegree] = []
    specs: list[ProlongationSpec] = []
    i = 0
    n = len(seq)
    while i < n:
        window = None
        for length in (4, 3):
            if i + length <= n and _is_neighbor_window(seq[i : i + length]):
                window = (StructureKind.NEIGHBOR, length)
                break
        if window is None:
            for length in (4, 3):
                if (
                    i + length <= n
                    and _is_passing_window(seq[i : i + length])
                    and degrees_connect(seq[i], seq[i + length - 1])
                ):
                    window = (StructureKind.PASSING, length)
                    break
        if window is None:
            base_degrees.append(seq[i])
            i += 1
        elif window[0] is StructureKind.NEIGHBOR:
            length = window[1]
            anchor = len(base_degrees)
            base_degrees.append(seq[i])
            specs.append(
                ProlongationSpec(
                    StructureKind.NEIGHBOR, anchor, tuple(seq[i + 1 : i + length - 1])
                )
            )
            i += length
        else:
            length = window[1]
            anchor = len(base_degrees)
            base_degrees.append(seq[i])
            base_degrees.append(seq[i + length - 1])
            specs.append(
                ProlongationSpec(
                    StructureKind.PASSING, anchor, tuple(seq[i + 1 : i + length - 1])
                )
            )
            i += length
    return ParseTree(build(key, base_degrees, specs))


# ---------------------------------------------------------------------------
# Reconstruction puzzles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PuzzleSlot:
    """One position in the skeleton; identifies structure, not chord."""

    index: int
    role: str                 # "base" | "neighbor" | "passing"
    anchor: int               # base position, or anchored base index / gap
    inner_index: int | None = None


class ReconstructionStatus(Enum):
    COMPLETE = "complete"
    PARTIAL = "partial"


@dataclass(frozen=True)
class ConnectionViolation:
    left_slot: int
    right_slot: int
    left_block: str
    right_block: str


@dataclass(frozen=True)
class ReconstructionResult:
    status: ReconstructionStatus
    correct_slots: frozenset[int]
    violations: tuple[ConnectionViolation, ...]

    @property
    def complete(self) -> bool:
        return self.status is ReconstructionStatus.COMPLETE


@dataclass(frozen=True)
class Puzzle:
    """Shuffled blocks plus the slot skeleton of the source building.

    ``targets`` is the hidden answer (degree per slot); ``adjacency``
    lists slot pairs that are adjacent in playing order.
    """

    key: Key
    blocks: tuple[MusicalBlock, ...]
    slots: tuple[PuzzleSlot, ...]
    targets: tuple[ScaleDegree, ...] = field(repr=False)
    adjacency: tuple[tuple[int, int], ...]
    building: Building = field(repr=False)

    def skeleton(self) -> list[dict]:
        """Slot descriptors safe to show a learner (no chord identities)."""
        return [
            {
                "index": s.index,
                "role": s.role,
                "anchor": s.anchor,
                "inner_index": s.inner_index,
            }
            for s in self.slots
        ]


def _puzzle_slots(
    building: Building,
) -> tuple[list[PuzzleSlot], list[ScaleDegree], list[tuple[int, int]]]:
    slots: list[PuzzleSlot] = []
    targets: list[ScaleDegree] = []
    slot_of_block: dict[str, int] = {}
    for index, block in enumerate(building.all_blocks()):
        slot_of_block[block.id] = index
        targets.append(block.degree)
    for i, block in enumerate(building.base):
        slots.append(PuzzleSlot(slot_of_block[block.id], "base", i))
    for p in sorted(building.prolongations, key=lambda p: (p.anchor, p.kind.value)):
        for j, block in enumerate(p.inner):
            slots.append(
                PuzzleSlot(slot_of_block[block.id], p.kind.value, p.anchor, j)
            )
    slots.sort(key=lambda s: s.index)
    surface = surface_blocks(building)
    adjacent_pairs = {
        (slot_of_block[a.id], slot_of_block[b.id])
        for a, b in zip(surface, surface[1:])
    }
    return slots, targets, sorted(adjacent_pairs)


def shuffle_puzzle(building: Building, seed: int) -> Puzzle:
    """Detach every block and shuffle deterministically (Fisher-Yates on seed)."""
    blocks = building.all_blocks()
    rng = random.Random(seed)
    for i in range(len(blocks) - 1, 0, -1):
        j = rng.randrange(i + 1)
        blocks[i], blocks[j] = blocks[j], blocks[i]
    slots, targets, adjacency = _puzzle_slots(building)
    return Puzzle(
        key=building.key,
        blocks=tuple(blocks),
        slots=tuple(slots),
        targets=tuple(targets),
        adjacency=tuple(adjacency),
        building=building,
    )


def check_reconstruction(
    puzzle: Puzzle, arrangement: Mapping[int, str]
) -> ReconstructionResult:
    """Grade an arrangement (slot index -> block id).

    Complete when every slot holds a block of the target chord; grading
    compares chord identity, so equal-degree blocks are interchangeable.
    """
    by_id = {b.id: b for b in puzzle.blocks}
    placed: dict[int, MusicalBlock] = {}
    used: set[str] = set()
    for slot_index, block_id in arrangement.items():
        if not 0 <= slot_index < len(puzzle.slots):
            raise UnknownSlot(f"no slot {slot_index}", slot=slot_index)
        if block_id not in by_id:
            raise UnknownBlock(f"block {block_id!r} is not part of this puzzle",
                               block=block_id)
        if block_id in used:
            raise SlotReuse(f"block {block_id!r} placed more than once",
                            block=block_id)
        used.add(block_id)
        placed[slot_index] = by_id[block_id]

    correct = frozenset(
        i for i, block in placed.items() if block.degree == puzzle.targets[i]
    )
    if len(placed) == len(puzzle.slots) and len(correct) == len(puzzle.slots):
        return ReconstructionResult(ReconstructionStatus.COMPLETE, correct, ())
    violations = tuple(
        ConnectionViolation(i, j, placed[i].id, placed[j].id)
        for i, j in puzzle.adjacency
        if i in placed and j in placed and not can_connect(placed[i], placed[j])
    )
    return ReconstructionResult(ReconstructionStatus.PARTIAL, correct, violations)
