"""Musical blocks: chord body, visual symbol, tenon/mortise connectors.

A block's tenon (projecting side) lists which harmonic functions may
follow it; its mortise (recessed side) lists the block's own functions.
Two blocks connect left-to-right when the left tenon and the right
mortise share at least one function.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum

from .errors import EngineError
from .theory import (
    DEGREES,
    FUNCTION_ORDER,
    FunctionProfile,
    HarmonicFunction,
    Key,
    ScaleDegree,
    Strength,
    functions_of,
)


class InvalidTenon(EngineError):
    code = "E_INVALID_TENON"


class InvalidMortise(EngineError):
    code = "E_INVALID_MORTISE"


# ---------------------------------------------------------------------------
# Visual symbols
# ---------------------------------------------------------------------------


class Shape(Enum):
    SQUARE = "square"        # tonic: stability
    TRIANGLE = "triangle"    # dominant: tension
    CIRCLE = "circle"        # subdominant: smooth motion

    def __str__(self) -> str:
        return self.value


SHAPE_FOR_FUNCTION: dict[HarmonicFunction, Shape] = {
    HarmonicFunction.TONIC: Shape.SQUARE,
    HarmonicFunction.DOMINANT: Shape.TRIANGLE,
    HarmonicFunction.SUBDOMINANT: Shape.CIRCLE,
}


class SymbolArrangement(Enum):
    SINGLE = "single"      # one shape: plain single-function chord
    DOUBLED = "doubled"    # two copies of one shape: strong function
    OVERLAP = "overlap"    # two distinct shapes: dual-function chord

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BlockSymbol:
    arrangement: SymbolArrangement
    shapes: tuple[Shape, ...]

    def __post_init__(self) -> None:
        kind, shapes = self.arrangement, self.shapes
        if kind is SymbolArrangement.SINGLE and len(shapes) != 1:
            raise ValueError("single symbol carries exactly one shape")
        if kind is SymbolArrangement.DOUBLED and (
            len(shapes) != 2 or shapes[0] is not shapes[1]
        ):
            raise ValueError("doubled symbol carries two copies of one shape")
        if kind is SymbolArrangement.OVERLAP and (
            len(shapes) != 2 or shapes[0] is shapes[1]
        ):
            raise ValueError("overlap symbol carries two distinct shapes")

    @classmethod
    def single(cls, shape: Shape) -> "BlockSymbol":
        return cls(SymbolArrangement.SINGLE, (shape,))

    @classmethod
    def doubled(cls, shape: Shape) -> "BlockSymbol":
        return cls(SymbolArrangement.DOUBLED, (shape, shape))

    @classmethod
    def overlap(cls, first: Shape, second: Shape) -> "BlockSymbol":
        return cls(SymbolArrangement.OVERLAP, (first, second))


def symbol_for(degree: ScaleDegree) -> BlockSymbol:
    """Visual symbol of a degree, derived from its function profile.

    Single shape for plain single-function chords, a doubled shape for
    strong ones (ii, vii), overlapping shapes for dual-function ones
    (iii, vi; tonic shape drawn first).
    """
    profile = functions_of(degree)
    shapes = tuple(SHAPE_FOR_FUNCTION[f] for f in profile.ordered_functions())
    if len(shapes) == 2:
        return BlockSymbol.overlap(*shapes)
    if profile.strength is Strength.STRONG:
        return BlockSymbol.doubled(shapes[0])
    return BlockSymbol.single(shapes[0])


# ---------------------------------------------------------------------------
# Connectors
# ---------------------------------------------------------------------------

# Which functions may follow a given function. Tonic opens everything,
# subdominant moves on to anything, dominant resolves (to tonic) or
# sustains - never back into subdominant.
SUCCESSORS_BY_FUNCTION: dict[HarmonicFunction, frozenset[HarmonicFunction]] = {
    HarmonicFunction.TONIC: frozenset(FUNCTION_ORDER),
    HarmonicFunction.SUBDOMINANT: frozenset(FUNCTION_ORDER),
    HarmonicFunction.DOMINANT: frozenset(
        {HarmonicFunction.DOMINANT, HarmonicFunction.TONIC}
    ),
}


def successor_table(profile: FunctionProfile) -> frozenset[HarmonicFunction]:
    """Functions allowed to follow a block with this profile (union over its functions)."""
    allowed: frozenset[HarmonicFunction] = frozenset()
    for f in profile.functions:
        allowed |= SUCCESSORS_BY_FUNCTION[f]
    return allowed


@dataclass(frozen=True)
class TenonProfile:
    allowed_successor_functions: frozenset[HarmonicFunction]

    def __post_init__(self) -> None:
        if not self.allowed_successor_functions:
            raise ValueError("tenon must allow at least one successor function")


@dataclass(frozen=True)
class MortiseProfile:
    accepted_own_functions: frozenset[HarmonicFunction]

    def __post_init__(self) -> None:
        if not self.accepted_own_functions:
            raise ValueError("mortise must accept at least one function")


def default_tenon(degree: ScaleDegree) -> TenonProfile:
    return TenonProfile(successor_table(functions_of(degree)))


def default_mortise(degree: ScaleDegree) -> MortiseProfile:
    return MortiseProfile(functions_of(degree).functions)


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MusicalBlock:
    """An immutable chord block; invalid connector combinations cannot exist."""

    id: str
    degree: ScaleDegree
    tenon: TenonProfile
    mortise: MortiseProfile
    symbol: BlockSymbol = field(compare=False)

    def __post_init__(self) -> None:
        if self.symbol != symbol_for(self.degree):
            raise ValueError(f"symbol does not match degree {self.degree}")
        if self.mortise.accepted_own_functions != functions_of(self.degree).functions:
            raise ValueError(f"mortise does not match functions of {self.degree}")
        if not self.tenon.allowed_successor_functions <= default_tenon(
            self.degree
        ).allowed_successor_functions:
            raise ValueError(f"tenon exceeds successor table for {self.degree}")

    def __str__(self) -> str:
        return f"{self.degree}#{self.id}"


def make_block(
    degree: ScaleDegree,
    tenon: TenonProfile | None = None,
    mortise: MortiseProfile | None = None,
    block_id: str | None = None,
) -> MusicalBlock:
    """Assemble a block; omitted connectors default from the degree's functions.

    An explicit tenon must be a nonempty subset of the degree's successor
    set; an explicit mortise must equal the degree's own functions.
    """
    full_tenon = default_tenon(degree)
    if tenon is None:
        tenon = full_tenon
    elif not (
        tenon.allowed_successor_functions
        and tenon.allowed_successor_functions
        <= full_tenon.allowed_successor_functions
    ):
        raise InvalidTenon(
            f"tenon not permitted for {degree}",
            degree=degree.roman_label,
            tenon=sorted(f.value for f in tenon.allowed_successor_functions),
        )
    expected_mortise = default_mortise(degree)
    if mortise is None:
        mortise = expected_mortise
    elif mortise != expected_mortise:
        raise InvalidMortise(
            f"mortise does not match the functions of {degree}",
            degree=degree.roman_label,
            mortise=sorted(f.value for f in mortise.accepted_own_functions),
        )
    if block_id is None:
        block_id = uuid.uuid4().hex[:8]
    return MusicalBlock(
        id=block_id,
        degree=degree,
        tenon=tenon,
        mortise=mortise,
        symbol=symbol_for(degree),
    )


def can_connect(left: MusicalBlock, right: MusicalBlock) -> bool:
    """True when ``right`` may directly follow ``left``."""
    return bool(
        left.tenon.allowed_successor_functions
        & right.mortise.accepted_own_functions
    )


def degrees_connect(left: ScaleDegree, right: ScaleDegree) -> bool:
    """can_connect over default blocks, as a degree-level lookup."""
    return _DEFAULT_CONNECT[left.value - 1][right.value - 1]


def compatibility_matrix(key: Key | None = None) -> list[list[bool]]:
    """7x7 connection matrix over default blocks, rows/columns in degree order.

    Connectivity is function-based, so the matrix is the same for every
    major key; the key argument only fixes the context it describes.
    """
    del key
    return [row[:] for row in _DEFAULT_CONNECT]


def _build_default_connect() -> list[list[bool]]:
    blocks = [make_block(d, block_id=d.roman_label) for d in DEGREES]
    return [[can_connect(a, b) for b in blocks] for a in blocks]


_DEFAULT_CONNECT = _build_default_connect()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_FUNCTIONS_BY_NAME = {f.value: f for f in HarmonicFunction}


def function_names(functions: frozenset[HarmonicFunction]) -> list[str]:
    """Function set as names in canonical tonic/subdominant/dominant order."""
    return [f.value for f in FUNCTION_ORDER if f in functions]


def functions_from_names(names: list[str]) -> frozenset[HarmonicFunction]:
    try:
        return frozenset(_FUNCTIONS_BY_NAME[n] for n in names)
    except KeyError as exc:
        raise ValueError(f"unknown harmonic function {exc.args[0]!r}") from None


def block_to_record(block: MusicalBlock) -> dict:
    return {
        "id": block.id,
        "degree": block.degree.roman_label,
        "tenon": function_names(block.tenon.allowed_successor_functions),
        "mortise": function_names(block.mortise.accepted_own_functions),
    }


def block_from_record(record: dict) -> MusicalBlock:
    from .theory import parse_degree

    return make_block(
        parse_degree(record["degree"]),
        tenon=TenonProfile(functions_from_names(record["tenon"])),
        mortise=MortiseProfile(functions_from_names(record["mortise"])),
        block_id=record["id"],
    )


def symbol_to_record(symbol: BlockSymbol) -> dict:
    return {
        "arrangement": symbol.arrangement.value,
        "shapes": [s.value for s in symbol.shapes],
    }
