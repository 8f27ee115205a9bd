"""Creation Mode: palette of learned chords, block assembly, and finalizing.

The palette is exactly what the learner has completed levels for, so
free composition opens up after level 1 and grows chord by chord. A
workspace finalizes into a composition only when nothing is left
floating and the assembled building validates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import (
    MortiseProfile,
    MusicalBlock,
    TenonProfile,
    default_mortise,
    default_tenon,
    function_names,
    functions_from_names,
    make_block,
    symbol_for,
    symbol_to_record,
)
from .errors import EngineError
from .grammar import (
    Building,
    ValidationReport,
    Violation,
    building_violations,
    flatten,
)
from .layout import Workspace
from .learning import TEACHING_ORDER, Progress
from .theory import ScaleDegree

DEFAULT_MAX_SURFACE_CHORDS = 32


class ChordNotLearned(EngineError):
    code = "E_CHORD_NOT_LEARNED"


class CreationLocked(EngineError):
    code = "E_CREATION_LOCKED"


class DetachedBlocks(EngineError):
    code = "E_DETACHED_BLOCKS"

    def __init__(self, block_ids: list[str]) -> None:
        super().__init__(
            f"{len(block_ids)} block(s) still floating", block_ids=block_ids
        )
        self.block_ids = block_ids


class ValidationFailed(EngineError):
    code = "E_VALIDATION_FAILED"

    def __init__(self, report: ValidationReport) -> None:
        super().__init__(f"building invalid: {report.describe()}")
        self.report = report


@dataclass(frozen=True)
class PaletteEntry:
    degree: ScaleDegree
    symbol: dict
    tenon_options: list[str]
    mortise: list[str]

    def to_record(self) -> dict:
        return {
            "degree": self.degree.roman_label,
            "symbol": self.symbol,
            "tenon_options": self.tenon_options,
            "mortise": self.mortise,
        }


def palette(progress: Progress) -> list[PaletteEntry]:
    """Learned chords in teaching order, with symbol and connector defaults."""
    learned = progress.learned_degrees
    return [
        PaletteEntry(
            degree=d,
            symbol=symbol_to_record(symbol_for(d)),
            tenon_options=function_names(default_tenon(d).allowed_successor_functions),
            mortise=function_names(default_mortise(d).accepted_own_functions),
        )
        for d in TEACHING_ORDER
        if d in learned
    ]


def assemble(
    progress: Progress,
    degree: ScaleDegree,
    tenon_names: list[str] | None = None,
    mortise_names: list[str] | None = None,
    block_id: str | None = None,
) -> MusicalBlock:
    """Build a block from palette choices; the chord must already be learned."""
    if degree not in progress.learned_degrees:
        raise ChordNotLearned(
            f"{degree.roman_label} has not been learned yet",
            degree=degree.roman_label,
        )
    tenon = (
        TenonProfile(functions_from_names(tenon_names))
        if tenon_names is not None
        else None
    )
    mortise = (
        MortiseProfile(functions_from_names(mortise_names))
        if mortise_names is not None
        else None
    )
    return make_block(degree, tenon, mortise, block_id=block_id)


@dataclass(frozen=True)
class Composition:
    name: str
    building: Building
    created_at: float
    author_session: str

    def surface(self) -> list[ScaleDegree]:
        return flatten(self.building)


def finalize(
    workspace: Workspace,
    name: str,
    created_at: float,
    author_session: str,
    max_surface_chords: int = DEFAULT_MAX_SURFACE_CHORDS,
) -> Composition:
    """Turn a fully assembled workspace into a composition.

    Fails on floating blocks or any building violation, including an
    over-long surface; a finalized composition always plays legally.
    """
    detached = workspace.detached_ids()
    if detached:
        raise DetachedBlocks(sorted(detached))
    building = workspace.derive_building()
    violations = building_violations(building)
    if not violations and len(flatten(building)) > max_surface_chords:
        violations = [
            Violation(
                "surface_too_long",
                f"surface exceeds {max_surface_chords} chords",
            )
        ]
    if violations:
        raise ValidationFailed(ValidationReport(tuple(violations)))
    return Composition(
        name=name,
        building=building,
        created_at=created_at,
        author_session=author_session,
    )
