"""Content and document schemas: canonical JSON, building docs, level files.

Documents are UTF-8 JSON with a fixed field order and 2-space indent,
so serialize(deserialize(doc)) is byte-identical on canonical files.
Loaders reject unknown fields; grammar-level validity is checked by the
callers that need it (a structurally well-formed doc may still describe
an invalid building, which ``validate`` commands report rather than
refuse to read).
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .blocks import (
    MortiseProfile,
    TenonProfile,
    function_names,
    functions_from_names,
    make_block,
)
from .errors import EngineError
from .grammar import Building, Prolongation, StructureKind
from .theory import KEY_TONIC_NAMES, Key, ScaleDegree, UnknownDegree, parse_degree

SCHEMA_VERSION = 1

CONTENT_ENV_VAR = "CHORDBLOCKS_CONTENT"

LEVEL_FILE_NAMES = tuple(f"level_{n:02d}.json" for n in range(1, 8))


class ContentMissing(EngineError):
    code = "E_CONTENT_MISSING"


class SchemaViolation(EngineError):
    code = "E_SCHEMA"


# ---------------------------------------------------------------------------
# Canonical JSON
# ---------------------------------------------------------------------------


def dump_canonical(doc: dict) -> str:
    """Canonical text form: insertion-ordered keys, 2-space indent, newline-terminated."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_canonical(path: Path, doc: dict) -> None:
    path.write_text(dump_canonical(doc), encoding="utf-8")


def read_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ContentMissing(f"missing content file: {path}", path=str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid JSON: {exc}", path=str(path)) from None
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: expected a JSON object", path=str(path))
    return doc


def _require_fields(doc: dict, required: dict[str, type | tuple], where: str) -> None:
    unknown = set(doc) - set(required)
    if unknown:
        raise SchemaViolation(f"{where}: unknown fields {sorted(unknown)}")
    for name, kind in required.items():
        if name not in doc:
            raise SchemaViolation(f"{where}: missing field {name!r}")
        if not isinstance(doc[name], kind):
            raise SchemaViolation(f"{where}: field {name!r} has the wrong type")


def _parse_degree_checked(label: object, where: str) -> ScaleDegree:
    if not isinstance(label, str):
        raise SchemaViolation(f"{where}: degree labels are strings")
    try:
        return parse_degree(label)
    except UnknownDegree:
        raise SchemaViolation(f"{where}: unknown degree label {label!r}") from None


def _parse_key_checked(name: str, where: str) -> Key:
    if name not in KEY_TONIC_NAMES:
        raise SchemaViolation(f"{where}: unknown key {name!r}")
    return Key.of(name)


# ---------------------------------------------------------------------------
# Building documents
# ---------------------------------------------------------------------------


def building_to_doc(building: Building) -> dict:
    base = [
        {
            "degree": block.degree.roman_label,
            "tenon": function_names(block.tenon.allowed_successor_functions),
            "mortise": function_names(block.mortise.accepted_own_functions),
        }
        for block in building.base
    ]
    prolongations = [
        {
            "kind": p.kind.value,
            "anchor": p.anchor,
            "inner": [b.degree.roman_label for b in p.inner],
        }
        for p in sorted(building.prolongations, key=lambda p: (p.anchor, p.kind.value))
    ]
    return {
        "key": building.key.tonic.spelled_name,
        "base": base,
        "prolongations": prolongations,
    }


def building_from_doc(doc: dict, where: str = "building") -> Building:
    """Decode a building document; schema errors raise, grammar violations do not."""
    _require_fields(doc, {"key": str, "base": list, "prolongations": list}, where)
    key = _parse_key_checked(doc["key"], where)

    base = []
    for i, entry in enumerate(doc["base"]):
        spot = f"{where}.base[{i}]"
        if not isinstance(entry, dict):
            raise SchemaViolation(f"{spot}: expected an object")
        _require_fields(entry, {"degree": str, "tenon": list, "mortise": list}, spot)
        degree = _parse_degree_checked(entry["degree"], spot)
        try:
            tenon = TenonProfile(functions_from_names(entry["tenon"]))
            mortise = MortiseProfile(functions_from_names(entry["mortise"]))
            base.append(make_block(degree, tenon, mortise, block_id=f"b{i}"))
        except (ValueError, EngineError) as exc:
            raise SchemaViolation(f"{spot}: {exc}") from None

    prolongations = []
    for i, entry in enumerate(doc["prolongations"]):
        spot = f"{where}.prolongations[{i}]"
        if not isinstance(entry, dict):
            raise SchemaViolation(f"{spot}: expected an object")
        _require_fields(entry, {"kind": str, "anchor": int, "inner": list}, spot)
        if entry["kind"] not in (StructureKind.NEIGHBOR.value, StructureKind.PASSING.value):
            raise SchemaViolation(f"{spot}: kind must be neighbor or passing")
        kind = StructureKind(entry["kind"])
        tag = "n" if kind is StructureKind.NEIGHBOR else "g"
        inner = tuple(
            make_block(
                _parse_degree_checked(label, spot),
                block_id=f"{tag}{entry['anchor']}i{j}",
            )
            for j, label in enumerate(entry["inner"])
        )
        if not 1 <= len(inner) <= 2:
            raise SchemaViolation(f"{spot}: inner carries one or two chords")
        prolongations.append(Prolongation(kind, entry["anchor"], inner))

    return Building(key, tuple(base), tuple(prolongations))


def load_building_file(path: Path) -> Building:
    return building_from_doc(read_json(path), where=path.name)


# ---------------------------------------------------------------------------
# Level files
# ---------------------------------------------------------------------------

_LEVEL_FIELDS: dict[str, type | tuple] = {
    "schema_version": int,
    "level_id": int,
    "teaches": str,
    "key": str,
    "intro_text": str,
    "includes_basics": bool,
    "demo_building": dict,
    "puzzle_seed": int,
    "tempo_bpm": (int, float),
    "chord_beats": int,
}

_LEVEL_OPTIONAL = {"tempo_bpm": 90, "chord_beats": 2}


def level_doc(
    level_id: int,
    teaches: str,
    key: str,
    intro_text: str,
    includes_basics: bool,
    demo_building: dict,
    puzzle_seed: int,
    tempo_bpm: float = 90,
    chord_beats: int = 2,
) -> dict:
    """A level document in canonical field order."""
    return {
        "schema_version": SCHEMA_VERSION,
        "level_id": level_id,
        "teaches": teaches,
        "key": key,
        "intro_text": intro_text,
        "includes_basics": includes_basics,
        "demo_building": demo_building,
        "puzzle_seed": puzzle_seed,
        "tempo_bpm": tempo_bpm,
        "chord_beats": chord_beats,
    }


def level_from_doc(doc: dict, where: str) -> dict:
    """Validate a level document and fill optional defaults; returns the doc."""
    filled = dict(doc)
    for name, default in _LEVEL_OPTIONAL.items():
        filled.setdefault(name, default)
    _require_fields(filled, _LEVEL_FIELDS, where)
    if filled["schema_version"] != SCHEMA_VERSION:
        raise SchemaViolation(
            f"{where}: unsupported schema_version {filled['schema_version']}"
        )
    _parse_degree_checked(filled["teaches"], where)
    _parse_key_checked(filled["key"], where)
    if filled["tempo_bpm"] <= 0 or filled["chord_beats"] < 1:
        raise SchemaViolation(f"{where}: bad tempo or chord length")
    return filled


def canonical_level_doc(doc: dict) -> dict:
    """Reorder a validated level doc into canonical field order."""
    return level_doc(
        level_id=doc["level_id"],
        teaches=doc["teaches"],
        key=doc["key"],
        intro_text=doc["intro_text"],
        includes_basics=doc["includes_basics"],
        demo_building=building_to_doc(building_from_doc(doc["demo_building"])),
        puzzle_seed=doc["puzzle_seed"],
        tempo_bpm=doc["tempo_bpm"],
        chord_beats=doc["chord_beats"],
    )


# ---------------------------------------------------------------------------
# Content directory
# ---------------------------------------------------------------------------


def default_content_dir() -> Path:
    """Env override first, then the content shipped inside the package."""
    env = os.environ.get(CONTENT_ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("chordblocks") / "content"))


def resolve_content_dir(content_dir: str | Path | None) -> Path:
    path = Path(content_dir) if content_dir else default_content_dir()
    if not path.is_dir():
        raise ContentMissing(f"content directory not found: {path}", path=str(path))
    return path
