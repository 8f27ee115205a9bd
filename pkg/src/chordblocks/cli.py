"""Command-line interface for offline use of the engine.

Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .blocks import DEGREES, compatibility_matrix
from .content import (
    ContentMissing,
    SchemaViolation,
    load_building_file,
)
from .errors import EngineError
from .grammar import UnparseableSequence, flatten, parse_building, validate_building
from .learning import level_sequence
from .midi import render_midi
from .theory import Key, parse_degree

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        key = Key.of(args.key)
        seq = [parse_degree(token) for token in args.degrees]
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        tree = parse_building(seq, key)
    except UnparseableSequence as exc:
        print(f"unparseable: {exc}")
        return EXIT_INVALID
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"surface: {' '.join(str(d) for d in flatten(tree.building))}")
    print(tree.describe())
    return EXIT_OK


def _load_building(path_text: str):
    path = Path(path_text)
    try:
        return load_building_file(path)
    except ContentMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaViolation as exc:
        print(f"schema violation: {exc}")
        return EXIT_INVALID


def cmd_validate(args: argparse.Namespace) -> int:
    building = _load_building(args.file)
    if isinstance(building, int):
        return building
    report = validate_building(building)
    if report.ok:
        surface = " ".join(str(d) for d in flatten(building))
        print(f"ok: {len(building.base)} base blocks, surface {surface}")
        return EXIT_OK
    print(report.describe())
    return EXIT_INVALID


def cmd_render(args: argparse.Namespace) -> int:
    building = _load_building(args.file)
    if isinstance(building, int):
        return building
    report = validate_building(building)
    if not report.ok:
        print(report.describe())
        return EXIT_INVALID
    try:
        doc = render_midi(building, tempo_bpm=args.tempo, chord_beats=args.beats)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.output)
    try:
        out.write_bytes(doc.data)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {len(doc.data)} bytes to {out}")
    return EXIT_OK


def cmd_levels_check(args: argparse.Namespace) -> int:
    try:
        levels = level_sequence(args.content)
    except ContentMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EngineError as exc:
        print(f"invalid content: {exc}")
        return EXIT_INVALID
    for level in levels:
        surface = " ".join(str(d) for d in flatten(level.demo_building))
        print(
            f"level {level.id}: teaches {level.teaches.roman_label:<3} "
            f"key {level.key.tonic.spelled_name:<2} surface {surface}"
        )
    print(f"ok: {len(levels)} levels valid")
    return EXIT_OK


def cmd_matrix(args: argparse.Namespace) -> int:
    del args
    matrix = compatibility_matrix()
    labels = [d.roman_label for d in DEGREES]
    width = 4
    print(" " * width + "".join(f"{label:>{width}}" for label in labels))
    allowed = 0
    for label, row in zip(labels, matrix):
        cells = "".join(f"{'.' if ok else 'x':>{width}}" for ok in row)
        allowed += sum(row)
        print(f"{label:<{width}}{cells}")
    print(f"{allowed} allowed, {49 - allowed} forbidden ('.' = connects, 'x' = repels)")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    try:
        serve(port=args.port, content_dir=args.content, store_dir=args.store,
              host=args.host)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chordblocks",
        description="Chord-block harmony engine: analyze, validate, render, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="parse a chord sequence into a building")
    p.add_argument("degrees", nargs="+", metavar="DEGREE",
                   help="roman numerals, e.g. I IV I V I")
    p.add_argument("--key", default="C", help="major key tonic (default C)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="validate a building file")
    p.add_argument("file", help="building JSON document")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="render a building file to a MIDI file")
    p.add_argument("file", help="building JSON document")
    p.add_argument("-o", "--output", required=True, help="output .mid path")
    p.add_argument("--tempo", type=float, default=90, help="tempo in BPM")
    p.add_argument("--beats", type=int, default=2, help="beats per chord")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("levels", help="content commands")
    levels_sub = p.add_subparsers(dest="levels_command", required=True)
    pc = levels_sub.add_parser("check", help="validate a content directory")
    pc.add_argument("content", nargs="?", default=None,
                    help="content directory (default: packaged content)")
    pc.set_defaults(func=cmd_levels_check)

    p = sub.add_parser("matrix", help="print the 7x7 chord compatibility table")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("serve", help="run the engine HTTP service")
    p.add_argument("--port", type=int, default=8572)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--content", default=None, help="content directory override")
    p.add_argument("--store", default=None, help="session store directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return EXIT_USAGE if exc.code not in (0,) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
