"""Independent Standard MIDI File reader for verifying rendered output.

Written directly from the SMF byte layout (header/track chunks,
variable-length deltas, channel and meta events, running status).
Shares no code with the engine's writer; no third-party MIDI package
exists in this environment, so this module is the independent side of
the dual-route check.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SmfEvent:
    tick: int
    kind: str            # "note_on" | "note_off" | "tempo" | "end_of_track" | "meta" | "other"
    channel: int | None = None
    note: int | None = None
    velocity: int | None = None
    tempo_us: int | None = None


@dataclass(frozen=True)
class SmfFile:
    format: int
    ntrks: int
    division: int
    events: list[SmfEvent]


def _read_vlq(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    length = 0
    while True:
        byte = data[pos]
        pos += 1
        length += 1
        if length > 4:
            raise ValueError("variable-length quantity longer than 4 bytes")
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos


def is_minimal_vlq(encoded: bytes) -> bool:
    """A VLQ is minimal when it has no redundant leading 0x80 byte."""
    if len(encoded) == 1:
        return True
    return encoded[0] != 0x80


def read_smf(data: bytes) -> SmfFile:
    if data[:4] != b"MThd":
        raise ValueError("missing MThd chunk")
    header_len = int.from_bytes(data[4:8], "big")
    if header_len != 6:
        raise ValueError(f"unexpected header length {header_len}")
    fmt = int.from_bytes(data[8:10], "big")
    ntrks = int.from_bytes(data[10:12], "big")
    division = int.from_bytes(data[12:14], "big")
    if division & 0x8000:
        raise ValueError("SMPTE division not supported by this reader")

    pos = 8 + header_len
    events: list[SmfEvent] = []
    tracks_read = 0
    while tracks_read < ntrks:
        if data[pos : pos + 4] != b"MTrk":
            raise ValueError(f"expected MTrk chunk at byte {pos}")
        track_len = int.from_bytes(data[pos + 4 : pos + 8], "big")
        track = data[pos + 8 : pos + 8 + track_len]
        if len(track) != track_len:
            raise ValueError("truncated track chunk")
        events.extend(_read_track(track))
        pos += 8 + track_len
        tracks_read += 1
    if pos != len(data):
        raise ValueError(f"{len(data) - pos} trailing bytes after last track")
    return SmfFile(fmt, ntrks, division, events)


def _read_track(track: bytes) -> list[SmfEvent]:
    events: list[SmfEvent] = []
    pos = 0
    tick = 0
    running_status: int | None = None
    saw_end = False
    while pos < len(track):
        if saw_end:
            raise ValueError("events after end-of-track")
        start = pos
        delta, pos = _read_vlq(track, pos)
        if not is_minimal_vlq(track[start:pos]):
            raise ValueError("non-minimal delta-time encoding")
        tick += delta
        status = track[pos]
        if status & 0x80:
            pos += 1
            if status < 0xF0:
                running_status = status
        else:
            if running_status is None:
                raise ValueError("data byte without running status")
            status = running_status
        if status == 0xFF:
            meta_type = track[pos]
            pos += 1
            length, pos = _read_vlq(track, pos)
            payload = track[pos : pos + length]
            pos += length
            if meta_type == 0x2F:
                events.append(SmfEvent(tick, "end_of_track"))
                saw_end = True
            elif meta_type == 0x51:
                events.append(
                    SmfEvent(tick, "tempo", tempo_us=int.from_bytes(payload, "big"))
                )
            else:
                events.append(SmfEvent(tick, "meta"))
        elif status in (0xF0, 0xF7):
            length, pos = _read_vlq(track, pos)
            pos += length
            events.append(SmfEvent(tick, "other"))
        else:
            kind_nibble = status & 0xF0
            channel = status & 0x0F
            if kind_nibble in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                a, b = track[pos], track[pos + 1]
                pos += 2
                if kind_nibble == 0x90 and b > 0:
                    events.append(SmfEvent(tick, "note_on", channel, a, b))
                elif kind_nibble == 0x80 or (kind_nibble == 0x90 and b == 0):
                    events.append(SmfEvent(tick, "note_off", channel, a, b))
                else:
                    events.append(SmfEvent(tick, "other", channel))
            elif kind_nibble in (0xC0, 0xD0):
                pos += 1
                events.append(SmfEvent(tick, "other", channel))
            else:
                raise ValueError(f"unknown status byte {status:#x}")
    if not saw_end:
        raise ValueError("track missing end-of-track meta event")
    return events
