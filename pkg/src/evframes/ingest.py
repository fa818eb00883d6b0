"""Readers and writers for event streams: AEDAT 2.0 binary and plain text.

AEDAT 2.0 layout: zero or more header lines, each starting with ``#`` and
ending with a newline, followed by 8-byte records of a 4-byte big-endian
address word and a 4-byte big-endian unsigned timestamp in ticks. Which
address bits hold x, y and polarity varies between sensors and recorder
versions, so the bit layout is explicit configuration (:class:`AedatLayout`)
with documented defaults for the DVS-128 and DAViS240C conventions.

The 32-bit tick counter wraps after ~71 minutes; wraps are detected (raw
timestamp dropping by more than 2^31) and corrected by adding 2^32 ticks per
wrap, so output timestamps are monotone int64 microseconds.

Text format: one event per line as ``t x y p`` (whitespace or commas),
``#`` comment lines skipped, polarity accepted as 1/-1/0 with 0 read as -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stream import EventStream, SensorGeometry

_WRAP_STEP = 1 << 32
_WRAP_JUMP = 1 << 31


class FormatError(ValueError):
    """Malformed input data; the message carries the position of the defect."""


@dataclass(frozen=True)
class AedatLayout:
    """Bit layout of one 32-bit AEDAT 2.0 address word.

    Masks are given right-aligned (applied after shifting), e.g. a 7-bit
    field is mask 0x7F. ``polarity_on_value`` names the raw polarity bit
    value that maps to p=+1; hardware conventions disagree, so it is data.
    ``type_bit``, when set, marks non-DVS records (IMU, special events):
    records with that bit set are skipped and counted, not parsed.
    ``timestamp_unit`` is microseconds per tick.
    """

    x_shift: int
    x_mask: int
    y_shift: int
    y_mask: int
    polarity_shift: int
    polarity_on_value: int
    timestamp_unit: int = 1
    type_bit: int | None = None

    def __post_init__(self):
        if self.polarity_on_value not in (0, 1):
            raise ValueError("polarity_on_value must be 0 or 1")
        if self.timestamp_unit < 1:
            raise ValueError("timestamp_unit must be a positive integer")
        fields = [
            ("x", self.x_mask << self.x_shift),
            ("y", self.y_mask << self.y_shift),
            ("polarity", 1 << self.polarity_shift),
        ]
        if self.type_bit is not None:
            fields.append(("type", 1 << self.type_bit))
        for i, (name_a, bits_a) in enumerate(fields):
            for name_b, bits_b in fields[i + 1 :]:
                if bits_a & bits_b:
                    raise ValueError(f"{name_a} and {name_b} bit fields overlap")


# x at bits 1-7, y at bits 8-14, polarity at bit 0 with raw 0 -> +1
DVS128_LAYOUT = AedatLayout(
    x_shift=1, x_mask=0x7F, y_shift=8, y_mask=0x7F, polarity_shift=0, polarity_on_value=0
)

# x at bits 12-21, y at bits 22-30, polarity at bit 11 with raw 1 -> +1;
# bit 31 set marks non-DVS packets (IMU etc.), which are skipped.
DAVIS240C_LAYOUT = AedatLayout(
    x_shift=12,
    x_mask=0x3FF,
    y_shift=22,
    y_mask=0x1FF,
    polarity_shift=11,
    polarity_on_value=1,
    type_bit=31,
)


@dataclass(frozen=True)
class ParseStats:
    """Bookkeeping from one AEDAT parse, for reporting alongside the stream."""

    header_lines: int
    records: int
    events: int
    skipped_non_dvs: int
    timestamp_wraps: int


def parse_aedat2(data: bytes, layout: AedatLayout, geometry: SensorGeometry) -> EventStream:
    """Parse AEDAT 2.0 bytes into an EventStream (see module docstring)."""
    stream, _ = parse_aedat2_stats(data, layout, geometry)
    return stream


def parse_aedat2_stats(
    data: bytes, layout: AedatLayout, geometry: SensorGeometry
) -> tuple[EventStream, ParseStats]:
    """Parse AEDAT 2.0 bytes, also returning parse statistics."""
    body_start, header_lines = _skip_header(data)
    body = data[body_start:]
    n_records, extra = divmod(len(body), 8)
    if extra:
        raise FormatError(
            f"trailing partial record: {extra} byte(s) at byte offset {body_start + n_records * 8}"
        )

    if n_records == 0:
        stats = ParseStats(header_lines, 0, 0, 0, 0)
        return EventStream.empty(geometry), stats

    words = np.frombuffer(body, dtype=">u4").reshape(-1, 2)
    addr = words[:, 0].astype(np.int64)
    raw_ts = words[:, 1].astype(np.int64)

    # Wrap correction runs over all records (the tick counter is global to
    # the file), before any non-DVS records are dropped.
    wraps = np.diff(raw_ts) < -_WRAP_JUMP
    n_wraps = int(np.count_nonzero(wraps))
    ticks = raw_ts
    if n_wraps:
        offsets = np.zeros(n_records, dtype=np.int64)
        np.cumsum(wraps, out=offsets[1:])
        ticks = raw_ts + offsets * _WRAP_STEP

    backward = np.flatnonzero(np.diff(ticks) < 0)
    if backward.size:
        i = int(backward[0]) + 1
        raise FormatError(
            f"record {i}: timestamp moves backward ({ticks[i]} after {ticks[i - 1]}) "
            "and is not a 32-bit wrap"
        )

    if layout.type_bit is not None:
        is_dvs = (addr >> layout.type_bit) & 1 == 0
        n_skipped = n_records - int(np.count_nonzero(is_dvs))
    else:
        is_dvs = slice(None)
        n_skipped = 0

    addr = addr[is_dvs]
    ticks = ticks[is_dvs]
    record_idx = np.arange(n_records)[is_dvs]

    x = (addr >> layout.x_shift) & layout.x_mask
    y = (addr >> layout.y_shift) & layout.y_mask
    bad = np.flatnonzero((x >= geometry.width) | (y >= geometry.height))
    if bad.size:
        i = int(record_idx[bad[0]])
        raise FormatError(
            f"record {i}: coordinate ({x[bad[0]]}, {y[bad[0]]}) outside "
            f"{geometry.width}x{geometry.height} geometry"
        )

    raw_pol = (addr >> layout.polarity_shift) & 1
    p = np.where(raw_pol == layout.polarity_on_value, 1, -1)
    t = ticks * layout.timestamp_unit

    stream = EventStream(geometry, x, y, t, p)
    stats = ParseStats(header_lines, n_records, len(stream), n_skipped, n_wraps)
    return stream, stats


def _skip_header(data: bytes) -> tuple[int, int]:
    """Consume '#'-prefixed header lines; return (body offset, line count)."""
    pos = 0
    lines = 0
    while pos < len(data) and data[pos : pos + 1] == b"#":
        nl = data.find(b"\n", pos)
        if nl == -1:
            raise FormatError(f"header line {lines + 1}: missing trailing newline")
        try:
            data[pos:nl].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"header line {lines + 1}: not valid text ({exc})") from None
        pos = nl + 1
        lines += 1
    return pos, lines


def parse_text(text: str, geometry: SensorGeometry) -> EventStream:
    """Parse the ``t x y p`` text format into an EventStream.

    Fields may be separated by whitespace or commas; ``#`` lines are
    comments; polarity 0 is read as -1. Raises FormatError with a 1-based
    line number for malformed lines, out-of-bounds coordinates, or
    timestamps that move backward.
    """
    ts, xs, ys, ps = [], [], [], []
    prev_t = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.replace(",", " ").split()
        if len(parts) != 4:
            raise FormatError(f"line {lineno}: expected 4 fields 't x y p', got {len(parts)}")
        try:
            t, x, y, p = (int(v) for v in parts)
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer field in {stripped!r}") from None
        if p == 0:
            p = -1
        if p not in (1, -1):
            raise FormatError(f"line {lineno}: polarity must be 1, -1 or 0, got {p}")
        if t < 0:
            raise FormatError(f"line {lineno}: negative timestamp {t}")
        if not (0 <= x < geometry.width and 0 <= y < geometry.height):
            raise FormatError(
                f"line {lineno}: coordinate ({x}, {y}) outside "
                f"{geometry.width}x{geometry.height} geometry"
            )
        if prev_t is not None and t < prev_t:
            raise FormatError(f"line {lineno}: timestamp moves backward ({t} after {prev_t})")
        prev_t = t
        ts.append(t)
        xs.append(x)
        ys.append(y)
        ps.append(p)
    return EventStream(geometry, xs, ys, ts, ps)


def write_text(stream: EventStream) -> str:
    """Serialize a stream as ``t x y p`` lines; parse_text inverts it exactly."""
    if len(stream) == 0:
        return ""
    cols = np.empty((len(stream), 4), dtype=np.int64)
    cols[:, 0] = stream.t
    cols[:, 1] = stream.x
    cols[:, 2] = stream.y
    cols[:, 3] = stream.p
    return "\n".join(" ".join(str(v) for v in row) for row in cols.tolist()) + "\n"
