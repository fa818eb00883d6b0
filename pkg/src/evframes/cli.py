"""Command-line pipeline: parse -> window -> encode -> chunk -> aggregate.

Exit codes: 0 on success, 1 for data errors (bad file contents, reported
with position context on stderr), 2 for usage errors (argparse's own
convention, also used for out-of-domain flag values).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .chunking import POLICIES, POLICY_KEEP, apply_empty_policy, make_chunks
from .encoders import KIND_EVENT_COUNT, KIND_TIMESTAMP, POLARITY_IGNORE, POLARITY_MERGED
from .formats import parse_scores, read_frame_tensor, write_frame_tensor, write_pgm, write_ppm
from .ingest import (
    DAVIS240C_LAYOUT,
    DVS128_LAYOUT,
    ParseStats,
    parse_aedat2_stats,
    parse_text,
    write_text,
)
from .pipeline import encode_stream
from .scoring import temporal_average_pool
from .simulator import SimConfig, simulate
from .stream import (
    DAVIS240C_GEOMETRY,
    DVS128_GEOMETRY,
    EventStream,
    SensorGeometry,
    truncate_by_ratio,
)
from .windowing import DEFAULT_WINDOW_US, WindowConfig

_LAYOUTS = {
    "dvs128": (DVS128_LAYOUT, DVS128_GEOMETRY),
    "davis240c": (DAVIS240C_LAYOUT, DAVIS240C_GEOMETRY),
}
_KINDS = {"timestamp": KIND_TIMESTAMP, "count": KIND_EVENT_COUNT}


# ---------------------------------------------------------------------------
# Argument value parsers (bad flag values are usage errors, exit code 2)
# ---------------------------------------------------------------------------


def _geometry_arg(text: str) -> SensorGeometry:
    try:
        w, h = text.lower().split("x")
        return SensorGeometry(int(w), int(h))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"geometry must look like 320x240, got {text!r}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"ratio must be in (0, 1], got {text}")
    return value


# ---------------------------------------------------------------------------
# Shared stream loading
# ---------------------------------------------------------------------------


def _load_stream(args) -> tuple[EventStream, ParseStats | None]:
    fmt = args.format
    if fmt == "auto":
        fmt = "aedat2" if args.input.endswith(".aedat") else "text"
    layout, native_geometry = _LAYOUTS[args.layout]
    geometry = args.geometry if args.geometry is not None else native_geometry
    if fmt == "aedat2":
        stream, stats = parse_aedat2_stats(Path(args.input).read_bytes(), layout, geometry)
        return stream, stats
    return parse_text(Path(args.input).read_text(), geometry), None


def _add_stream_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="event stream file")
    parser.add_argument(
        "--format",
        choices=("auto", "text", "aedat2"),
        default="auto",
        help="input format; auto picks aedat2 for *.aedat files, text otherwise",
    )
    parser.add_argument(
        "--layout",
        choices=sorted(_LAYOUTS),
        default="dvs128",
        help="AEDAT address bit layout (also sets the default geometry)",
    )
    parser.add_argument(
        "--geometry",
        type=_geometry_arg,
        default=None,
        metavar="WxH",
        help="sensor size, e.g. 128x128 (default: the layout's native size)",
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_encode(args) -> int:
    stream, _ = _load_stream(args)
    frames = encode_stream(
        stream,
        WindowConfig(args.window_us),
        kind=_KINDS[args.kind],
        polarity_mode=args.polarity,
        threads=args.threads,
    )
    channels = 3 if args.polarity == POLARITY_MERGED else 1
    shape = (stream.geometry.height, stream.geometry.width, channels)
    Path(args.output).write_bytes(write_frame_tensor(frames, shape=shape))
    if args.emit_images is not None:
        os.makedirs(args.emit_images, exist_ok=True)
        for i, frame in enumerate(frames):
            if frame.channels == 1:
                name, data = f"frame_{i:06d}.pgm", write_pgm(frame.pixels)
            else:
                name, data = f"frame_{i:06d}.ppm", write_ppm(frame.pixels)
            Path(args.emit_images, name).write_bytes(data)
    return 0


def cmd_chunk(args) -> int:
    tensor = read_frame_tensor(Path(args.frames).read_bytes())
    chunks = apply_empty_policy(make_chunks(tensor.frames), args.policy)
    lines = [" ".join(str(i) for i in chunk.frame_indices) for chunk in chunks]
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_aggregate(args) -> int:
    vectors, class_names = parse_scores(Path(args.scores).read_text())
    prediction = temporal_average_pool(vectors, class_names=class_names)
    lines = [
        "mean_scores: " + " ".join(repr(float(s)) for s in prediction.mean_scores),
        f"label: {prediction.label}",
    ]
    if prediction.label_name is not None:
        lines.append(f"label_name: {prediction.label_name}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_simulate(args) -> int:
    tensor = read_frame_tensor(Path(args.input).read_bytes())
    if tensor.channels != 1:
        raise ValueError(
            f"simulate needs 1-channel intensity frames, got {tensor.channels} channels"
        )
    if len(tensor.frames) < 2:
        raise ValueError("need at least two frames to interpolate between")
    intensities = 1.0 + np.stack([f.pixels[:, :, 0] for f in tensor.frames]).astype(np.float64)
    times = np.array([f.window_start for f in tensor.frames], dtype=np.int64)
    out = simulate(intensities, times, SimConfig(args.threshold, args.refractory_us))
    Path(args.output).write_text(write_text(out))
    return 0


def cmd_truncate(args) -> int:
    stream, _ = _load_stream(args)
    Path(args.output).write_text(write_text(truncate_by_ratio(stream, args.ratio)))
    return 0


def cmd_info(args) -> int:
    stream, stats = _load_stream(args)
    lines = [
        f"geometry: {stream.geometry.width}x{stream.geometry.height}",
        f"events: {len(stream)}",
    ]
    if len(stream):
        lines.append(f"t_first: {stream.t_first}")
        lines.append(f"t_last: {stream.t_last}")
    lines.append(f"duration_us: {stream.duration_us}")
    lines.append(f"positive: {int(np.count_nonzero(stream.p == 1))}")
    lines.append(f"negative: {int(np.count_nonzero(stream.p == -1))}")
    if stats is not None:
        lines.append(f"header_lines: {stats.header_lines}")
        lines.append(f"records: {stats.records}")
        lines.append(f"skipped_non_dvs: {stats.skipped_non_dvs}")
        lines.append(f"timestamp_wraps: {stats.timestamp_wraps}")
    _emit("".join(line + "\n" for line in lines), None)
    return 0


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evframes",
        description="Event-camera stream preprocessing: windowed frame encoding, "
        "chunking, score aggregation and a contrast-threshold simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("encode", help="segment a stream into windows and encode frames")
    _add_stream_input(p)
    p.add_argument("output", help="frame tensor output path")
    p.add_argument(
        "--window-us",
        type=_positive_int,
        default=DEFAULT_WINDOW_US,
        help=f"window length in microseconds (default {DEFAULT_WINDOW_US})",
    )
    p.add_argument(
        "--kind",
        choices=sorted(_KINDS),
        default="timestamp",
        help="per-pixel statistic: latest normalized timestamp, or event count",
    )
    p.add_argument(
        "--polarity",
        choices=(POLARITY_MERGED, POLARITY_IGNORE),
        default=POLARITY_MERGED,
        help="merged keeps polarities in separate channels; ignore pools them",
    )
    p.add_argument("--threads", type=_positive_int, default=1, help="windows encoded in parallel")
    p.add_argument(
        "--emit-images",
        metavar="DIR",
        default=None,
        help="also write one PGM/PPM image per frame into DIR (frame_000000.*)",
    )
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("chunk", help="list sliding 3-frame chunks of a frame tensor")
    p.add_argument("frames", help="frame tensor file")
    p.add_argument(
        "--policy",
        choices=POLICIES,
        default=POLICY_KEEP,
        help="what to do with chunks whose frames are all empty",
    )
    p.add_argument("-o", "--output", default=None, help="manifest path (default: stdout)")
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("aggregate", help="average per-chunk scores into one prediction")
    p.add_argument("scores", help="score table file")
    p.add_argument("-o", "--output", default=None, help="prediction path (default: stdout)")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("simulate", help="generate events from intensity frames")
    p.add_argument("input", help="1-channel frame tensor; pixel v maps to intensity 1+v")
    p.add_argument("output", help="event stream output path (text format)")
    p.add_argument(
        "--threshold", type=_positive_float, default=0.2, help="contrast threshold (log units)"
    )
    p.add_argument(
        "--refractory-us", type=_non_negative_int, default=0, help="per-pixel dead time"
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("truncate", help="keep only the leading fraction of a stream's span")
    _add_stream_input(p)
    p.add_argument("output", help="event stream output path (text format)")
    p.add_argument("--ratio", type=_ratio, required=True, help="observed fraction in (0, 1]")
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("info", help="print stream summary and parse statistics")
    _add_stream_input(p)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"evframes: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
