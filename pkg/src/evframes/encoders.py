"""Rasterizers that turn one event window into a frame representation.

Two scalar fields are supported, optionally restricted to one polarity:

* timestamp field: each active pixel holds the normalized time of its latest
  event, (t_n - t_begin) / (t_end - t_begin), with t_begin/t_end taken over
  all events in the window regardless of the polarity filter. Values lie in
  [0, 1]; pixels without events are 0. When every event in the window shares
  one timestamp the denominator degenerates and active pixels are set to 1.0
  (the end of activity).
* event count field: a per-pixel event histogram.

``encode_merged`` renders the positive and negative fields into channels 0
and 1 of a 3-channel 8-bit frame (channel 2 stays zero); ``encode_single``
ignores polarity and produces 1 channel. Quantization maps v to
round(255 * v / v_max) with round-half-up; v_max is fixed at 1.0 for the
timestamp kind and is the joint maximum over both polarity fields for the
count kind, so each frame is self-normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .windowing import EventWindow

KIND_TIMESTAMP = "timestamp"
KIND_EVENT_COUNT = "event_count"
KINDS = (KIND_TIMESTAMP, KIND_EVENT_COUNT)

POLARITY_MERGED = "merged"
POLARITY_IGNORE = "ignore"


@dataclass(eq=False)
class EncodedFrame:
    """An 8-bit (H, W, C) raster produced from one event window.

    kind and polarity_mode are None on frames read back from a frame-tensor
    file, which stores only geometry, window bounds and pixels.
    """

    pixels: np.ndarray
    kind: str | None
    polarity_mode: str | None
    window_start: int
    window_end: int
    empty: bool

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedFrame):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.polarity_mode == other.polarity_mode
            and self.window_start == other.window_start
            and self.window_end == other.window_end
            and self.empty == other.empty
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return (
            f"EncodedFrame({self.width}x{self.height}x{self.channels}, {self.kind}, "
            f"{self.polarity_mode}, [{self.window_start}, {self.window_end}))"
        )


def _filtered_columns(window: EventWindow, polarity: int | None):
    if polarity is None:
        return window.x, window.y, window.t
    mask = window.p == polarity
    return window.x[mask], window.y[mask], window.t[mask]


def timestamp_field(window: EventWindow, polarity: int | None = None) -> np.ndarray:
    """Normalized latest-event-time per pixel as an (H, W) float64 array.

    ``polarity`` restricts which events update a pixel (+1, -1, or None for
    both); the normalization bounds always come from the whole window.
    """
    g = window.geometry
    field = np.zeros((g.height, g.width))
    if window.empty:
        return field
    x, y, t = _filtered_columns(window, polarity)
    if len(t) == 0:
        return field
    last = _kernels.last_timestamp_field(x, y, t, g.width, g.height)
    active = last >= 0
    t_begin, t_end = window.t_begin, window.t_end
    if t_end == t_begin:
        field[active] = 1.0
    else:
        field[active] = (last[active] - t_begin) / (t_end - t_begin)
    return field


def event_count_field(window: EventWindow, polarity: int | None = None) -> np.ndarray:
    """Per-pixel event count as an (H, W) float64 array."""
    g = window.geometry
    x, y, _ = _filtered_columns(window, polarity)
    if len(x) == 0:
        return np.zeros((g.height, g.width))
    return _kernels.count_field(x, y, g.width, g.height).astype(np.float64)


_FIELD_FN = {KIND_TIMESTAMP: timestamp_field, KIND_EVENT_COUNT: event_count_field}


def quantize(field: np.ndarray, v_max: float) -> np.ndarray:
    """Map non-negative field values to uint8 as round(255 * v / v_max), half up.

    The order of operations matters: multiplying by a precomputed
    255.0 / v_max can land a hair below exact halves (e.g. 25 of 50 must
    give 127.5 -> 128), so scale before dividing.
    """
    if v_max <= 0.0:
        return np.zeros(field.shape, dtype=np.uint8)
    return np.floor(field * 255.0 / v_max + 0.5).astype(np.uint8)


def encode_merged(window: EventWindow, kind: str) -> EncodedFrame:
    """Render positive and negative fields into channels 0/1 of a 3-channel frame.

    Both channels share one quantization scale (joint maximum for the count
    kind, fixed 1.0 for the timestamp kind), so negating every polarity
    swaps the two channels exactly. Channel 2 is always zero.
    """
    field_fn = _field_fn(kind)
    pos = field_fn(window, 1)
    neg = field_fn(window, -1)
    v_max = 1.0 if kind == KIND_TIMESTAMP else max(float(pos.max()), float(neg.max()))
    g = window.geometry
    pixels = np.zeros((g.height, g.width, 3), dtype=np.uint8)
    pixels[..., 0] = quantize(pos, v_max)
    pixels[..., 1] = quantize(neg, v_max)
    return EncodedFrame(
        pixels, kind, POLARITY_MERGED, window.window_start, window.window_end, window.empty
    )


def encode_single(window: EventWindow, kind: str) -> EncodedFrame:
    """Render the polarity-blind field into a 1-channel frame."""
    field = _field_fn(kind)(window, None)
    v_max = 1.0 if kind == KIND_TIMESTAMP else float(field.max())
    pixels = quantize(field, v_max)[..., np.newaxis]
    return EncodedFrame(
        pixels, kind, POLARITY_IGNORE, window.window_start, window.window_end, window.empty
    )


def _field_fn(kind: str):
    try:
        return _FIELD_FN[kind]
    except KeyError:
        raise ValueError(f"unknown frame kind {kind!r}, expected one of {KINDS}") from None
