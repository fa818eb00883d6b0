"""Synthetic event generation from an intensity-frame sequence.

Models an ideal contrast-change sensor: per pixel, log intensity is
interpolated linearly between consecutive frames, and an event fires every
time it moves a full contrast threshold away from the pixel's reference
level. The reference steps by the threshold at each crossing, so a large
jump emits a burst of events along the interpolated ramp. An optional
refractory period suppresses (but never re-times) crossings that land too
soon after the previous emitted one; the reference level steps either way.

Crossing times are computed in exact float microseconds and rounded
half-up to integer microseconds only on output. Events are returned in
(timestamp, row-major pixel index) order, which makes the output a valid,
deterministically ordered stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .stream import EventStream, SensorGeometry


@dataclass(frozen=True)
class SimConfig:
    """Sensor model parameters.

    contrast_threshold is the log-intensity step between events (unitless,
    must be positive). refractory_period_us suppresses events closer than
    this to the previous emitted event at the same pixel; zero disables it.
    """

    contrast_threshold: float = 0.2
    refractory_period_us: int = 0

    def __post_init__(self):
        if not self.contrast_threshold > 0:
            raise ValueError("contrast_threshold must be positive")
        if self.refractory_period_us < 0:
            raise ValueError("refractory_period_us must be non-negative")


def simulate(intensities, timestamps_us, config: SimConfig = SimConfig()) -> EventStream:
    """Generate the event stream an ideal sensor would emit for a scene.

    intensities is an (N, H, W) array of strictly positive linear
    intensities; timestamps_us gives the N frame times in microseconds,
    strictly increasing. At least two frames are required.
    """
    frames = np.asarray(intensities, dtype=np.float64)
    times = np.asarray(timestamps_us, dtype=np.int64)
    if frames.ndim != 3:
        raise ValueError(f"intensities must be (N, H, W), got shape {frames.shape}")
    n_frames, height, width = frames.shape
    if n_frames < 2:
        raise ValueError("need at least two frames to interpolate between")
    if times.shape != (n_frames,):
        raise ValueError(f"expected {n_frames} timestamps, got {times.shape}")
    if np.any(np.diff(times) <= 0):
        raise ValueError("frame timestamps must be strictly increasing")
    if np.any(frames <= 0):
        raise ValueError("intensities must be strictly positive (log is taken)")

    log_frames = np.ascontiguousarray(np.log(frames))
    t, x, y, p = _kernels.simulate_crossings(
        log_frames, times, float(config.contrast_threshold), float(config.refractory_period_us)
    )

    # Kernel output order depends on the backend; impose (t, pixel) order.
    pix = y.astype(np.int64) * width + x
    order = np.lexsort((pix, t))
    geometry = SensorGeometry(width, height)
    return EventStream(geometry, x[order], y[order], t[order], p[order])
