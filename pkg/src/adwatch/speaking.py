"""Visual speech detection from lip-distance time series.

Per frame, the vertical distance between the inner upper and lower lip
landmarks is computed; a one-second window around each frame is resampled
to a fixed 30 samples and classified by the temporal CNN. Runs of speaking
frames become events; only runs strictly longer than one second count as
distraction (shorter bursts are engaging reactions to the ad, not
inattention).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cnn import TemporalCnn
from .config import PipelineConfig
from .errors import DataError, MissingArtifactError
from .records import MOUTH_LOWER_INNER, MOUTH_UPPER_INNER, FrameArrays
from .temporal import Event, events_from_flags, find_runs


@dataclass(frozen=True)
class LipWindow:
    """One second of resampled lip distance centered on a frame."""

    samples: np.ndarray   # fixed length, finite, >= 0
    start_frame: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(samples)) or np.any(samples < 0):
            raise DataError("lip window samples must be finite and nonnegative")
        object.__setattr__(self, "samples", samples)


def lip_distance(mouth_points: np.ndarray) -> np.ndarray:
    """Euclidean distance between inner upper and lower lip points.

    Accepts (4, 2) for one frame or (n, 4, 2) for a session.
    """
    pts = np.asarray(mouth_points, dtype=np.float64)
    single = pts.ndim == 2
    if single:
        pts = pts[None]
    diff = pts[:, MOUTH_UPPER_INNER] - pts[:, MOUTH_LOWER_INNER]
    dist = np.linalg.norm(diff, axis=1)
    return float(dist[0]) if single else dist


@dataclass
class WindowedSeries:
    """Per-frame resampled windows plus a scored mask."""

    windows: np.ndarray   # (n, window_samples)
    scored: np.ndarray    # (n,) bool


def build_windows(frames: FrameArrays, config: PipelineConfig) -> WindowedSeries:
    """Resample the lip series into one window per frame.

    A frame's window spans the second centered on it, linearly interpolated
    over timestamps onto ``window_samples`` points. Gaps where the face was
    lost are bridged by holding the last valid value for up to
    ``max_hold_samples`` consecutive source frames; windows touching longer
    gaps, or whose surrounding second holds fewer than ``min_valid_samples``
    valid frames, are left unscored.
    """
    n = len(frames)
    times = frames.timestamp_ms / 1000.0
    valid = frames.face_expr.copy()
    dist = lip_distance(frames.mouth)

    windows = np.zeros((n, config.window_samples), dtype=np.float64)
    scored = np.zeros(n, dtype=bool)
    if not np.any(valid):
        return WindowedSeries(windows=windows, scored=scored)

    # frames inside invalid runs longer than the hold budget poison windows
    unfillable = np.zeros(n, dtype=bool)
    for start, end in find_runs(~valid):
        if end - start + 1 > config.max_hold_samples:
            unfillable[start : end + 1] = True

    vt = times[valid]
    vd = dist[valid]
    half = config.window_span_s / 2.0
    grid = (
        times[:, None]
        + np.linspace(-half, half, config.window_samples)[None, :]
    )
    windows = np.interp(grid.ravel(), vt, vd).reshape(n, config.window_samples)

    # count valid source frames inside each window span
    cum = np.concatenate(([0], np.cumsum(valid.astype(np.int64))))
    lo = np.searchsorted(times, times - half, side="left")
    hi = np.searchsorted(times, times + half, side="right")
    valid_counts = cum[hi] - cum[lo]

    # a window is poisoned if any unfillable frame falls inside its span
    cum_bad = np.concatenate(([0], np.cumsum(unfillable.astype(np.int64))))
    bad_counts = cum_bad[hi] - cum_bad[lo]

    scored = (valid_counts >= config.min_valid_samples) & (bad_counts == 0)
    return WindowedSeries(windows=windows, scored=scored)


def window_for_frame(frames: FrameArrays, frame: int, config: PipelineConfig) -> Optional[LipWindow]:
    """The resampled window centered on one frame, or None if unscorable."""
    series = build_windows(frames, config)
    if not 0 <= frame < len(frames):
        raise DataError(f"frame {frame} outside session of {len(frames)} frames")
    if not series.scored[frame]:
        return None
    t_start = frames.timestamp_ms[frame] / 1000.0 - config.window_span_s / 2
    start = int(np.searchsorted(frames.timestamp_ms / 1000.0, t_start, side="left"))
    return LipWindow(samples=series.windows[frame], start_frame=start)


def speaking_probability(window, net: TemporalCnn) -> float:
    """Deterministic speech probability for one window (array or LipWindow)."""
    if net is None:
        raise MissingArtifactError("speaking CNN is not loaded")
    if isinstance(window, LipWindow):
        window = window.samples
    return float(net.predict_proba(np.asarray(window, dtype=np.float64))[0])


def speaking_flags(frames: FrameArrays, net: TemporalCnn, config: PipelineConfig) -> np.ndarray:
    """Per-frame speaking flags; unscored frames inherit the nearest scored
    frame's flag (earlier frame on ties), all-false when nothing scored."""
    if net is None:
        raise MissingArtifactError("speaking CNN is not loaded")
    series = build_windows(frames, config)
    n = len(frames)
    flags = np.zeros(n, dtype=bool)
    scored_idx = np.flatnonzero(series.scored)
    if scored_idx.size == 0:
        return flags
    probs = net.predict_proba(series.windows[scored_idx])
    flags[scored_idx] = probs >= config.speaking_threshold
    unscored = np.flatnonzero(~series.scored)
    if unscored.size:
        pos = np.searchsorted(scored_idx, unscored)
        left = np.clip(pos - 1, 0, scored_idx.size - 1)
        right = np.clip(pos, 0, scored_idx.size - 1)
        dl = np.abs(unscored - scored_idx[left])
        dr = np.abs(scored_idx[right] - unscored)
        nearest = np.where(dl <= dr, scored_idx[left], scored_idx[right])
        flags[unscored] = flags[nearest]
    return flags


def speaking_events(
    flags: np.ndarray, frame_rate_hz: float, min_event_s: float = PipelineConfig().speaking_min_event_s
) -> list[Event]:
    """Maximal speaking runs; distracting iff strictly longer than 1 s."""
    return events_from_flags(flags, frame_rate_hz, min_event_s)


def assemble_training_windows(
    frames: FrameArrays,
    speak_active: np.ndarray,
    config: PipelineConfig,
    stride: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Extract (windows, labels) pairs for CNN training from one session.

    ``speak_active`` is the per-frame ground-truth speech activity. Only
    scored windows are kept; the label is the center frame's activity.
    """
    if len(speak_active) != len(frames):
        raise DataError("speak_active length does not match session")
    series = build_windows(frames, config)
    idx = np.flatnonzero(series.scored)[::stride]
    return series.windows[idx], np.asarray(speak_active, dtype=np.float64)[idx]
