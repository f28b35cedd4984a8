"""Run-length event extraction shared by the per-signal duration rules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Event:
    """A maximal run of consecutive active frames.

    ``end_frame`` is inclusive. Duration counts whole frame periods, so a run
    of n frames at rate r lasts n/r seconds.
    """

    start_frame: int
    end_frame: int
    duration_s: float
    distracting: bool

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame + 1


def find_runs(flags: np.ndarray) -> list[tuple[int, int]]:
    """Return (start, end_inclusive) index pairs of maximal True runs."""
    flags = np.asarray(flags, dtype=bool)
    if flags.size == 0:
        return []
    padded = np.concatenate(([False], flags, [False]))
    diff = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(diff == 1)
    ends = np.flatnonzero(diff == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def events_from_flags(
    flags: np.ndarray, frame_rate_hz: float, min_duration_s: float
) -> list[Event]:
    """Turn per-frame flags into events; distracting iff strictly longer
    than ``min_duration_s``."""
    if frame_rate_hz <= 0:
        raise ValueError(f"frame_rate_hz must be positive, got {frame_rate_hz}")
    events = []
    for start, end in find_runs(flags):
        n = end - start + 1
        duration = n / frame_rate_hz
        events.append(
            Event(
                start_frame=start,
                end_frame=end,
                duration_s=duration,
                distracting=duration > min_duration_s,
            )
        )
    return events


def distracting_mask(events: list[Event], n_frames: int) -> np.ndarray:
    """Per-frame boolean mask of frames inside distracting events."""
    mask = np.zeros(n_frames, dtype=bool)
    for ev in events:
        if ev.distracting:
            mask[ev.start_frame : ev.end_frame + 1] = True
    return mask
