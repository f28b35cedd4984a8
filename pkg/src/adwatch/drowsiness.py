"""Drowsiness detection: prolonged eye closure and yawning.

Eye closure is refined by excluding frames that coincide with smiling
(AU12) or cheek raising (AU6) so laughter and flinching do not read as
sleepiness; only closure runs strictly longer than two seconds count, which
keeps blinks out. Yawning is scored per frame by a boosted classifier over
the mouth aspect ratio and the 20 AU intensities, then majority-smoothed
over half a second. Either signal marks the frame drowsy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boosting import BoostedEnsemble
from .config import PipelineConfig
from .errors import DataError, MissingArtifactError
from .records import (
    AU_INDEX,
    MOUTH_LEFT_CORNER,
    MOUTH_LOWER_INNER,
    MOUTH_RIGHT_CORNER,
    MOUTH_UPPER_INNER,
    FrameArrays,
)
from .temporal import Event, distracting_mask, events_from_flags

_WIDTH_EPS = 1e-9


@dataclass(frozen=True)
class MouthAspect:
    ratio: float
    valid: bool


def mouth_aspect_ratio(mouth_points: np.ndarray) -> MouthAspect:
    """Mouth height over width; degenerate widths yield an invalid sample."""
    pts = np.asarray(mouth_points, dtype=np.float64)
    height = float(np.linalg.norm(pts[MOUTH_UPPER_INNER] - pts[MOUTH_LOWER_INNER]))
    width = float(np.linalg.norm(pts[MOUTH_LEFT_CORNER] - pts[MOUTH_RIGHT_CORNER]))
    if width < _WIDTH_EPS:
        return MouthAspect(ratio=0.0, valid=False)
    return MouthAspect(ratio=height / width, valid=True)


def mouth_aspect_series(frames: FrameArrays) -> tuple[np.ndarray, np.ndarray]:
    """(ratios, valid) arrays for a whole session."""
    pts = frames.mouth
    heights = np.linalg.norm(pts[:, MOUTH_UPPER_INNER] - pts[:, MOUTH_LOWER_INNER], axis=1)
    widths = np.linalg.norm(pts[:, MOUTH_LEFT_CORNER] - pts[:, MOUTH_RIGHT_CORNER], axis=1)
    valid = widths >= _WIDTH_EPS
    ratios = np.zeros(len(pts))
    ratios[valid] = heights[valid] / widths[valid]
    return ratios, valid


def refined_eye_closure(
    eye_closure: np.ndarray,
    aus: np.ndarray,
    config: PipelineConfig,
) -> np.ndarray:
    """Closure flag with the AU12/AU6 exclusion applied."""
    closure = np.asarray(eye_closure, dtype=np.float64) >= config.closure_gate
    au12 = aus[..., AU_INDEX["AU12"]] < config.au_gate
    au6 = aus[..., AU_INDEX["AU6"]] < config.au_gate
    return closure & au12 & au6


def closure_events(
    flags: np.ndarray, frame_rate_hz: float, min_event_s: float = PipelineConfig().closure_min_event_s
) -> list[Event]:
    """Maximal closure runs; distracting iff strictly longer than 2 s."""
    return events_from_flags(flags, frame_rate_hz, min_event_s)


def yawn_features(frames: FrameArrays) -> np.ndarray:
    """21-dim feature rows: mouth aspect ratio followed by the 20 AUs."""
    ratios, _ = mouth_aspect_series(frames)
    return np.concatenate([ratios[:, None], frames.aus], axis=1)


def yawn_probability(features: np.ndarray, model: Optional[BoostedEnsemble]) -> np.ndarray:
    if model is None:
        raise MissingArtifactError("yawn classifier is not loaded")
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    if single:
        features = features[None, :]
    if features.shape[1] != model.n_features:
        raise DataError(
            f"yawn features must be {model.n_features}-dimensional, got {features.shape[1]}"
        )
    probs = model.predict(features)
    return float(probs[0]) if single else probs


def smooth_flags(flags: np.ndarray, frame_rate_hz: float, span_s: float) -> np.ndarray:
    """Centered majority vote over ``span_s`` seconds."""
    flags = np.asarray(flags, dtype=bool)
    w = int(round(span_s * frame_rate_hz))
    if w <= 1:
        return flags.copy()
    if w % 2 == 0:
        w += 1
    counts = np.convolve(flags.astype(np.int64), np.ones(w, dtype=np.int64), mode="same")
    # edge windows are truncated; majority is over the actual window size
    sizes = np.convolve(np.ones(len(flags), dtype=np.int64), np.ones(w, dtype=np.int64), mode="same")
    return counts * 2 > sizes


def yawn_flags(
    frames: FrameArrays, model: Optional[BoostedEnsemble], config: PipelineConfig, frame_rate_hz: float
) -> np.ndarray:
    """Smoothed per-frame yawn flags; untracked frames never flag."""
    feats = yawn_features(frames)
    probs = yawn_probability(feats, model)
    raw = (probs >= config.yawn_threshold) & frames.face_expr
    return smooth_flags(raw, frame_rate_hz, config.yawn_smooth_s) & frames.face_expr


def drowsiness_signal(
    closure_evs: list[Event], yawns: np.ndarray, n_frames: int
) -> np.ndarray:
    """OR of distracting closure events and yawn flags."""
    if len(yawns) != n_frames:
        raise DataError("yawn flags length does not match session")
    return distracting_mask(closure_evs, n_frames) | np.asarray(yawns, dtype=bool)
