"""End-to-end per-session scoring.

Chains the detectors over one session: gaze stats, orientation and screen
geometry, the per-frame eye-vs-head source switch, the speaking, drowsiness
and unattended signals, and the final fusion. A ``PipelineVariant`` switches
individual processing steps or signals off, which is how the ablation
harness removes one step at a time while everything else stays identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import artifacts as artifacts_io
from .boosting import BoostedEnsemble
from .cnn import TemporalCnn
from .config import PipelineConfig
from .drowsiness import (
    closure_events,
    drowsiness_signal,
    refined_eye_closure,
    yawn_flags,
)
from .errors import MissingArtifactError, SessionUntrackableError
from .fusion import DistractionTimeline, fuse, unattended_signal
from .gaze import (
    Orientation,
    ScreenGeometry,
    SessionGazeStats,
    compute_session_stats,
    detect_orientation,
    estimate_screen,
    fine_tune,
    gaze_on_screen,
    normalize_gaze,
    valid_gaze_mask,
)
from .geometry import intersect_gaze_batch
from .head import compute_head_stats, head_off_screen, select_gaze_source
from .records import FrameArrays, SessionManifest
from .speaking import speaking_events, speaking_flags
from .temporal import distracting_mask

PathLike = Union[str, Path]

GAZE_ARTIFACT = "gaze_regressors.json"
SPEAKING_ARTIFACT = "speaking_cnn.json"
YAWN_ARTIFACT = "yawn_classifier.json"


@dataclass
class ArtifactSet:
    gaze: Optional[dict[str, dict[str, BoostedEnsemble]]] = None
    speaking: Optional[TemporalCnn] = None
    yawn: Optional[BoostedEnsemble] = None

    @classmethod
    def load(cls, artifact_dir: PathLike) -> "ArtifactSet":
        artifact_dir = Path(artifact_dir)
        missing = [
            name
            for name in (GAZE_ARTIFACT, SPEAKING_ARTIFACT, YAWN_ARTIFACT)
            if not (artifact_dir / name).exists()
        ]
        if missing:
            raise MissingArtifactError(
                f"missing model artifacts in {artifact_dir}: {', '.join(missing)}"
            )
        return cls(
            gaze=artifacts_io.load_gaze_regressors(artifact_dir / GAZE_ARTIFACT),
            speaking=artifacts_io.load_speaking_cnn(artifact_dir / SPEAKING_ARTIFACT),
            yawn=artifacts_io.load_yawn_classifier(artifact_dir / YAWN_ARTIFACT),
        )

    def gaze_pair(self, device_type: str) -> dict[str, BoostedEnsemble]:
        if self.gaze is None or device_type not in self.gaze:
            raise MissingArtifactError(
                f"no gaze regressors for device type {device_type!r}"
            )
        return self.gaze[device_type]


@dataclass(frozen=True)
class PipelineVariant:
    """Feature switches for ablation runs; the default is the full model."""

    name: str = "full"
    normalize: bool = True
    fine_tune: bool = True
    screen_size: bool = True
    use_gaze: bool = True
    use_head: bool = True
    use_speaking: bool = True
    use_drowsiness: bool = True
    use_unattended: bool = True


FULL_VARIANT = PipelineVariant()

TABLE1_VARIANTS = (
    PipelineVariant(name="w/o normalization", normalize=False),
    PipelineVariant(name="w/o fine-tuning", fine_tune=False),
    PipelineVariant(name="w/o screen size detection", screen_size=False),
    PipelineVariant(name="full model"),
)

TABLE3_VARIANTS = (
    PipelineVariant(
        name="head model only",
        use_gaze=False, use_speaking=False, use_drowsiness=False, use_unattended=False,
    ),
    PipelineVariant(
        name="+ gaze model",
        use_speaking=False, use_drowsiness=False, use_unattended=False,
    ),
    PipelineVariant(name="+ drowsiness", use_speaking=False, use_unattended=False),
    PipelineVariant(name="+ speaking", use_unattended=False),
    PipelineVariant(name="+ unattended screen (all)"),
)


@dataclass
class ScoredSession:
    timeline: DistractionTimeline
    orientation: Orientation
    screen: Optional[ScreenGeometry] = None
    stats: Optional[SessionGazeStats] = None


def score_session(
    frames: FrameArrays,
    manifest: SessionManifest,
    artifacts: ArtifactSet,
    config: PipelineConfig = PipelineConfig(),
    variant: PipelineVariant = FULL_VARIANT,
) -> ScoredSession:
    n = len(frames)
    fps = manifest.frame_rate_hz
    gaze_eye = np.zeros(n, dtype=bool)
    gaze_head = np.zeros(n, dtype=bool)
    speaking = np.zeros(n, dtype=bool)
    drowsy = np.zeros(n, dtype=bool)

    stats = None
    orientation = Orientation.CENTERED
    screen = None
    eye_path = np.zeros(n, dtype=bool)

    if variant.use_gaze:
        try:
            stats = compute_session_stats(frames, config.quality_floor)
        except SessionUntrackableError:
            stats = None
        if stats is not None:
            if manifest.device_type == "mobile":
                orientation = detect_orientation(stats, config)
            screen = estimate_screen(
                stats,
                manifest.device_type,
                config,
                orientation=orientation,
                override_cm=manifest.screen_override_cm,
                use_size_detection=variant.screen_size,
            )
            eye_path = select_gaze_source(frames.quality, frames.face_gaze, config.quality_gate)
            # below the stats floor the ray is too unreliable even for the eye path
            eye_path &= valid_gaze_mask(frames, config.quality_floor)
            if np.any(eye_path):
                points, _, toward, _ = intersect_gaze_batch(
                    frames.pupil[eye_path], frames.direction[eye_path]
                )
                finite = np.all(np.isfinite(points), axis=1)
                pts = points.copy()
                if variant.normalize:
                    pts[finite] = normalize_gaze(pts[finite], stats)
                if variant.fine_tune:
                    pair = artifacts.gaze_pair(manifest.device_type)
                    pts[finite] = fine_tune(pts[finite], pair)
                on = gaze_on_screen(pts, toward, screen)
                gaze_eye[eye_path] = ~on

    if variant.use_head:
        try:
            head_stats = compute_head_stats(frames)
        except SessionUntrackableError:
            head_stats = None
        if head_stats is not None:
            head_candidates = frames.face_expr & ~eye_path
            if np.any(head_candidates):
                off = head_off_screen(
                    frames.yaw[head_candidates],
                    frames.pitch[head_candidates],
                    head_stats,
                    config,
                )
                gaze_head[head_candidates] = off

    if variant.use_speaking:
        if artifacts.speaking is None:
            raise MissingArtifactError("speaking CNN is not loaded")
        flags = speaking_flags(frames, artifacts.speaking, config)
        events = speaking_events(flags, fps, config.speaking_min_event_s)
        speaking = distracting_mask(events, n)

    if variant.use_drowsiness:
        if artifacts.yawn is None:
            raise MissingArtifactError("yawn classifier is not loaded")
        closure = refined_eye_closure(frames.eye_closure, frames.aus, config) & frames.face_expr
        events = closure_events(closure, fps, config.closure_min_event_s)
        yawns = yawn_flags(frames, artifacts.yawn, config, fps)
        drowsy = drowsiness_signal(events, yawns, n)

    unattended = np.zeros(n, dtype=bool)
    if variant.use_unattended:
        unattended = unattended_signal(
            ~frames.face_expr, ~frames.face_gaze, fps, config.unattended_min_s
        )

    timeline = fuse(
        gaze_eye, gaze_head, speaking, drowsy, unattended, frame_index=frames.frame_index
    )
    return ScoredSession(timeline=timeline, orientation=orientation, screen=screen, stats=stats)
