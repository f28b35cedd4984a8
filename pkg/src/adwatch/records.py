"""Frame and session data model.

A session is a sequence of per-frame tracker outputs. Two upstream trackers
contribute to each frame: an expression tracker (head pose, mouth landmarks,
action units, eye closure, face box) and a gaze tracker (3-D pupil position,
3-D gaze direction, tracking quality). Frames where a tracker lost the face
keep their slot in the sequence with sentinel values and the corresponding
``face_detected_*`` flag cleared; downstream consumers must check the flags
instead of dropping rows, so that timeline indices stay aligned.

Units: pupil position in cm (camera at origin, X right, Y up, Z pointing
from the screen toward the participant, so on-screen gaze has a negative Z
direction component); angles in degrees; mouth landmarks in interocular
units; AU intensities and eye closure on a 0-100 scale.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .errors import SessionFormatError

# Fixed AU inventory; au_intensities is indexed by this list.
AU_NAMES = (
    "AU1", "AU2", "AU4", "AU5", "AU6", "AU7", "AU9", "AU10", "AU11", "AU12",
    "AU14", "AU15", "AU17", "AU20", "AU23", "AU24", "AU25", "AU26", "AU28",
    "AU43",
)
AU_INDEX = {name: i for i, name in enumerate(AU_NAMES)}

# mouth_points ordering
MOUTH_UPPER_INNER = 0
MOUTH_LOWER_INNER = 1
MOUTH_LEFT_CORNER = 2
MOUTH_RIGHT_CORNER = 3

DEVICE_TYPES = ("desktop", "mobile")


@dataclass(frozen=True)
class FrameRecord:
    """One tracker output frame."""

    frame_index: int
    timestamp_ms: float
    pupil_position_cm: tuple[float, float, float]
    gaze_direction: tuple[float, float, float]
    gaze_quality: float
    head_yaw_deg: float
    head_pitch_deg: float
    head_roll_deg: float
    mouth_points: tuple[tuple[float, float], ...]
    au_intensities: tuple[float, ...]
    eye_closure: float
    face_detected_expr: bool
    face_detected_gaze: bool
    face_center_x: float

    def au(self, name: str) -> float:
        return self.au_intensities[AU_INDEX[name]]


FRAME_FIELDS = tuple(f.name for f in fields(FrameRecord))


def validate_frame(rec: FrameRecord, row: Optional[int] = None) -> None:
    """Raise SessionFormatError if ``rec`` violates a range invariant.

    ``row`` is the 1-based source row for error messages.
    """
    where = f"row {row}: " if row is not None else ""

    def fail(msg: str) -> None:
        raise SessionFormatError(where + msg)

    if rec.frame_index < 0:
        fail(f"frame_index must be >= 0, got {rec.frame_index}")
    if not np.isfinite(rec.timestamp_ms) or rec.timestamp_ms < 0:
        fail(f"timestamp_ms must be a finite real >= 0, got {rec.timestamp_ms}")
    if len(rec.pupil_position_cm) != 3 or len(rec.gaze_direction) != 3:
        fail("pupil_position_cm and gaze_direction must be 3-vectors")
    if not all(np.isfinite(v) for v in rec.pupil_position_cm):
        fail("pupil_position_cm has non-finite components")
    if not all(np.isfinite(v) for v in rec.gaze_direction):
        fail("gaze_direction has non-finite components")
    if not 0.0 <= rec.gaze_quality <= 1.0:
        fail(f"gaze_quality outside [0, 1]: {rec.gaze_quality}")
    if rec.face_detected_gaze and rec.pupil_position_cm[2] <= 0.0:
        fail(f"pupil z must be > 0 on gaze-tracked frames, got {rec.pupil_position_cm[2]}")
    for ang in (rec.head_yaw_deg, rec.head_pitch_deg, rec.head_roll_deg):
        if not np.isfinite(ang):
            fail("head pose angles must be finite")
    if len(rec.mouth_points) != 4 or any(len(p) != 2 for p in rec.mouth_points):
        fail("mouth_points must be four 2-D points")
    if not all(np.isfinite(c) for p in rec.mouth_points for c in p):
        fail("mouth_points has non-finite coordinates")
    if len(rec.au_intensities) != len(AU_NAMES):
        fail(f"au_intensities must have {len(AU_NAMES)} entries, got {len(rec.au_intensities)}")
    for i, v in enumerate(rec.au_intensities):
        if not 0.0 <= v <= 100.0:
            fail(f"au_intensities[{i}] ({AU_NAMES[i]}) outside [0, 100]: {v}")
    if not 0.0 <= rec.eye_closure <= 100.0:
        fail(f"eye_closure outside [0, 100]: {rec.eye_closure}")
    if not 0.0 <= rec.face_center_x <= 1.0:
        fail(f"face_center_x outside [0, 1]: {rec.face_center_x}")


@dataclass(frozen=True)
class SessionManifest:
    """Session-level metadata pointing at the frame stream on disk."""

    session_id: str
    device_type: str
    frame_rate_hz: float
    frame_source: str
    ground_truth: Optional[str] = None
    screen_override_cm: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.device_type not in DEVICE_TYPES:
            raise SessionFormatError(
                f"device_type must be one of {DEVICE_TYPES}, got {self.device_type!r}"
            )
        if not 5.0 <= self.frame_rate_hz <= 120.0:
            raise SessionFormatError(
                f"frame_rate_hz must be in [5, 120], got {self.frame_rate_hz}"
            )
        if self.screen_override_cm is not None:
            w, h = self.screen_override_cm
            if not (w > 0 and h > 0):
                raise SessionFormatError("screen_override_cm must be positive")


class FrameArrays:
    """Columnar view of a frame sequence for vectorized processing.

    Arrays share index i with frame i; sentinel values on invalid frames are
    preserved, so every consumer must mask with the face flags.
    """

    def __init__(
        self,
        frame_index: np.ndarray,
        timestamp_ms: np.ndarray,
        pupil: np.ndarray,
        direction: np.ndarray,
        quality: np.ndarray,
        yaw: np.ndarray,
        pitch: np.ndarray,
        roll: np.ndarray,
        mouth: np.ndarray,
        aus: np.ndarray,
        eye_closure: np.ndarray,
        face_expr: np.ndarray,
        face_gaze: np.ndarray,
        face_center_x: np.ndarray,
    ):
        self.frame_index = frame_index
        self.timestamp_ms = timestamp_ms
        self.pupil = pupil            # (n, 3)
        self.direction = direction    # (n, 3)
        self.quality = quality
        self.yaw = yaw
        self.pitch = pitch
        self.roll = roll
        self.mouth = mouth            # (n, 4, 2)
        self.aus = aus                # (n, 20)
        self.eye_closure = eye_closure
        self.face_expr = face_expr
        self.face_gaze = face_gaze
        self.face_center_x = face_center_x

    def __len__(self) -> int:
        return len(self.frame_index)

    @classmethod
    def from_records(cls, frames: Sequence[FrameRecord]) -> "FrameArrays":
        n = len(frames)
        out = cls(
            frame_index=np.fromiter((f.frame_index for f in frames), dtype=np.int64, count=n),
            timestamp_ms=np.fromiter((f.timestamp_ms for f in frames), dtype=np.float64, count=n),
            pupil=np.array([f.pupil_position_cm for f in frames], dtype=np.float64).reshape(n, 3),
            direction=np.array([f.gaze_direction for f in frames], dtype=np.float64).reshape(n, 3),
            quality=np.fromiter((f.gaze_quality for f in frames), dtype=np.float64, count=n),
            yaw=np.fromiter((f.head_yaw_deg for f in frames), dtype=np.float64, count=n),
            pitch=np.fromiter((f.head_pitch_deg for f in frames), dtype=np.float64, count=n),
            roll=np.fromiter((f.head_roll_deg for f in frames), dtype=np.float64, count=n),
            mouth=np.array([f.mouth_points for f in frames], dtype=np.float64).reshape(n, 4, 2),
            aus=np.array([f.au_intensities for f in frames], dtype=np.float64).reshape(n, len(AU_NAMES)),
            eye_closure=np.fromiter((f.eye_closure for f in frames), dtype=np.float64, count=n),
            face_expr=np.fromiter((f.face_detected_expr for f in frames), dtype=bool, count=n),
            face_gaze=np.fromiter((f.face_detected_gaze for f in frames), dtype=bool, count=n),
            face_center_x=np.fromiter((f.face_center_x for f in frames), dtype=np.float64, count=n),
        )
        return out

    def to_records(self) -> list[FrameRecord]:
        recs = []
        for i in range(len(self)):
            recs.append(
                FrameRecord(
                    frame_index=int(self.frame_index[i]),
                    timestamp_ms=float(self.timestamp_ms[i]),
                    pupil_position_cm=tuple(float(v) for v in self.pupil[i]),
                    gaze_direction=tuple(float(v) for v in self.direction[i]),
                    gaze_quality=float(self.quality[i]),
                    head_yaw_deg=float(self.yaw[i]),
                    head_pitch_deg=float(self.pitch[i]),
                    head_roll_deg=float(self.roll[i]),
                    mouth_points=tuple(
                        (float(x), float(y)) for x, y in self.mouth[i]
                    ),
                    au_intensities=tuple(float(v) for v in self.aus[i]),
                    eye_closure=float(self.eye_closure[i]),
                    face_detected_expr=bool(self.face_expr[i]),
                    face_detected_gaze=bool(self.face_gaze[i]),
                    face_center_x=float(self.face_center_x[i]),
                )
            )
        return recs
