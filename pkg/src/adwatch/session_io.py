"""Readers and writers for all on-disk formats.

Formats are line-delimited JSON (frames, timelines) or a single JSON
document (manifests). Field names match the data model exactly; see
FORMATS.md for the full schemas. Numbers are emitted with ``repr``
round-tripping semantics, so write-then-read is the identity.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataError, SessionFormatError
from .fusion import SIGNAL_NAMES, DistractionTimeline
from .records import FrameRecord, SessionManifest, validate_frame

PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# frame files
# ---------------------------------------------------------------------------

def write_frames(frames: Sequence[FrameRecord], path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in frames:
            fh.write(json.dumps({
                "frame_index": rec.frame_index,
                "timestamp_ms": rec.timestamp_ms,
                "pupil_position_cm": list(rec.pupil_position_cm),
                "gaze_direction": list(rec.gaze_direction),
                "gaze_quality": rec.gaze_quality,
                "head_yaw_deg": rec.head_yaw_deg,
                "head_pitch_deg": rec.head_pitch_deg,
                "head_roll_deg": rec.head_roll_deg,
                "mouth_points": [list(p) for p in rec.mouth_points],
                "au_intensities": list(rec.au_intensities),
                "eye_closure": rec.eye_closure,
                "face_detected_expr": rec.face_detected_expr,
                "face_detected_gaze": rec.face_detected_gaze,
                "face_center_x": rec.face_center_x,
            }, separators=(",", ":")))
            fh.write("\n")


def _parse_frame_row(obj: dict, row: int) -> FrameRecord:
    try:
        rec = FrameRecord(
            frame_index=int(obj["frame_index"]),
            timestamp_ms=float(obj["timestamp_ms"]),
            pupil_position_cm=tuple(float(v) for v in obj["pupil_position_cm"]),
            gaze_direction=tuple(float(v) for v in obj["gaze_direction"]),
            gaze_quality=float(obj["gaze_quality"]),
            head_yaw_deg=float(obj["head_yaw_deg"]),
            head_pitch_deg=float(obj["head_pitch_deg"]),
            head_roll_deg=float(obj["head_roll_deg"]),
            mouth_points=tuple(
                (float(p[0]), float(p[1])) for p in obj["mouth_points"]
            ),
            au_intensities=tuple(float(v) for v in obj["au_intensities"]),
            eye_closure=float(obj["eye_closure"]),
            face_detected_expr=bool(obj["face_detected_expr"]),
            face_detected_gaze=bool(obj["face_detected_gaze"]),
            face_center_x=float(obj["face_center_x"]),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SessionFormatError(f"row {row}: malformed frame record ({exc})") from exc
    validate_frame(rec, row=row)
    return rec


def load_frames(path: PathLike) -> list[FrameRecord]:
    """Read a frame file; rows are validated, never clamped."""
    path = Path(path)
    if not path.exists():
        raise SessionFormatError(f"frame file not found: {path}")
    frames: list[FrameRecord] = []
    last_ts = -np.inf
    with open(path, "r", encoding="utf-8") as fh:
        for row, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SessionFormatError(f"row {row}: invalid JSON ({exc.msg})") from exc
            rec = _parse_frame_row(obj, row)
            if rec.timestamp_ms <= last_ts:
                raise SessionFormatError(
                    f"row {row}: timestamp_ms {rec.timestamp_ms} not strictly "
                    f"increasing (previous {last_ts})"
                )
            last_ts = rec.timestamp_ms
            frames.append(rec)
    if not frames:
        raise SessionFormatError(f"empty session: {path}")
    frames.sort(key=lambda r: r.frame_index)
    return frames


def load_session(manifest: SessionManifest, base_dir: Optional[PathLike] = None) -> list[FrameRecord]:
    """Load the frame stream referenced by ``manifest``.

    Relative frame paths resolve against ``base_dir`` (the manifest's
    directory when the manifest was loaded from disk).
    """
    src = Path(manifest.frame_source)
    if not src.is_absolute() and base_dir is not None:
        src = Path(base_dir) / src
    return load_frames(src)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def write_manifest(manifest: SessionManifest, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "session_id": manifest.session_id,
        "device_type": manifest.device_type,
        "frame_rate_hz": manifest.frame_rate_hz,
        "frame_source": manifest.frame_source,
    }
    if manifest.ground_truth is not None:
        doc["ground_truth"] = manifest.ground_truth
    if manifest.screen_override_cm is not None:
        doc["screen_override_cm"] = list(manifest.screen_override_cm)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_manifest(path: PathLike) -> SessionManifest:
    path = Path(path)
    if not path.exists():
        raise SessionFormatError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SessionFormatError(f"manifest {path}: invalid JSON ({exc.msg})") from exc
    try:
        override = doc.get("screen_override_cm")
        return SessionManifest(
            session_id=str(doc["session_id"]),
            device_type=str(doc["device_type"]),
            frame_rate_hz=float(doc["frame_rate_hz"]),
            frame_source=str(doc["frame_source"]),
            ground_truth=doc.get("ground_truth"),
            screen_override_cm=tuple(float(v) for v in override) if override else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionFormatError(f"manifest {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# timelines
# ---------------------------------------------------------------------------

def write_timeline(timeline: DistractionTimeline, path: PathLike) -> None:
    """One line per frame: index, attentive flag, signal mask, active names."""
    if len(timeline) == 0:
        raise DataError("refusing to write a 0-length timeline")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(timeline)):
            row = {
                "frame_index": int(timeline.frame_index[i]),
                "attentive": bool(timeline.attentive[i]),
                "mask": int(timeline.mask[i]),
                "sources": timeline.active_names(i),
            }
            if timeline.activity is not None:
                row["activity"] = timeline.activity[i]
            if timeline.target_cm is not None:
                tgt = timeline.target_cm[i]
                row["target_cm"] = list(tgt) if tgt is not None else None
            fh.write(json.dumps(row, separators=(",", ":")))
            fh.write("\n")


def read_timeline(path: PathLike) -> DistractionTimeline:
    path = Path(path)
    if not path.exists():
        raise DataError(f"timeline not found: {path}")
    indices, masks, activities, targets = [], [], [], []
    has_activity = False
    has_targets = False
    with open(path, "r", encoding="utf-8") as fh:
        for row, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                idx = int(obj["frame_index"])
                mask = int(obj["mask"])
                attentive = bool(obj["attentive"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"timeline {path} row {row}: {exc}") from exc
            if not 0 <= mask < (1 << len(SIGNAL_NAMES)):
                raise DataError(f"timeline {path} row {row}: mask {mask} out of range")
            if attentive != (mask == 0):
                raise DataError(
                    f"timeline {path} row {row}: attentive flag inconsistent with mask"
                )
            indices.append(idx)
            masks.append(mask)
            if "activity" in obj:
                has_activity = True
            activities.append(obj.get("activity"))
            tgt = obj.get("target_cm")
            if tgt is not None:
                has_targets = True
                targets.append((float(tgt[0]), float(tgt[1])))
            else:
                targets.append(None)
    if not indices:
        raise DataError(f"empty timeline: {path}")
    mask_arr = np.array(masks, dtype=np.uint8)
    signals = np.zeros((len(masks), len(SIGNAL_NAMES)), dtype=bool)
    for b in range(len(SIGNAL_NAMES)):
        signals[:, b] = (mask_arr >> b) & 1
    return DistractionTimeline(
        signals=signals,
        attentive=mask_arr == 0,
        mask=mask_arr,
        frame_index=np.array(indices, dtype=np.int64),
        activity=activities if has_activity else None,
        target_cm=targets if has_targets else None,
    )
