"""Offline attention scoring for ad-viewing sessions.

Consumes per-frame facial feature streams (gaze rays, head pose, mouth
landmarks, action units, face flags) and emits per-frame attentive /
inattentive labels with per-distractor attribution: off-screen gaze (eye or
head model), speaking, drowsiness, and unattended screen. Ships with a
seeded synthetic-session generator that doubles as the verification oracle.
"""

from .boosting import BoostConfig, BoostedEnsemble, fit_boosted, predict_boosted
from .cnn import CnnTrainConfig, TemporalCnn, gradient_check, train_cnn
from .config import PipelineConfig, load_config
from .errors import (
    AdwatchError,
    ConfigError,
    DataError,
    MissingArtifactError,
    SessionFormatError,
    SessionUntrackableError,
)
from .evaluation import ClassificationReport, frame_metrics, macro_f1, roc_auc, run_ablation
from .fusion import (
    SIGNAL_NAMES,
    DistractionTimeline,
    fuse,
    session_summary,
    unattended_signal,
)
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
)
from .geometry import PlaneIntersection, RayStatus, ScreenPoint, intersect_gaze
from .head import GazeSource, HeadPoseStats, compute_head_stats, head_off_screen, select_gaze_source
from .pipeline import ArtifactSet, PipelineVariant, score_session
from .records import AU_NAMES, FrameArrays, FrameRecord, SessionManifest
from .session_io import (
    load_frames,
    load_manifest,
    load_session,
    read_timeline,
    write_frames,
    write_manifest,
    write_timeline,
)
from .synth import ScenarioScript, Segment, SuiteConfig, generate, generate_suite

__version__ = "0.1.0"
