import pytest

from adwatch.config import PipelineConfig
from adwatch.pipeline import ArtifactSet
from adwatch.records import SessionManifest
from adwatch.synth import SuiteConfig, build_suite_scripts, generate
from adwatch.training import (
    train_gaze_regressors,
    train_speaking_cnn,
    train_yawn_classifier,
)


def sessions_from_config(suite: SuiteConfig):
    """Generate a suite in memory as (frames, truth, manifest, split) tuples."""
    out = []
    for sid, script, split in build_suite_scripts(suite):
        frames, truth = generate(script)
        manifest = SessionManifest(
            session_id=sid,
            device_type=script.device_type,
            frame_rate_hz=script.frame_rate_hz,
            frame_source="frames.jsonl",
            ground_truth="truth.jsonl",
        )
        out.append((frames, truth, manifest, split))
    return out


@pytest.fixture(scope="session")
def config():
    return PipelineConfig()


@pytest.fixture(scope="session")
def mixed_suite():
    """16 mixed-device sessions with every distractor; first half is the
    training split. Yawn prevalence matches the production imbalance."""
    return sessions_from_config(
        SuiteConfig(seed=5, n_sessions=16, template="full", device="mixed",
                    train_fraction=0.5, yawn_prevalence=0.026)
    )


@pytest.fixture(scope="session")
def train_sessions(mixed_suite):
    return [(f, t, m) for f, t, m, s in mixed_suite if s == "train"]


@pytest.fixture(scope="session")
def heldout_sessions(mixed_suite):
    return [(f, t, m) for f, t, m, s in mixed_suite if s == "held_out"]


@pytest.fixture(scope="session")
def artifacts(train_sessions, config):
    """All three trained models, shared across the whole test run."""
    gaze, _ = train_gaze_regressors(train_sessions, config, seed=1)
    net, _ = train_speaking_cnn(train_sessions, config, seed=1)
    yawn, _ = train_yawn_classifier(train_sessions, config, seed=1)
    return ArtifactSet(gaze=gaze, speaking=net, yawn=yawn)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
