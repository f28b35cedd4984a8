import numpy as np
import pytest

from adwatch.temporal import distracting_mask, events_from_flags, find_runs


def test_find_runs_basic():
    flags = np.array([0, 1, 1, 0, 1, 0, 0, 1, 1, 1], dtype=bool)
    assert find_runs(flags) == [(1, 2), (4, 4), (7, 9)]


def test_find_runs_edges():
    assert find_runs(np.array([], dtype=bool)) == []
    assert find_runs(np.ones(3, dtype=bool)) == [(0, 2)]
    assert find_runs(np.zeros(3, dtype=bool)) == []


def test_event_duration_counts_whole_frames():
    flags = np.zeros(100, dtype=bool)
    flags[10:40] = True   # 30 frames at 30 fps = exactly 1.0 s
    events = events_from_flags(flags, 30.0, 1.0)
    assert len(events) == 1
    assert events[0].duration_s == pytest.approx(1.0)
    assert not events[0].distracting
    flags[40] = True      # 31 frames: strictly over
    events = events_from_flags(flags, 30.0, 1.0)
    assert events[0].distracting


def test_events_partition_flags():
    rng = np.random.default_rng(0)
    for _ in range(50):
        flags = rng.uniform(size=int(rng.integers(1, 300))) < 0.4
        events = events_from_flags(flags, 30.0, 1.0)
        covered = np.zeros(len(flags), dtype=bool)
        for ev in events:
            assert not covered[ev.start_frame : ev.end_frame + 1].any()
            covered[ev.start_frame : ev.end_frame + 1] = True
        assert np.array_equal(covered, flags)
        total = sum(ev.n_frames for ev in events)
        assert total == int(np.count_nonzero(flags))


def test_distracting_mask_covers_only_long_events():
    flags = np.zeros(200, dtype=bool)
    flags[0:10] = True      # 1/3 s
    flags[50:120] = True    # 70 frames > 2 s
    events = events_from_flags(flags, 30.0, 2.0)
    mask = distracting_mask(events, 200)
    assert not mask[0:10].any()
    assert mask[50:120].all()
    assert np.count_nonzero(mask) == 70


def test_bad_frame_rate_rejected():
    with pytest.raises(ValueError):
        events_from_flags(np.ones(3, dtype=bool), 0.0, 1.0)
