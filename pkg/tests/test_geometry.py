import numpy as np
import pytest

from adwatch.geometry import (
    RayStatus,
    intersect_gaze,
    intersect_gaze_batch,
)

from oracles import line_sampling_intersection


def test_head_on_ray():
    hit = intersect_gaze((0, 0, 60), (0, 0, -1))
    assert hit.status is RayStatus.TOWARD_PLANE
    assert hit.t == pytest.approx(60.0)
    assert (hit.point.x_s, hit.point.y_s) == pytest.approx((0.0, 0.0))


def test_translated_head_on_ray():
    hit = intersect_gaze((5, 2, 60), (0, 0, -1))
    assert hit.t == pytest.approx(60.0)
    assert (hit.point.x_s, hit.point.y_s) == pytest.approx((5.0, 2.0))


def test_oblique_ray_matches_line_sampling_oracle():
    # expected point computed with the independent line-sampling oracle
    x, y, t, status = line_sampling_intersection((0, 0, 60), (0.1, 0, -1))
    assert (x, y) == pytest.approx((6.0, 0.0), abs=1e-9)
    hit = intersect_gaze((0, 0, 60), (0.1, 0, -1))
    assert hit.point.x_s == pytest.approx(x, abs=1e-9)
    assert hit.point.y_s == pytest.approx(y, abs=1e-9)
    assert hit.t == pytest.approx(t, rel=1e-9)
    assert hit.status.value == status


def test_parallel_ray():
    hit = intersect_gaze((0, 0, 60), (1, 0, 0))
    assert hit.status is RayStatus.PARALLEL
    assert np.isnan(hit.t)


def test_away_from_plane():
    hit = intersect_gaze((0, 0, 60), (0, 0, 1))
    assert hit.status is RayStatus.AWAY_FROM_PLANE
    assert hit.t == pytest.approx(-60.0)


def test_zero_direction_rejected():
    with pytest.raises(ValueError):
        intersect_gaze((0, 0, 60), (0, 0, 0))


def test_nonpositive_pupil_z_rejected():
    with pytest.raises(ValueError):
        intersect_gaze((0, 0, -1), (0, 0, -1))


def test_residual_z_below_1e9_cm():
    rng = np.random.default_rng(42)
    for _ in range(500):
        pupil = rng.uniform([-20, -20, 20], [20, 20, 120])
        direction = rng.normal(0, 1, 3)
        if abs(direction[2]) / np.linalg.norm(direction) < 1e-5:
            continue
        hit = intersect_gaze(pupil, direction)
        residual = pupil[2] + direction[2] * hit.t
        assert abs(residual) <= 1e-9


def test_positive_scaling_invariance():
    rng = np.random.default_rng(7)
    for _ in range(200):
        pupil = rng.uniform([-20, -20, 20], [20, 20, 120])
        direction = rng.normal(0, 1, 3)
        lam = rng.uniform(0.01, 100)
        a = intersect_gaze(pupil, direction)
        b = intersect_gaze(pupil, direction * lam)
        assert a.status is b.status
        if a.status is not RayStatus.PARALLEL:
            assert b.point.x_s == pytest.approx(a.point.x_s, rel=1e-9, abs=1e-9)
            assert b.point.y_s == pytest.approx(a.point.y_s, rel=1e-9, abs=1e-9)
            assert b.t == pytest.approx(a.t / lam, rel=1e-9)


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    pupils = rng.uniform([-10, -10, 30], [10, 10, 90], (300, 3))
    dirs = rng.normal(0, 1, (300, 3))
    points, ts, toward, parallel = intersect_gaze_batch(pupils, dirs)
    for i in range(300):
        hit = intersect_gaze(pupils[i], dirs[i])
        if hit.status is RayStatus.PARALLEL:
            assert parallel[i]
            continue
        assert points[i, 0] == pytest.approx(hit.point.x_s)
        assert points[i, 1] == pytest.approx(hit.point.y_s)
        assert toward[i] == (hit.status is RayStatus.TOWARD_PLANE)


def test_oracle_equivalence_sample():
    rng = np.random.default_rng(1234)
    for _ in range(500):
        pupil = rng.uniform([-15, -15, 25], [15, 15, 100])
        direction = rng.normal(0, 1, 3)
        direction[2] = -abs(direction[2]) - 0.05
        hit = intersect_gaze(pupil, direction)
        x, y, _, status = line_sampling_intersection(pupil, direction)
        assert status == hit.status.value
        assert abs(hit.point.x_s - x) <= 1e-6
        assert abs(hit.point.y_s - y) <= 1e-6
