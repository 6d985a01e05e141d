import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from scopevis.errors import EmptyInputError, InputError
from scopevis.frame_io import ClipHeader, PixelFormat
from scopevis.kinematics import (
    KinematicSeries, MetricsConfig, apply_shift, derive_series, detect_shots, shot_flags,
    stabilization_offsets, window_samples, window_stats,
)
from scopevis.tracker import TrackPoint, TrackStatus

HEADER = ClipHeader(64, 48, 30, 1, PixelFormat.GRAY8)


def track_from(xs, ys, status=None):
    status = status or [TrackStatus.LOCKED] * len(xs)
    return [TrackPoint(i, (float(x), float(y)), 1.0, s) for i, (x, y, s) in enumerate(zip(xs, ys, status))]


def test_constant_center():
    tr = track_from([40.0] * 60, [20.0] * 60)
    s = derive_series(tr, HEADER)
    assert (s.vx == 0).all() and (s.vy == 0).all() and (s.amag == 0).all()
    assert (s.prec_w == 0).all()
    assert np.allclose(s.acc_w, s.r)
    assert s.dx[0] == 8.0 and s.dy[0] == -4.0 and s.r[0] == math.hypot(8, 4)


def test_linear_motion():
    xs = [2.0 * i for i in range(40)]
    s = derive_series(track_from(xs, [24.0] * 40), HEADER)
    assert s.speed[0] == 0
    assert np.allclose(s.speed[1:], 60.0)
    assert (s.amag[2:] == 0).all()
    assert s.amag[0] == s.amag[1] == 0


def test_sinusoid_peak_speed():
    A, f, fps = 20.0, 0.3, 30
    n = int(10 * fps)
    t = np.arange(n) / fps
    xs = 32 + A * np.sin(2 * np.pi * f * t)
    s = derive_series(track_from(xs, [24.0] * n), HEADER)
    expected = 2 * np.pi * f * A
    assert abs(s.speed.max() - expected) / expected <= 0.02


def test_empty_track():
    with pytest.raises(EmptyInputError):
        derive_series([], HEADER)


def test_aimpoint_and_mrad_scale():
    cfg = MetricsConfig(aimpoint=(10.0, 10.0), px_per_mrad=2.0)
    s = derive_series(track_from([14.0], [10.0]), HEADER, cfg)
    assert s.dx[0] == 2.0 and s.dy[0] == 0.0


def test_smoothing_reduces_jitter():
    rng = np.random.default_rng(0)
    xs = 32 + rng.normal(0, 1, 120)
    raw = derive_series(track_from(xs, [24.0] * 120), HEADER)
    smooth = derive_series(track_from(xs, [24.0] * 120), HEADER, MetricsConfig(smooth_alpha=0.3))
    assert smooth.speed[5:].mean() < raw.speed[5:].mean()
    # offsets are unsmoothed; smoothing only feeds the derivatives
    assert np.array_equal(smooth.dx, raw.dx)


def test_config_validation():
    with pytest.raises(InputError):
        MetricsConfig(window_s=0)
    with pytest.raises(InputError):
        MetricsConfig(smooth_alpha=0)
    with pytest.raises(InputError):
        MetricsConfig(recoil_threshold=-1)


def test_window_length():
    assert window_samples(1.0, 30) == 30
    assert window_samples(1.0, 29.97) == 30
    assert window_samples(0.01, 30) == 1


def test_window_stats_examples():
    dx = np.array([1.0, -1.0, 1.0, -1.0])
    dy = np.zeros(4)
    acc, prec = window_stats(dx, dy, np.abs(dx))
    assert acc == 1.0 and prec == 1.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=40), st.randoms())
def test_window_stats_order_invariant(points, rnd):
    pts = list(points)
    dx = np.array([p[0] for p in pts])
    dy = np.array([p[1] for p in pts])
    a = window_stats(dx, dy, np.hypot(dx, dy))
    rnd.shuffle(pts)
    dx2 = np.array([p[0] for p in pts])
    dy2 = np.array([p[1] for p in pts])
    b = window_stats(dx2, dy2, np.hypot(dx2, dy2))
    assert a == b


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=30))
@example([(0.0, 0.0), (0.0, 8.1e-171)])
@example([(0.0, 0.0)] * 29 + [(5e-324, 0.0)])
def test_precision_zero_iff_identical(points):
    dx = np.array([p[0] for p in points])
    dy = np.array([p[1] for p in points])
    _, prec = window_stats(dx, dy, np.hypot(dx, dy))
    identical = len(set(points)) == 1
    assert (prec == 0.0) == identical


def test_windowed_mean_offset():
    xs = list(range(10))
    s = derive_series(track_from([32 + x for x in xs], [24.0] * 10), ClipHeader(64, 48, 2, 1), MetricsConfig(window_s=1.0))
    mx, _ = s.windowed_mean_offset()
    # 2 fps, 1 s window -> mean of the last two samples
    assert mx[0] == 0.0 and mx[5] == 4.5
    assert np.array_equal(s.channel("mean_dx"), mx)


def test_series_row_access_and_from_samples():
    s = derive_series(track_from([30.0, 31.0, 33.0], [24.0] * 3), HEADER)
    row = s[2]
    assert row.frame_index == 2 and row.dx == 1.0 and row.vx == 60.0 and row.valid
    again = KinematicSeries.from_samples(list(s), s.fps)
    assert np.array_equal(again.amag, s.amag)


def recoil_track(n, shot_frames, amp=60.0, decay=0.4, fps=30, tremor=None):
    x = np.full(n, 32.0)
    y = np.full(n, 24.0)
    for f in shot_frames:
        k = np.arange(n - f)
        y[f:] += amp * np.exp(-k / (decay * fps))
    if tremor is not None:
        x += tremor[0]
        y += tremor[1]
    return track_from(x, y)


def test_detect_shots_on_injected_recoil():
    header = ClipHeader(640, 480, 30, 1)
    tr = recoil_track(300, [60, 150, 240])
    s = derive_series(tr, header)
    shots = detect_shots(s)
    assert [ev.frame_index for ev in shots] == [61, 151, 241]
    assert all(ev.peak_amag > 0 for ev in shots)
    assert shot_flags(s, shots).sum() == 3


def test_constant_position_no_shots():
    s = derive_series(track_from([32.0] * 50, [24.0] * 50), HEADER)
    assert detect_shots(s) == []


def test_detect_shots_refractory_and_threshold():
    header = ClipHeader(640, 480, 30, 1)
    s = derive_series(recoil_track(200, [60, 66]), header)
    # second kick 0.2 s after the first falls inside the default 0.5 s refractory period
    assert len(detect_shots(s, MetricsConfig(recoil_threshold=5000.0))) == 1
    assert detect_shots(s, MetricsConfig(recoil_threshold=1e9)) == []
    two = detect_shots(s, MetricsConfig(recoil_threshold=5000.0, refractory_s=0.1))
    assert [e.frame_index for e in two] == [61, 67]


def test_detect_shots_translation_invariant():
    rng = np.random.default_rng(3)
    tremor = (rng.normal(0, 1, 300), rng.normal(0, 1, 300))
    header = ClipHeader(640, 480, 30, 1)
    a = detect_shots(derive_series(recoil_track(300, [100, 200], tremor=tremor), header))
    shifted = [TrackPoint(p.frame_index, (p.x + 7.5, p.y - 3.25), p.score, p.status)
               for p in recoil_track(300, [100, 200], tremor=tremor)]
    b = detect_shots(derive_series(shifted, header))
    assert [e.frame_index for e in a] == [e.frame_index for e in b]


def test_lost_samples_do_not_trigger_shots():
    xs = [32.0] * 30 + [60.0] * 30
    status = [TrackStatus.LOCKED] * 20 + [TrackStatus.LOST] * 10 + [TrackStatus.REACQUIRED] + [TrackStatus.LOCKED] * 29
    s = derive_series(track_from(xs, [24.0] * 60, status), HEADER)
    assert not s.valid[25] and s.valid[30]
    assert detect_shots(s) == []


def test_too_short_for_shots():
    s = derive_series(track_from([1.0, 5.0], [1.0, 1.0]), HEADER)
    assert detect_shots(s) == []


def test_stabilization_examples():
    tr = track_from([32.0, 20.0, 20.4, 20.5], [24.0, 12.0, 12.6, 11.5])
    offs = stabilization_offsets(tr, HEADER)
    assert offs[0].shift == (0, 0)
    assert offs[1].shift == (12, 12)
    assert offs[2].shift == (12, 11)
    # halves round up
    assert offs[3].shift == (12, 13)


def test_stabilization_lost_reuses_previous():
    tr = track_from([20.0, 50.0, 21.0], [12.0, 40.0, 12.0],
                    [TrackStatus.LOCKED, TrackStatus.LOST, TrackStatus.REACQUIRED])
    offs = stabilization_offsets(tr, HEADER)
    assert offs[1].shift == offs[0].shift == (12, 12)
    assert offs[2].shift == (11, 12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 63.99), st.floats(0, 47.99))
def test_stabilized_center_within_half_pixel(x, y):
    (off,) = stabilization_offsets(track_from([x], [y]), HEADER)
    assert abs(x + off.shift[0] - 32) <= 0.5 and abs(y + off.shift[1] - 24) <= 0.5


def test_apply_shift():
    plane = np.arange(12, dtype=np.uint8).reshape(3, 4)
    out = apply_shift(plane, (1, -1), 99)
    assert out[0, 0] == 99 and out[0, 1] == plane[1, 0] and out[2, 3] == 99
    assert np.array_equal(apply_shift(plane, (0, 0), 0), plane)
    assert (apply_shift(plane, (10, 0), 7) == 7).all()



@pytest.mark.parametrize("rms", [1.5, 2.0, 3.0])
def test_auto_threshold_below_ten_times_tremor(rms):
    # synthetic markers sit on whole pixels, so the tracked path carries quantization noise
    # that inflates the MAD; for tremor of 1.5 px and up the threshold keeps clear of 10x rms
    from scopevis.kinematics import recoil_threshold
    from scopevis.synth import BreathingSpec, ScenarioSpec, ShotSpec, TremorSpec, synthesize
    from scopevis.tracker import track_sequence

    spec = ScenarioSpec(duration_s=6.0, fps=30, seed=21, noise_sigma=1.0, tremor=TremorSpec(rms_px=rms),
                        breathing=BreathingSpec(3.0), shots=(ShotSpec(t=2.0, recoil_px=10 * rms),))
    truth, clip, template = synthesize(spec)
    series = derive_series(track_sequence(clip, template), spec.header)
    thr_px = recoil_threshold(series.amag, MetricsConfig()) / spec.fps ** 2
    assert thr_px < 9 * rms
    found = [ev.frame_index for ev in detect_shots(series)]
    assert len(found) == 1 and abs(found[0] - truth.shot_frames[0]) <= 1
