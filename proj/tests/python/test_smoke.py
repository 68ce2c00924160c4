"""Smoke tests for the pygaitkit bindings: one end-to-end pass per module."""

import math

import pytest

import pygaitkit as gk


def test_geometry_round_trip():
    calib = gk.default_calibration()
    assert calib.rig.baseline == pytest.approx(0.06)
    pt = gk.WorldPoint(0.05, -0.02, 0.65, gk.Frame.Camera)
    o1 = gk.project(calib.rig.P1, pt)
    o2 = gk.project(calib.rig.P2, pt)
    back = gk.triangulate(calib.rig, o1, o2)
    assert back.vec()[2] == pytest.approx(0.65, abs=1e-9)
    ground = gk.to_ground(back, calib.theta_rad)
    again = gk.ground_to_camera(ground, calib.theta_rad)
    assert again.x == pytest.approx(back.x, abs=1e-12)


def test_triangulate_raises_for_parallel_rays():
    calib = gk.default_calibration()
    center = gk.PixelPoint(calib.rig.K1.cx, calib.rig.K1.cy)
    with pytest.raises(gk.IllConditionedError):
        gk.triangulate(calib.rig, center, center)


def test_end_to_end_pipeline():
    cfg = gk.WalkerConfig()
    cfg.seed = 7
    trace = gk.simulate_walk(cfg)
    assert len(trace.footfalls) >= 8

    calib = gk.default_calibration()
    rig_cfg = gk.default_rig_config(calib.theta_rad, cfg.foot_length)
    log = gk.observe(trace, calib.rig, rig_cfg, gk.NoiseModel())
    report = gk.process(log, calib, rig_cfg, gk.SyncReport())
    assert report.missing_spatial == 0
    assert report.summary.n_steps == len(trace.footfalls)

    gk.attach_truth(report, trace.true_steps)
    assert len(report.accuracy) == len(gk.report_parameters()) == 17
    for entry in report.accuracy:
        assert entry.accuracy == pytest.approx(100.0, abs=1e-6)

    text = gk.report_json(report)
    assert '"n_steps"' in text


def test_temporal_worked_example():
    events = []
    times = {(gk.Foot.Left, 0.0), (gk.Foot.Right, 0.55), (gk.Foot.Left, 1.1), (gk.Foot.Right, 1.65)}
    for foot, t in sorted(times, key=lambda p: p[1]):
        events.append(gk.FootfallEvent(foot, gk.EventKind.HeelStrike, t))
        events.append(gk.FootfallEvent(foot, gk.EventKind.Lift, t + 0.6))
    result = gk.temporal_params(gk.canonicalize_events(events))
    l2 = result.steps[2]
    assert l2.stride_time == pytest.approx(1.1)
    assert l2.step_time == pytest.approx(0.55)
    assert l2.double_support == pytest.approx(0.55 - 0.5)


def test_sync_offset_recovery():
    clock = gk.ClockModel()
    clock.offset = 0.25
    est = gk.estimate_offset(clock, 64, 3)
    assert est.offset_estimate == pytest.approx(0.25, abs=1e-6)
    assert len(est.rtt_samples) == 64


def test_marker_detection():
    params = gk.MarkerRenderParams()
    params.center = gk.PixelPoint(60.5, 66.25)
    params.noise_sigma = 0.02
    params.seed = 5
    det = gk.detect_center(gk.render_marker(params))
    assert det.found
    assert det.center.u == pytest.approx(60.5, abs=1.0)
    assert det.center.v == pytest.approx(66.25, abs=1.0)


def test_ident_forward_shapes():
    cfg = gk.IdentConfig()
    cfg.d_model = 8
    cfg.n_heads = 2
    cfg.n_layers = 1
    cfg.d_ff = 16
    cfg.window = 16
    cfg.n_classes = 3
    cfg.dropout = 0.0
    model = gk.IdentModel(cfg, 11)

    seq = gk.GaitSequence()
    seq.label = 1
    import numpy as np

    seq.features = np.random.default_rng(0).normal(size=(12, 10))
    windows = gk.segment(seq, cfg.window)
    assert len(windows) == 1
    probs = model.forward(windows[0])
    assert len(probs) == 3
    assert math.isclose(sum(probs), 1.0, abs_tol=1e-9)
