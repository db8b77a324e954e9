"""Smoke tests for the python module: the pipeline end to end plus a few
known-value checks. The heavy verification lives in the C++ suites."""

import json
import math

import pytest

import pairtrack as pt

SCENARIO = {
    "seq": "0000",
    "num_frames": 40,
    "frame_rate": 10.0,
    "rng_seed": 5,
    "vehicles": [
        {
            "center": [0, 0, 0.75],
            "dims": [1.5, 1.8, 4.2],
            "yaw": 0.0,
            "motion": {"type": "constant", "velocity": [8, 0, 0]},
        },
        {
            "center": [30, 10, 0.75],
            "dims": [1.6, 1.9, 4.5],
            "yaw": 0.5,
            "motion": {"type": "turn", "speed": 5, "yaw_rate": 0.2},
        },
    ],
}


def test_version():
    assert pt.__version__


def test_iou_known_value():
    a = pt.OrientedBox3D(pt.Vec3(0, 0, 0), 1.5, 2.0, 4.0, 0.0)
    b = pt.OrientedBox3D(pt.Vec3(2, 0, 0), 1.5, 2.0, 4.0, 0.0)
    assert pt.iou_3d(a, a) == pytest.approx(1.0)
    assert pt.iou_3d(a, b) == pytest.approx(1.0 / 3.0)


def test_transform_box_quarter_turn():
    box = pt.OrientedBox3D(pt.Vec3(1, 0, 0), 1.5, 1.8, 4.0, 0.0)
    pose = pt.EgoPose.planar(0.0, 0.0, 0.0, math.pi / 2)
    out = pt.transform_box(pose, box)
    assert out.center.x == pytest.approx(0.0)
    assert out.center.y == pytest.approx(1.0)
    assert out.yaw == pytest.approx(math.pi / 2)


def test_associate_prefers_total_iou():
    track = pt.OrientedBox3D(pt.Vec3(0, 0, 0), 1.5, 2.0, 4.0, 0.0)
    pair = pt.BoxPair(
        pt.OrientedBox3D(pt.Vec3(1, 0, 0), 1.5, 2.0, 4.0, 0.0), track, 0.9
    )
    result = pt.associate([pair], [track], threshold=0.5, method="optimal")
    assert len(result.matches) == 1
    assert result.matches[0].iou == pytest.approx(1.0)


def test_velocity_from_pair():
    cur = pt.OrientedBox3D(pt.Vec3(2, 0, 0), 1.5, 1.8, 4.2, 0.0)
    prev = pt.OrientedBox3D(pt.Vec3(0, 0, 0), 1.5, 1.8, 4.2, 0.0)
    v = pt.velocity_from_pair(pt.BoxPair(cur, prev, 1.0), 0.1)
    assert v.velocity.x == pytest.approx(20.0)


def test_pipeline_round_trip(tmp_path):
    spec = pt.parse_scenario(json.dumps(SCENARIO))
    sim = pt.generate(spec)
    assert len(sim.frames.frames) == 40

    config = pt.TrackerConfig()
    tracker = pt.Tracker(config)
    rows = []
    for frame in sim.frames.frames:
        for out in tracker.step(frame):
            rows.append(out)
    assert rows, "tracker produced no output"

    # Evaluate past the confirmation warm-up: perfect input scores 100.
    warmup = config.min_hits - 1
    gt = [g for g in sim.ground_truth if g.frame_index >= warmup]
    hyp = []
    for out in rows:
        if out.frame_index < warmup:
            continue
        h = pt.GtBox()
        h.frame_index = out.frame_index
        h.gt_id = out.track_id
        h.box = out.box
        h.score = out.score
        hyp.append(h)
    report = pt.evaluate({"0000": gt}, {"0000": hyp}, 0.5, 40)
    assert report.MOTA == pytest.approx(100.0)
    assert report.IDs == 0
    assert report.MT == pytest.approx(100.0)

    # File formats round-trip through the same API the CLI uses.
    pairs_path = str(tmp_path / "pairs.jsonl")
    pt.write_pairs([sim.frames], pairs_path)
    back = pt.read_pairs(pairs_path)
    assert len(back) == 1
    assert len(back[0].frames) == 40

    labels_path = str(tmp_path / "gt.txt")
    pt.write_kitti_labels(sim.ground_truth, labels_path)
    labels = pt.read_kitti_labels(labels_path)
    assert len(labels) == len(sim.ground_truth)


def test_errors_surface_as_python_exceptions(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n")
    with pytest.raises(pt.PairtrackError):
        pt.read_pairs(str(bad))
    with pytest.raises(pt.PairtrackError):
        pt.parse_scenario("{}")
