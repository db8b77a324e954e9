"""3D multi-object tracking from paired box detections."""

from pairtrack._core import (  # noqa: F401
    Assignment,
    BoxPair,
    EgoPose,
    FrameRecord,
    GtBox,
    Match,
    MetricsReport,
    OrientedBox3D,
    PairtrackError,
    ScenarioSpec,
    SequenceRecords,
    SimulationOutput,
    TrackedBox,
    Tracker,
    TrackerConfig,
    Vec3,
    VelocitySample,
    __version__,
    associate,
    build_cost_matrix,
    evaluate,
    fuse,
    generate,
    iou_3d,
    parse_scenario,
    read_kitti_labels,
    read_pairs,
    transform_box,
    velocity_from_pair,
    wrap_angle,
    write_kitti_labels,
    write_pairs,
    write_results,
)
