/******************************************************************************
 * Copyright 2026 The pairtrack Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pairtrack/association.hpp"
#include "pairtrack/detio.hpp"
#include "pairtrack/errors.hpp"
#include "pairtrack/geometry.hpp"
#include "pairtrack/metrics.hpp"
#include "pairtrack/simgen.hpp"
#include "pairtrack/tracker.hpp"
#include "pairtrack/version.hpp"

namespace py = pybind11;
using namespace pairtrack;

namespace {

std::string method_name(AssociationMethod m) {
  return m == AssociationMethod::Greedy ? "greedy" : "optimal";
}

AssociationMethod method_from(const std::string& s) {
  if (s == "greedy") return AssociationMethod::Greedy;
  if (s == "optimal") return AssociationMethod::Optimal;
  throw py::value_error("method must be 'greedy' or 'optimal'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "3D multi-object tracking from paired box detections";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "PairtrackError");

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init([](double x, double y, double z) {
             return Vec3{x, y, z};
           }),
           py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("__repr__", [](const Vec3& v) {
        std::ostringstream os;
        os << "Vec3(" << v.x << ", " << v.y << ", " << v.z << ")";
        return os.str();
      });

  py::class_<OrientedBox3D>(m, "OrientedBox3D")
      .def(py::init<>())
      .def(py::init([](const Vec3& center, double h, double w, double l,
                       double yaw) {
             return OrientedBox3D{center, h, w, l, yaw};
           }),
           py::arg("center"), py::arg("h"), py::arg("w"), py::arg("l"),
           py::arg("yaw") = 0.0)
      .def_readwrite("center", &OrientedBox3D::center)
      .def_readwrite("h", &OrientedBox3D::h)
      .def_readwrite("w", &OrientedBox3D::w)
      .def_readwrite("l", &OrientedBox3D::l)
      .def_readwrite("yaw", &OrientedBox3D::yaw)
      .def("volume", &OrientedBox3D::volume)
      .def("__repr__", [](const OrientedBox3D& b) {
        std::ostringstream os;
        os << "OrientedBox3D(center=(" << b.center.x << ", " << b.center.y
           << ", " << b.center.z << "), h=" << b.h << ", w=" << b.w
           << ", l=" << b.l << ", yaw=" << b.yaw << ")";
        return os.str();
      });

  py::class_<EgoPose>(m, "EgoPose")
      .def(py::init<>())
      .def_static("planar", &EgoPose::planar, py::arg("x"), py::arg("y"),
                  py::arg("z"), py::arg("yaw"))
      .def("yaw", &EgoPose::yaw)
      .def("inverse", &EgoPose::inverse)
      .def("compose", &EgoPose::compose)
      .def_readwrite("translation", &EgoPose::translation);

  py::class_<BoxPair>(m, "BoxPair")
      .def(py::init<>())
      .def(py::init([](const OrientedBox3D& cur, const OrientedBox3D& prev,
                       double score) {
             return BoxPair{cur, prev, score};
           }),
           py::arg("current"), py::arg("previous"), py::arg("score") = 1.0)
      .def_readwrite("current", &BoxPair::current)
      .def_readwrite("previous", &BoxPair::previous)
      .def_readwrite("score", &BoxPair::score);

  py::class_<FrameRecord>(m, "FrameRecord")
      .def(py::init<>())
      .def_readwrite("sequence_id", &FrameRecord::sequence_id)
      .def_readwrite("frame_index", &FrameRecord::frame_index)
      .def_readwrite("timestamp", &FrameRecord::timestamp)
      .def_readwrite("ego_pose", &FrameRecord::ego_pose)
      .def_readwrite("pairs", &FrameRecord::pairs);

  py::class_<SequenceRecords>(m, "SequenceRecords")
      .def(py::init<>())
      .def_readwrite("sequence_id", &SequenceRecords::sequence_id)
      .def_readwrite("frames", &SequenceRecords::frames);

  py::class_<GtBox>(m, "GtBox")
      .def(py::init<>())
      .def_readwrite("frame_index", &GtBox::frame_index)
      .def_readwrite("gt_id", &GtBox::gt_id)
      .def_readwrite("box", &GtBox::box)
      .def_readwrite("score", &GtBox::score);

  py::class_<TrackedBox>(m, "TrackedBox")
      .def(py::init<>())
      .def_readwrite("frame_index", &TrackedBox::frame_index)
      .def_readwrite("track_id", &TrackedBox::track_id)
      .def_readwrite("box", &TrackedBox::box)
      .def_readwrite("score", &TrackedBox::score);

  // geometry
  m.def("wrap_angle", &wrap_angle, py::arg("angle"));
  m.def("iou_3d", &iou_3d, py::arg("a"), py::arg("b"));
  m.def("transform_box", &transform_box, py::arg("pose"), py::arg("box"));

  // association
  py::class_<Match>(m, "Match")
      .def_readonly("pair_index", &Match::pair_index)
      .def_readonly("track_index", &Match::track_index)
      .def_readonly("iou", &Match::iou);
  py::class_<Assignment>(m, "Assignment")
      .def_readonly("matches", &Assignment::matches)
      .def_readonly("unmatched_pairs", &Assignment::unmatched_pairs)
      .def_readonly("unmatched_tracks", &Assignment::unmatched_tracks)
      .def("total_iou", &Assignment::total_iou);
  m.def(
      "associate",
      [](const std::vector<BoxPair>& pairs,
         const std::vector<OrientedBox3D>& tracks, double threshold,
         const std::string& method) {
        return associate(pairs, tracks, threshold, method_from(method));
      },
      py::arg("pairs"), py::arg("track_boxes"), py::arg("threshold") = 0.01,
      py::arg("method") = "greedy");
  m.def("build_cost_matrix", &build_cost_matrix, py::arg("pairs"),
        py::arg("track_boxes"));

  // tracker
  py::class_<VelocitySample>(m, "VelocitySample")
      .def(py::init<>())
      .def_readwrite("velocity", &VelocitySample::velocity)
      .def_readwrite("yaw_rate", &VelocitySample::yaw_rate);
  m.def("velocity_from_pair", &velocity_from_pair, py::arg("pair"),
        py::arg("dt"));
  m.def("fuse", &fuse, py::arg("prediction"), py::arg("detection"),
        py::arg("alpha"));

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def_readwrite("window_n", &TrackerConfig::window_n)
      .def_readwrite("iou_threshold", &TrackerConfig::iou_threshold)
      .def_readwrite("min_hits", &TrackerConfig::min_hits)
      .def_readwrite("max_misses", &TrackerConfig::max_misses)
      .def_readwrite("fusion_alpha", &TrackerConfig::fusion_alpha)
      .def_readwrite("score_threshold", &TrackerConfig::score_threshold)
      .def_readwrite("fuse_dims", &TrackerConfig::fuse_dims)
      .def_readwrite("emit_coasting", &TrackerConfig::emit_coasting)
      .def_property(
          "method",
          [](const TrackerConfig& c) { return method_name(c.method); },
          [](TrackerConfig& c, const std::string& v) {
            c.method = method_from(v);
          })
      .def("summary", &TrackerConfig::summary);

  py::class_<Tracker>(m, "Tracker")
      .def(py::init<TrackerConfig>(), py::arg("config") = TrackerConfig{})
      .def("step", &Tracker::step, py::arg("frame"));

  // metrics
  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("sAMOTA", &MetricsReport::samota)
      .def_readonly("AMOTA", &MetricsReport::amota)
      .def_readonly("AMOTP", &MetricsReport::amotp)
      .def_readonly("MOTA", &MetricsReport::mota)
      .def_readonly("MOTP", &MetricsReport::motp)
      .def_readonly("IDs", &MetricsReport::id_switches)
      .def_readonly("Frags", &MetricsReport::fragments)
      .def_readonly("FP", &MetricsReport::fp)
      .def_readonly("FN", &MetricsReport::fn)
      .def_readonly("MT", &MetricsReport::mt)
      .def_readonly("ML", &MetricsReport::ml)
      .def_readonly("num_gt", &MetricsReport::num_gt)
      .def("__repr__", [](const MetricsReport& r) {
        return format_report_table(r, 0.5);
      });
  m.def("evaluate", &evaluate, py::arg("gt"), py::arg("hyp"),
        py::arg("iou_min") = 0.5, py::arg("recall_points") = 40);

  // simulation
  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readwrite("sequence_id", &ScenarioSpec::sequence_id)
      .def_readwrite("num_frames", &ScenarioSpec::num_frames)
      .def_readwrite("frame_rate", &ScenarioSpec::frame_rate)
      .def_readwrite("rng_seed", &ScenarioSpec::rng_seed);
  py::class_<SimulationOutput>(m, "SimulationOutput")
      .def_readonly("ground_truth", &SimulationOutput::ground_truth)
      .def_readonly("frames", &SimulationOutput::frames);
  m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
  m.def("generate", &generate, py::arg("spec"));

  // io
  m.def("read_pairs", &read_pairs, py::arg("path"));
  m.def("write_pairs", &write_pairs, py::arg("sequences"), py::arg("path"));
  m.def("read_kitti_labels", [](const std::string& path) {
    return read_kitti_labels(path);
  });
  m.def("write_kitti_labels", &write_kitti_labels, py::arg("boxes"),
        py::arg("path"));
  m.def("write_results", &write_results, py::arg("rows"), py::arg("path"));
}
