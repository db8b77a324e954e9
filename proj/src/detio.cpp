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
#include "pairtrack/detio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pairtrack/errors.hpp"

namespace pairtrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

using ordered_json = nlohmann::ordered_json;

std::string where(const std::string& path, size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

OrientedBox3D box_from_array(const nlohmann::json& arr, const std::string& ctx) {
  if (!arr.is_array() || arr.size() != 7) {
    throw ParseError(ctx + "box must be an array of 7 numbers [x,y,z,h,w,l,yaw]");
  }
  OrientedBox3D b;
  b.center = {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
  b.h = arr[3].get<double>();
  b.w = arr[4].get<double>();
  b.l = arr[5].get<double>();
  b.yaw = wrap_angle(arr[6].get<double>());
  if (!b.valid()) {
    throw ParseError(ctx + "box has non-positive dims or non-finite fields");
  }
  return b;
}

ordered_json box_to_array(const OrientedBox3D& b) {
  return ordered_json::array(
      {b.center.x, b.center.y, b.center.z, b.h, b.w, b.l, b.yaw});
}

EgoPose pose_from_flat(const std::vector<double>& v, const std::string& ctx) {
  if (v.size() != 12) {
    throw ParseError(ctx + "pose must hold 12 numbers, row-major [R|t]");
  }
  EgoPose p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = v[4 * r + c];
    (r == 0 ? p.translation.x : r == 1 ? p.translation.y : p.translation.z) =
        v[4 * r + 3];
  }
  try {
    p.validate();
  } catch (const InvalidPose& e) {
    throw ParseError(ctx + e.what());
  }
  return p;
}

std::vector<double> pose_to_flat(const EgoPose& p) {
  std::vector<double> v(12);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) v[4 * r + c] = p.rotation(r, c);
  }
  v[3] = p.translation.x;
  v[7] = p.translation.y;
  v[11] = p.translation.z;
  return v;
}

}  // namespace

std::string to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Car:
      return "Car";
  }
  return "Car";
}

OrientedBox3D kitti_camera_to_internal(double x, double y, double z, double h,
                                       double w, double l, double ry) {
  OrientedBox3D b;
  // Camera (x right, y down, z forward) to world (x forward, y left, z up);
  // KITTI boxes reference the bottom face center, the internal box the
  // centroid, hence the h/2 lift.
  b.center = {z, -x, 0.5 * h - y};
  b.h = h;
  b.w = w;
  b.l = l;
  b.yaw = wrap_angle(-ry - 0.5 * kPi);
  return b;
}

void internal_to_kitti_camera(const OrientedBox3D& box, double& x, double& y,
                              double& z, double& h, double& w, double& l,
                              double& ry) {
  x = -box.center.y;
  y = 0.5 * box.h - box.center.z;
  z = box.center.x;
  h = box.h;
  w = box.w;
  l = box.l;
  ry = wrap_angle(-box.yaw - 0.5 * kPi);
}

std::vector<SequenceRecords> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");

  std::map<std::string, SequenceRecords> by_seq;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string ctx = where(path, lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ctx + e.what());
    }
    try {
      FrameRecord rec;
      rec.sequence_id = j.at("seq").get<std::string>();
      rec.frame_index = j.at("frame").get<std::int64_t>();
      rec.timestamp = j.at("time").get<double>();
      rec.ego_pose = pose_from_flat(j.at("pose").get<std::vector<double>>(), ctx);
      if (rec.frame_index < 0) throw ParseError(ctx + "frame index must be >= 0");
      for (const auto& pj : j.at("pairs")) {
        BoxPair pair;
        pair.current = box_from_array(pj.at("cur"), ctx);
        pair.previous = box_from_array(pj.at("prev"), ctx);
        pair.score = pj.at("score").get<double>();
        if (!(pair.score >= 0.0 && pair.score <= 1.0)) {
          throw ParseError(ctx + "score must lie in [0, 1]");
        }
        rec.pairs.push_back(std::move(pair));
      }
      auto& seq = by_seq[rec.sequence_id];
      seq.sequence_id = rec.sequence_id;
      if (!seq.frames.empty()) {
        const FrameRecord& last = seq.frames.back();
        if (rec.frame_index <= last.frame_index) {
          throw MonotonicityError(ctx + "frame index " +
                                  std::to_string(rec.frame_index) +
                                  " does not increase within sequence '" +
                                  rec.sequence_id + "'");
        }
        if (rec.timestamp <= last.timestamp) {
          throw MonotonicityError(ctx + "timestamp does not increase within sequence '" +
                                  rec.sequence_id + "'");
        }
      }
      seq.frames.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ctx + e.what());
    }
  }

  std::vector<SequenceRecords> out;
  out.reserve(by_seq.size());
  for (auto& [id, seq] : by_seq) out.push_back(std::move(seq));
  return out;
}

void write_pairs(const std::vector<SequenceRecords>& sequences,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open file for writing");
  for (const auto& seq : sequences) {
    for (const auto& rec : seq.frames) {
      ordered_json j;
      j["seq"] = rec.sequence_id;
      j["frame"] = rec.frame_index;
      j["time"] = rec.timestamp;
      j["pose"] = pose_to_flat(rec.ego_pose);
      auto pairs = ordered_json::array();
      for (const auto& p : rec.pairs) {
        ordered_json pj;
        pj["cur"] = box_to_array(p.current);
        pj["prev"] = box_to_array(p.previous);
        pj["score"] = p.score;
        pairs.push_back(std::move(pj));
      }
      j["pairs"] = std::move(pairs);
      out << j.dump() << "\n";
    }
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<GtBox> read_kitti_labels(const std::string& path,
                                     const std::vector<ObjectClass>& classes) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");

  std::set<std::string> wanted;
  for (ObjectClass c : classes) wanted.insert(to_string(c));

  std::vector<GtBox> out;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = where(path, lineno);

    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.size() != 17 && tok.size() != 18) {
      throw ParseError(ctx + "expected 17 or 18 columns, got " +
                       std::to_string(tok.size()));
    }

    size_t col = 0;
    auto num = [&](size_t i) -> double {
      col = i + 1;
      try {
        size_t pos = 0;
        const double v = std::stod(tok[i], &pos);
        if (pos != tok[i].size()) throw std::invalid_argument(tok[i]);
        return v;
      } catch (const std::exception&) {
        throw ParseError(ctx + "column " + std::to_string(col) +
                         ": not a number: '" + tok[i] + "'");
      }
    };

    const std::string& type = tok[2];
    if (type == "DontCare") continue;
    if (!wanted.count(type)) continue;

    GtBox g;
    g.frame_index = static_cast<std::int64_t>(num(0));
    g.gt_id = static_cast<std::int64_t>(num(1));
    if (g.frame_index < 0 || g.gt_id < 0) {
      throw ParseError(ctx + "frame and track id must be >= 0");
    }
    const double h = num(10), w = num(11), l = num(12);
    const double x = num(13), y = num(14), z = num(15);
    const double ry = num(16);
    g.box = kitti_camera_to_internal(x, y, z, h, w, l, ry);
    if (!g.box.valid()) throw ParseError(ctx + "box has invalid dimensions");
    g.object_class = ObjectClass::Car;
    g.score = tok.size() == 18 ? num(17) : 1.0;

    if (!seen.insert({g.frame_index, g.gt_id}).second) {
      throw MonotonicityError(ctx + "duplicate (frame, id) row: frame " +
                              std::to_string(g.frame_index) + ", id " +
                              std::to_string(g.gt_id));
    }
    out.push_back(g);
  }
  return out;
}

namespace {

std::string kitti_row(std::int64_t frame, std::int64_t id, ObjectClass cls,
                      const OrientedBox3D& box, const double* score) {
  double x, y, z, h, w, l, ry;
  internal_to_kitti_camera(box, x, y, z, h, w, l, ry);
  const double alpha = wrap_angle(ry - std::atan2(x, z));
  char buf[512];
  int n = std::snprintf(
      buf, sizeof(buf),
      "%lld %lld %s 0 0 %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
      static_cast<long long>(frame), static_cast<long long>(id),
      to_string(cls).c_str(), alpha, 0.0, 0.0, 0.0, 0.0, h, w, l, x, y, z, ry);
  std::string row(buf, static_cast<size_t>(n));
  if (score != nullptr) {
    n = std::snprintf(buf, sizeof(buf), " %.6f", *score);
    row.append(buf, static_cast<size_t>(n));
  }
  return row;
}

}  // namespace

void write_kitti_labels(const std::vector<GtBox>& boxes,
                        const std::string& path) {
  std::vector<const GtBox*> sorted;
  sorted.reserve(boxes.size());
  for (const auto& b : boxes) sorted.push_back(&b);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GtBox* a, const GtBox* b) {
                     return std::tie(a->frame_index, a->gt_id) <
                            std::tie(b->frame_index, b->gt_id);
                   });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open file for writing");
  for (const GtBox* g : sorted) {
    out << kitti_row(g->frame_index, g->gt_id, g->object_class, g->box, nullptr)
        << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

void write_results(const std::vector<TrackedBox>& rows,
                   const std::string& path) {
  std::vector<const TrackedBox*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.track_id < 0) throw IoError(path + ": negative track id in output");
    sorted.push_back(&r);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TrackedBox* a, const TrackedBox* b) {
                     return std::tie(a->frame_index, a->track_id) <
                            std::tie(b->frame_index, b->track_id);
                   });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open file for writing");
  for (const TrackedBox* r : sorted) {
    out << kitti_row(r->frame_index, r->track_id, ObjectClass::Car, r->box,
                     &r->score)
        << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<EgoPose> read_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<EgoPose> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = where(path, lineno);
    std::istringstream ss(line);
    std::vector<double> v;
    double d;
    while (ss >> d) v.push_back(d);
    if (!ss.eof()) throw ParseError(ctx + "not a number");
    out.push_back(pose_from_flat(v, ctx));
  }
  return out;
}

void write_poses(const std::vector<EgoPose>& poses, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open file for writing");
  char buf[64];
  for (const auto& p : poses) {
    const auto v = pose_to_flat(p);
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9f", v[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace pairtrack
