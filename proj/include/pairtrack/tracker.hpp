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
#ifndef PAIRTRACK_TRACKER_HPP
#define PAIRTRACK_TRACKER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "pairtrack/association.hpp"
#include "pairtrack/detio.hpp"
#include "pairtrack/geometry.hpp"

namespace pairtrack {

/// One per-frame velocity measurement: linear velocity plus yaw rate.
struct VelocitySample {
  Vec3 velocity;
  double yaw_rate = 0.0;
};

/// Sliding window over the N most recent velocity measurements, oldest first.
class VelocityWindow {
 public:
  explicit VelocityWindow(size_t capacity) : capacity_(capacity) {}

  void push(const VelocitySample& s);
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  size_t capacity() const { return capacity_; }
  const std::deque<VelocitySample>& samples() const { return samples_; }

 private:
  size_t capacity_;
  std::deque<VelocitySample> samples_;
};

enum class TrackStatus { Tentative, Confirmed, Coasting, Dead };

std::string to_string(TrackStatus s);

struct Track {
  std::int64_t track_id = 0;
  OrientedBox3D state_box;
  VelocityWindow window{1};
  int hits = 0;
  int consecutive_misses = 0;
  TrackStatus status = TrackStatus::Tentative;
  double score = 0.0;
  std::int64_t last_frame = 0;
};

struct TrackerConfig {
  int window_n = 5;
  double iou_threshold = 0.01;
  int min_hits = 3;
  int max_misses = 2;
  double fusion_alpha = 0.5;
  double score_threshold = 0.0;
  AssociationMethod method = AssociationMethod::Greedy;
  bool fuse_dims = true;       // blend dims like centers; false takes detection dims
  bool emit_coasting = true;   // include coasted predictions in the output

  void validate() const;  // throws ConfigError
  std::string summary() const;
};

/// Load a TrackerConfig from a JSON object or "key = value" text file.
TrackerConfig load_tracker_config(const std::string& path);

/// Velocity implied by a box pair: (current - previous) / dt, yaw rate from
/// the wrapped yaw difference. Throws InvalidDt when dt <= 0.
VelocitySample velocity_from_pair(const BoxPair& pair, double dt);

/// Arithmetic mean over the window. Throws EmptyWindow.
VelocitySample smoothed_velocity(const VelocityWindow& window);

/// Constant-velocity advance of the track's state box by dt using the
/// smoothed window velocity. Throws EmptyWindow / InvalidDt.
OrientedBox3D predict(const Track& track, double dt);

/// Convex blend of prediction and detection: centers and dims interpolate
/// componentwise, yaw interpolates through the wrapped difference.
OrientedBox3D fuse(const OrientedBox3D& prediction,
                   const OrientedBox3D& detection, double alpha);

/// Per-sequence track lifecycle state machine. Single-owner, single-threaded;
/// run distinct sequences on distinct instances.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Advance one frame: associate pairs to live tracks, update matched
  /// tracks, coast unmatched ones, spawn tracks for unmatched pairs, and
  /// return the output rows (Confirmed plus, when enabled, Coasting tracks).
  /// Throws FrameOrderError on a non-consecutive frame index.
  std::vector<TrackedBox> step(const FrameRecord& frame);

  const TrackerConfig& config() const { return config_; }
  const std::vector<Track>& tracks() const { return tracks_; }

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::optional<std::int64_t> last_frame_;
  std::optional<double> last_timestamp_;
};

}  // namespace pairtrack

#endif  // PAIRTRACK_TRACKER_HPP
