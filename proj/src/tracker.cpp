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
#include "pairtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pairtrack/errors.hpp"

namespace pairtrack {

namespace {
// Weight of the newest detection score in the track score average.
constexpr double kScoreEmaAlpha = 0.5;
}  // namespace

void VelocityWindow::push(const VelocitySample& s) {
  if (capacity_ == 0) return;
  if (samples_.size() == capacity_) samples_.pop_front();
  samples_.push_back(s);
}

std::string to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tentative:
      return "Tentative";
    case TrackStatus::Confirmed:
      return "Confirmed";
    case TrackStatus::Coasting:
      return "Coasting";
    case TrackStatus::Dead:
      return "Dead";
  }
  return "Dead";
}

void TrackerConfig::validate() const {
  if (window_n < 1) throw ConfigError("window_n must be >= 1");
  if (min_hits < 1) throw ConfigError("min_hits must be >= 1");
  if (max_misses < 1) throw ConfigError("max_misses must be >= 1");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError("iou_threshold must lie in (0, 1]");
  }
  if (!(fusion_alpha >= 0.0 && fusion_alpha <= 1.0)) {
    throw ConfigError("fusion_alpha must lie in [0, 1]");
  }
  if (!std::isfinite(score_threshold)) {
    throw ConfigError("score_threshold must be finite");
  }
}

std::string TrackerConfig::summary() const {
  std::ostringstream os;
  os << "window_n=" << window_n << " iou_threshold=" << iou_threshold
     << " min_hits=" << min_hits << " max_misses=" << max_misses
     << " fusion_alpha=" << fusion_alpha
     << " score_threshold=" << score_threshold << " method="
     << (method == AssociationMethod::Greedy ? "greedy" : "optimal")
     << " fuse_dims=" << (fuse_dims ? "true" : "false")
     << " emit_coasting=" << (emit_coasting ? "true" : "false");
  return os.str();
}

namespace {

void apply_config_entry(TrackerConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto as_int = [&](const std::string& v) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not an integer: " + v);
    }
  };
  auto as_double = [&](const std::string& v) {
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number: " + v);
    }
  };
  auto as_bool = [&](const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': not a boolean: " + v);
  };

  if (key == "window_n") {
    cfg.window_n = as_int(value);
  } else if (key == "iou_threshold") {
    cfg.iou_threshold = as_double(value);
  } else if (key == "min_hits") {
    cfg.min_hits = as_int(value);
  } else if (key == "max_misses") {
    cfg.max_misses = as_int(value);
  } else if (key == "fusion_alpha" || key == "alpha") {
    cfg.fusion_alpha = as_double(value);
  } else if (key == "score_threshold") {
    cfg.score_threshold = as_double(value);
  } else if (key == "method") {
    if (value == "greedy") {
      cfg.method = AssociationMethod::Greedy;
    } else if (value == "optimal") {
      cfg.method = AssociationMethod::Optimal;
    } else {
      throw ConfigError("config key 'method': expected greedy or optimal, got " +
                        value);
    }
  } else if (key == "fuse_dims") {
    cfg.fuse_dims = as_bool(value);
  } else if (key == "emit_coasting") {
    cfg.emit_coasting = as_bool(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

TrackerConfig load_tracker_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  TrackerConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      apply_config_entry(cfg, key,
                         value.is_string() ? value.get<std::string>()
                                           : value.dump());
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ": expected 'key = value', got: " + line);
      }
      apply_config_entry(cfg, trim(line.substr(0, eq)),
                         trim(line.substr(eq + 1)));
    }
  }
  cfg.validate();
  return cfg;
}

VelocitySample velocity_from_pair(const BoxPair& pair, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidDt("velocity_from_pair requires dt > 0, got " +
                    std::to_string(dt));
  }
  VelocitySample s;
  s.velocity = (pair.current.center - pair.previous.center) / dt;
  s.yaw_rate = wrap_angle(pair.current.yaw - pair.previous.yaw) / dt;
  return s;
}

VelocitySample smoothed_velocity(const VelocityWindow& window) {
  if (window.empty()) throw EmptyWindow("velocity window is empty");
  VelocitySample mean;
  for (const VelocitySample& s : window.samples()) {
    mean.velocity = mean.velocity + s.velocity;
    mean.yaw_rate += s.yaw_rate;
  }
  const double n = static_cast<double>(window.size());
  mean.velocity = mean.velocity / n;
  mean.yaw_rate /= n;
  return mean;
}

OrientedBox3D predict(const Track& track, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidDt("predict requires dt > 0, got " + std::to_string(dt));
  }
  const VelocitySample v = smoothed_velocity(track.window);
  OrientedBox3D out = track.state_box;
  out.center = out.center + v.velocity * dt;
  out.yaw = wrap_angle(out.yaw + v.yaw_rate * dt);
  return out;
}

OrientedBox3D fuse(const OrientedBox3D& prediction,
                   const OrientedBox3D& detection, double alpha) {
  // Boundary weights reproduce one side bit-exactly; the yaw interpolation
  // below would lose the last ulp at alpha = 1.
  if (alpha >= 1.0) {
    OrientedBox3D out = detection;
    out.yaw = wrap_angle(out.yaw);
    return out;
  }
  OrientedBox3D out;
  out.center = detection.center * alpha + prediction.center * (1.0 - alpha);
  out.h = alpha * detection.h + (1.0 - alpha) * prediction.h;
  out.w = alpha * detection.w + (1.0 - alpha) * prediction.w;
  out.l = alpha * detection.l + (1.0 - alpha) * prediction.l;
  out.yaw = wrap_angle(prediction.yaw +
                       alpha * wrap_angle(detection.yaw - prediction.yaw));
  return out;
}

Tracker::Tracker(TrackerConfig config) : config_(config) {
  config_.validate();
}

std::vector<TrackedBox> Tracker::step(const FrameRecord& frame) {
  if (last_frame_ && frame.frame_index != *last_frame_ + 1) {
    throw FrameOrderError("expected frame " + std::to_string(*last_frame_ + 1) +
                          ", got " + std::to_string(frame.frame_index) +
                          " in sequence '" + frame.sequence_id + "'");
  }
  std::optional<double> dt;
  if (last_timestamp_) {
    const double d = frame.timestamp - *last_timestamp_;
    if (!(d > 0.0)) {
      throw InvalidDt("non-increasing timestamp at frame " +
                      std::to_string(frame.frame_index));
    }
    dt = d;
  }

  std::vector<BoxPair> pairs;
  pairs.reserve(frame.pairs.size());
  for (const BoxPair& p : frame.pairs) {
    if (p.score >= config_.score_threshold) pairs.push_back(p);
  }

  std::vector<OrientedBox3D> track_boxes;
  track_boxes.reserve(tracks_.size());
  for (const Track& t : tracks_) track_boxes.push_back(t.state_box);

  const Assignment assignment =
      associate(pairs, track_boxes, config_.iou_threshold, config_.method);

  for (const Match& m : assignment.matches) {
    Track& track = tracks_[m.track_index];
    const BoxPair& pair = pairs[m.pair_index];
    if (dt) track.window.push(velocity_from_pair(pair, *dt));
    const OrientedBox3D prediction =
        (!track.window.empty() && dt) ? predict(track, *dt) : pair.current;
    OrientedBox3D fused = fuse(prediction, pair.current, config_.fusion_alpha);
    if (!config_.fuse_dims) {
      fused.h = pair.current.h;
      fused.w = pair.current.w;
      fused.l = pair.current.l;
    }
    track.state_box = fused;
    track.hits += 1;
    track.consecutive_misses = 0;
    track.score = (1.0 - kScoreEmaAlpha) * track.score + kScoreEmaAlpha * pair.score;
    track.last_frame = frame.frame_index;
    if (track.status == TrackStatus::Tentative && track.hits >= config_.min_hits) {
      track.status = TrackStatus::Confirmed;
    } else if (track.status == TrackStatus::Coasting) {
      track.status = TrackStatus::Confirmed;
    }
  }

  for (size_t j : assignment.unmatched_tracks) {
    Track& track = tracks_[j];
    if (track.status == TrackStatus::Tentative) {
      track.status = TrackStatus::Dead;  // tentative tracks die on first miss
      continue;
    }
    track.consecutive_misses += 1;
    if (track.consecutive_misses > config_.max_misses) {
      track.status = TrackStatus::Dead;
      continue;
    }
    if (!track.window.empty() && dt) track.state_box = predict(track, *dt);
    track.status = TrackStatus::Coasting;
    track.last_frame = frame.frame_index;
  }

  for (size_t i : assignment.unmatched_pairs) {
    const BoxPair& pair = pairs[i];
    Track track;
    track.track_id = next_id_++;
    track.state_box = pair.current;
    track.window = VelocityWindow(static_cast<size_t>(config_.window_n));
    if (dt) track.window.push(velocity_from_pair(pair, *dt));
    track.hits = 1;
    track.consecutive_misses = 0;
    track.status = track.hits >= config_.min_hits ? TrackStatus::Confirmed
                                                  : TrackStatus::Tentative;
    track.score = pair.score;
    track.last_frame = frame.frame_index;
    tracks_.push_back(std::move(track));
  }

  tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                               [](const Track& t) {
                                 return t.status == TrackStatus::Dead;
                               }),
                tracks_.end());

  std::vector<TrackedBox> out;
  for (const Track& t : tracks_) {
    const bool emit = t.status == TrackStatus::Confirmed ||
                      (t.status == TrackStatus::Coasting && config_.emit_coasting);
    if (!emit) continue;
    out.push_back({frame.frame_index, t.track_id, t.state_box, t.score});
  }

  last_frame_ = frame.frame_index;
  last_timestamp_ = frame.timestamp;
  return out;
}

}  // namespace pairtrack
