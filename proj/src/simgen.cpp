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
#include "pairtrack/simgen.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pairtrack/errors.hpp"

namespace pairtrack {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kStraightYawRate = 1e-12;  // below this a turn is a line
}  // namespace

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal(double mu, double sigma) {
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
  const double u2 = uniform01();
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  return std::min(k, n - 1);
}

namespace {

TrajectoryState advance(const TrajectoryState& s, MotionProfile::Kind kind,
                        const Vec3& velocity, double speed, double yaw_rate,
                        double t) {
  TrajectoryState out = s;
  switch (kind) {
    case MotionProfile::Kind::Constant:
      out.position = s.position + velocity * t;
      break;
    case MotionProfile::Kind::Turn: {
      if (std::abs(yaw_rate) < kStraightYawRate) {
        out.position = s.position +
                       Vec3{std::cos(s.yaw), std::sin(s.yaw), 0.0} * (speed * t);
      } else {
        const double psi = s.yaw + yaw_rate * t;
        const double r = speed / yaw_rate;
        out.position = s.position + Vec3{r * (std::sin(psi) - std::sin(s.yaw)),
                                         r * (std::cos(s.yaw) - std::cos(psi)),
                                         0.0};
        out.yaw = psi;
      }
      break;
    }
    case MotionProfile::Kind::Piecewise:
      break;  // handled by the caller
  }
  return out;
}

}  // namespace

TrajectoryState evaluate_trajectory(const TrajectoryState& start,
                                    const MotionProfile& profile, double t) {
  if (profile.kind != MotionProfile::Kind::Piecewise) {
    return advance(start, profile.kind, profile.velocity, profile.speed,
                   profile.yaw_rate, t);
  }
  if (profile.segments.empty()) return start;

  // Walk segment end states; extrapolate beyond either end.
  TrajectoryState state = start;
  double elapsed = 0.0;
  for (size_t i = 0; i < profile.segments.size(); ++i) {
    const auto& seg = profile.segments[i];
    const bool last = i + 1 == profile.segments.size();
    const double local = t - elapsed;
    if (t < elapsed + seg.duration || last || t < 0.0) {
      return advance(state, seg.kind, seg.velocity, seg.speed, seg.yaw_rate,
                     local);
    }
    state = advance(state, seg.kind, seg.velocity, seg.speed, seg.yaw_rate,
                    seg.duration);
    elapsed += seg.duration;
  }
  return state;
}

void ScenarioSpec::validate() const {
  if (num_frames < 1) throw SpecError("num_frames must be >= 1");
  if (!(frame_rate > 0.0)) throw SpecError("frame_rate must be > 0");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw SpecError(std::string(name) + " must lie in [0, 1]");
    }
  };
  prob(dropout_prob, "dropout_prob");
  prob(false_positive_rate, "false_positive_rate");
  prob(pairing_error_prob, "pairing_error_prob");
  if (noise.sigma_center < 0.0 || noise.sigma_yaw < 0.0 ||
      noise.sigma_dims < 0.0) {
    throw SpecError("noise sigmas must be >= 0");
  }
  if (sequence_id.empty()) throw SpecError("sequence id must be non-empty");
  for (const auto& v : vehicles) {
    if (!v.initial.valid()) {
      throw SpecError("vehicle initial box violates box invariants");
    }
  }
}

namespace {

Vec3 vec3_from(const nlohmann::json& a, const char* name) {
  if (!a.is_array() || a.size() != 3) {
    throw SpecError(std::string(name) + " must be an array of 3 numbers");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

MotionProfile::Segment segment_from(const nlohmann::json& j);

MotionProfile motion_from(const nlohmann::json& j) {
  MotionProfile p;
  const std::string type = j.value("type", "constant");
  if (type == "constant") {
    p.kind = MotionProfile::Kind::Constant;
    if (j.contains("velocity")) p.velocity = vec3_from(j.at("velocity"), "velocity");
  } else if (type == "turn") {
    p.kind = MotionProfile::Kind::Turn;
    p.speed = j.value("speed", 0.0);
    p.yaw_rate = j.value("yaw_rate", 0.0);
  } else if (type == "piecewise") {
    p.kind = MotionProfile::Kind::Piecewise;
    if (!j.contains("segments") || !j.at("segments").is_array() ||
        j.at("segments").empty()) {
      throw SpecError("piecewise motion needs a non-empty segments array");
    }
    for (const auto& sj : j.at("segments")) p.segments.push_back(segment_from(sj));
  } else {
    throw SpecError("unknown motion type '" + type + "'");
  }
  return p;
}

MotionProfile::Segment segment_from(const nlohmann::json& j) {
  MotionProfile::Segment s;
  s.duration = j.value("duration", 0.0);
  if (!(s.duration > 0.0)) throw SpecError("segment duration must be > 0");
  const MotionProfile inner = motion_from(j.at("motion"));
  if (inner.kind == MotionProfile::Kind::Piecewise) {
    throw SpecError("piecewise segments cannot nest");
  }
  s.kind = inner.kind;
  s.velocity = inner.velocity;
  s.speed = inner.speed;
  s.yaw_rate = inner.yaw_rate;
  return s;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    ScenarioSpec spec;
    spec.sequence_id = j.value("seq", std::string("0000"));
    spec.num_frames = j.value("num_frames", 0);
    spec.frame_rate = j.value("frame_rate", 10.0);
    spec.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      spec.noise.sigma_center = n.value("sigma_center", 0.0);
      spec.noise.sigma_yaw = n.value("sigma_yaw", 0.0);
      spec.noise.sigma_dims = n.value("sigma_dims", 0.0);
    }
    spec.dropout_prob = j.value("dropout_prob", 0.0);
    spec.false_positive_rate = j.value("false_positive_rate", 0.0);
    spec.pairing_error_prob = j.value("pairing_error_prob", 0.0);
    if (j.contains("ego")) {
      const auto& e = j.at("ego");
      if (e.contains("start")) {
        spec.ego.initial.position = vec3_from(e.at("start"), "ego start");
      }
      spec.ego.initial.yaw = e.value("yaw", 0.0);
      if (e.contains("motion")) spec.ego.motion = motion_from(e.at("motion"));
    }
    if (!j.contains("vehicles") || !j.at("vehicles").is_array()) {
      throw SpecError("scenario needs a vehicles array");
    }
    for (const auto& vj : j.at("vehicles")) {
      VehicleSpec v;
      v.initial.center = vec3_from(vj.at("center"), "vehicle center");
      const auto dims = vj.at("dims");
      if (!dims.is_array() || dims.size() != 3) {
        throw SpecError("vehicle dims must be [h, w, l]");
      }
      v.initial.h = dims[0].get<double>();
      v.initial.w = dims[1].get<double>();
      v.initial.l = dims[2].get<double>();
      v.initial.yaw = wrap_angle(vj.value("yaw", 0.0));
      if (vj.contains("motion")) v.motion = motion_from(vj.at("motion"));
      spec.vehicles.push_back(std::move(v));
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("scenario schema error: ") + e.what());
  }
}

OrientedBox3D ground_truth_box(const VehicleSpec& vehicle, double t) {
  TrajectoryState start{vehicle.initial.center, vehicle.initial.yaw};
  const TrajectoryState s = evaluate_trajectory(start, vehicle.motion, t);
  OrientedBox3D box = vehicle.initial;
  box.center = s.position;
  box.yaw = wrap_angle(s.yaw);
  return box;
}

EgoPose ego_pose_at(const EgoSpec& ego, double t) {
  const TrajectoryState s = evaluate_trajectory(ego.initial, ego.motion, t);
  return EgoPose::planar(s.position.x, s.position.y, s.position.z,
                         wrap_angle(s.yaw));
}

namespace {

OrientedBox3D perturb(const OrientedBox3D& box, const NoiseSpec& noise,
                      Rng& rng) {
  OrientedBox3D out = box;
  out.center.x += rng.normal(0.0, noise.sigma_center);
  out.center.y += rng.normal(0.0, noise.sigma_center);
  out.center.z += rng.normal(0.0, noise.sigma_center);
  out.yaw = wrap_angle(out.yaw + rng.normal(0.0, noise.sigma_yaw));
  out.h = std::max(0.05, out.h + rng.normal(0.0, noise.sigma_dims));
  out.w = std::max(0.05, out.w + rng.normal(0.0, noise.sigma_dims));
  out.l = std::max(0.05, out.l + rng.normal(0.0, noise.sigma_dims));
  return out;
}

}  // namespace

SimulationOutput generate(const ScenarioSpec& spec) {
  spec.validate();
  const double dt = 1.0 / spec.frame_rate;
  Rng rng(spec.rng_seed);

  SimulationOutput out;
  out.frames.sequence_id = spec.sequence_id;

  for (int f = 0; f < spec.num_frames; ++f) {
    const double t = f * dt;

    FrameRecord rec;
    rec.sequence_id = spec.sequence_id;
    rec.frame_index = f;
    rec.timestamp = t;
    rec.ego_pose = ego_pose_at(spec.ego, t);

    // Draw order per frame is fixed: per vehicle the dropout gate, then the
    // noise for the current and previous boxes, then the score; afterwards
    // the false-positive gate and, last, the pairing-error shuffle.
    for (size_t vi = 0; vi < spec.vehicles.size(); ++vi) {
      const VehicleSpec& vehicle = spec.vehicles[vi];
      out.ground_truth.push_back(GtBox{
          f, static_cast<std::int64_t>(vi), ground_truth_box(vehicle, t),
          ObjectClass::Car, 1.0});

      if (rng.bernoulli(spec.dropout_prob)) continue;
      BoxPair pair;
      pair.current = perturb(ground_truth_box(vehicle, t), spec.noise, rng);
      pair.previous = perturb(ground_truth_box(vehicle, t - dt), spec.noise, rng);
      pair.score = rng.uniform(0.5, 1.0);
      rec.pairs.push_back(std::move(pair));
    }

    if (rng.bernoulli(spec.false_positive_rate)) {
      BoxPair fp;
      OrientedBox3D box;
      box.center = {rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0), 0.75};
      box.h = rng.uniform(1.3, 1.8);
      box.w = rng.uniform(1.5, 2.0);
      box.l = rng.uniform(3.5, 4.8);
      box.yaw = wrap_angle(rng.uniform(-kPi, kPi));
      const double speed = rng.uniform(0.0, 15.0);
      const Vec3 vel{speed * std::cos(box.yaw), speed * std::sin(box.yaw), 0.0};
      fp.current = box;
      fp.previous = box;
      fp.previous.center = box.center - vel * dt;
      fp.score = rng.uniform(0.2, 0.7);
      rec.pairs.push_back(std::move(fp));
    }

    if (spec.pairing_error_prob > 0.0 && rec.pairs.size() >= 2) {
      const size_t n = rec.pairs.size();
      for (size_t i = 0; i < n; ++i) {
        if (!rng.bernoulli(spec.pairing_error_prob)) continue;
        const size_t j = static_cast<size_t>(rng.below(n));
        if (j != i) std::swap(rec.pairs[i].previous, rec.pairs[j].previous);
      }
    }

    out.frames.frames.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pairtrack
