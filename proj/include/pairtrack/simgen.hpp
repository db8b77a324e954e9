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
#ifndef PAIRTRACK_SIMGEN_HPP
#define PAIRTRACK_SIMGEN_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pairtrack/detio.hpp"
#include "pairtrack/geometry.hpp"

namespace pairtrack {

/// Seedable, portable random source: mt19937_64 (algorithm pinned by the C++
/// standard) with explicit uniform and Box-Muller normal mappings, so fixture
/// bytes reproduce across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution, one engine draw.
  double uniform01();
  double uniform(double lo, double hi);
  /// Box-Muller from two engine draws.
  double normal(double mu, double sigma);
  bool bernoulli(double p) { return uniform01() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Closed-form motion profile; positions integrate exactly, no time stepping.
struct MotionProfile {
  enum class Kind { Constant, Turn, Piecewise };

  struct Segment {
    double duration = 0.0;  // seconds
    Kind kind = Kind::Constant;
    Vec3 velocity;
    double speed = 0.0;
    double yaw_rate = 0.0;
  };

  Kind kind = Kind::Constant;
  Vec3 velocity;               // Constant
  double speed = 0.0;          // Turn: speed along the heading
  double yaw_rate = 0.0;       // Turn: heading rate
  std::vector<Segment> segments;  // Piecewise
};

/// Pose-like start state plus a profile; yields (position, yaw) at any time,
/// including negative times (backward extrapolation of the first segment).
struct TrajectoryState {
  Vec3 position;
  double yaw = 0.0;
};

TrajectoryState evaluate_trajectory(const TrajectoryState& start,
                                    const MotionProfile& profile, double t);

struct VehicleSpec {
  OrientedBox3D initial;  // world-frame box at t = 0
  MotionProfile motion;
};

struct EgoSpec {
  TrajectoryState initial;
  MotionProfile motion;
};

struct NoiseSpec {
  double sigma_center = 0.0;  // meters, per axis
  double sigma_yaw = 0.0;     // radians
  double sigma_dims = 0.0;    // meters, per dimension
};

struct ScenarioSpec {
  std::string sequence_id = "0000";
  int num_frames = 0;
  double frame_rate = 10.0;  // Hz
  std::vector<VehicleSpec> vehicles;
  EgoSpec ego;
  NoiseSpec noise;
  double dropout_prob = 0.0;
  double false_positive_rate = 0.0;
  double pairing_error_prob = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws SpecError
};

/// Parse a scenario spec object. Throws SpecError on schema or invariant
/// violations.
ScenarioSpec parse_scenario(const std::string& json_text);

/// Noise-free ground-truth box of one vehicle at time t.
OrientedBox3D ground_truth_box(const VehicleSpec& vehicle, double t);

/// Scripted ego pose at time t (sensor frame to world frame).
EgoPose ego_pose_at(const EgoSpec& ego, double t);

struct SimulationOutput {
  std::vector<GtBox> ground_truth;  // noise-free, all frames
  SequenceRecords frames;           // noisy world-frame box pairs + poses
};

/// Render the scenario: exact ground truth plus noisy, dropout- and
/// clutter-corrupted box pairs. Deterministic for a given spec.
SimulationOutput generate(const ScenarioSpec& spec);

}  // namespace pairtrack

#endif  // PAIRTRACK_SIMGEN_HPP
