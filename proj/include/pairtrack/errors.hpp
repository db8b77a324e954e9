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
#ifndef PAIRTRACK_ERRORS_HPP
#define PAIRTRACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pairtrack {

/// Base class for all pairtrack errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A pose rotation tilts the vertical axis beyond tolerance; the pose
/// convention is incompatible with yaw-only boxes.
class NonPlanarPose : public Error {
 public:
  using Error::Error;
};

/// A pose rotation is not orthonormal with determinant +1.
class InvalidPose : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message carries the line (and column when known).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Frame indices or timestamps regress, or (frame, id) rows repeat.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

/// Non-positive time delta where a positive one is required.
class InvalidDt : public Error {
 public:
  using Error::Error;
};

/// Velocity window has no samples.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// Tracker fed a frame whose index is not the successor of the last one.
class FrameOrderError : public Error {
 public:
  using Error::Error;
};

/// Ground-truth and hypothesis sets cover different sequence ids.
class MismatchedSequences : public Error {
 public:
  using Error::Error;
};

/// Hypothesis rows lack usable confidence scores.
class MissingScores : public Error {
 public:
  using Error::Error;
};

/// Scenario spec violates its invariants.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while writing results.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad tracker configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairtrack

#endif  // PAIRTRACK_ERRORS_HPP
