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
#ifndef PAIRTRACK_ASSOCIATION_HPP
#define PAIRTRACK_ASSOCIATION_HPP

#include <cstddef>
#include <vector>

#include "pairtrack/detio.hpp"
#include "pairtrack/geometry.hpp"

namespace pairtrack {

enum class AssociationMethod { Greedy, Optimal };

struct Match {
  size_t pair_index;
  size_t track_index;
  double iou;
};

/// Result of one association round: matches plus the leftover index sets.
/// Matched and unmatched indices partition the inputs exactly.
struct Assignment {
  std::vector<Match> matches;
  std::vector<size_t> unmatched_pairs;
  std::vector<size_t> unmatched_tracks;

  double total_iou() const;
};

/// IoU matrix: entry (i, j) = iou_3d(pairs[i].previous, track_boxes[j]).
std::vector<std::vector<double>> build_cost_matrix(
    const std::vector<BoxPair>& pairs,
    const std::vector<OrientedBox3D>& track_boxes);

/// Match pairs to tracks on a precomputed IoU matrix. Greedy repeatedly takes
/// the globally largest remaining IoU >= threshold (ties broken by lowest pair
/// index, then lowest track index); Optimal maximizes the total matched IoU
/// over matchings whose every entry is >= threshold.
Assignment associate_matrix(const std::vector<std::vector<double>>& iou,
                            double threshold, AssociationMethod method);

/// Convenience wrapper: build the matrix and associate in one step.
Assignment associate(const std::vector<BoxPair>& pairs,
                     const std::vector<OrientedBox3D>& track_boxes,
                     double threshold, AssociationMethod method);

/// Minimum-cost perfect assignment on a square cost matrix (shortest
/// augmenting path with potentials, O(n^3)). Returns row -> column.
std::vector<int> solve_min_cost_assignment(
    const std::vector<std::vector<double>>& cost);

}  // namespace pairtrack

#endif  // PAIRTRACK_ASSOCIATION_HPP
