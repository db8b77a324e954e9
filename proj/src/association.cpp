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
#include "pairtrack/association.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pairtrack {

double Assignment::total_iou() const {
  double total = 0.0;
  for (const Match& m : matches) total += m.iou;
  return total;
}

std::vector<std::vector<double>> build_cost_matrix(
    const std::vector<BoxPair>& pairs,
    const std::vector<OrientedBox3D>& track_boxes) {
  std::vector<std::vector<double>> m(pairs.size(),
                                     std::vector<double>(track_boxes.size()));
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (size_t j = 0; j < track_boxes.size(); ++j) {
      m[i][j] = iou_3d(pairs[i].previous, track_boxes[j]);
    }
  }
  return m;
}

std::vector<int> solve_min_cost_assignment(
    const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("assignment cost matrix must be square");
    }
  }
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Potentials over rows (u) and columns (v); p[j] is the row matched to
  // column j, index 0 is the virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

namespace {

Assignment finalize(const std::vector<std::vector<double>>& iou,
                    const std::vector<int>& pair_to_track, double threshold) {
  const size_t np = iou.size();
  const size_t nt = np ? iou[0].size() : 0;
  Assignment out;
  std::vector<char> track_used(nt, 0);
  for (size_t i = 0; i < np; ++i) {
    const int j = pair_to_track[i];
    if (j >= 0 && static_cast<size_t>(j) < nt && iou[i][j] >= threshold) {
      out.matches.push_back({i, static_cast<size_t>(j), iou[i][j]});
      track_used[j] = 1;
    } else {
      out.unmatched_pairs.push_back(i);
    }
  }
  for (size_t j = 0; j < nt; ++j) {
    if (!track_used[j]) out.unmatched_tracks.push_back(j);
  }
  return out;
}

Assignment associate_greedy(const std::vector<std::vector<double>>& iou,
                            double threshold) {
  const size_t np = iou.size();
  const size_t nt = np ? iou[0].size() : 0;

  struct Entry {
    double v;
    size_t i, j;
  };
  std::vector<Entry> entries;
  for (size_t i = 0; i < np; ++i) {
    for (size_t j = 0; j < nt; ++j) {
      if (iou[i][j] >= threshold) entries.push_back({iou[i][j], i, j});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<int> pair_to_track(np, -1);
  std::vector<char> track_used(nt, 0);
  for (const Entry& e : entries) {
    if (pair_to_track[e.i] >= 0 || track_used[e.j]) continue;
    pair_to_track[e.i] = static_cast<int>(e.j);
    track_used[e.j] = 1;
  }
  return finalize(iou, pair_to_track, threshold);
}

Assignment associate_optimal(const std::vector<std::vector<double>>& iou,
                             double threshold) {
  const size_t np = iou.size();
  const size_t nt = np ? iou[0].size() : 0;
  const size_t n = std::max(np, nt);
  if (n == 0) return {};

  // Entries below the threshold count as not matched; they share weight 0
  // with the padding, so the solver's perfect matching restricted to valid
  // entries maximizes the thresholded total.
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < np; ++i) {
    for (size_t j = 0; j < nt; ++j) {
      if (iou[i][j] >= threshold) cost[i][j] = -iou[i][j];
    }
  }
  const std::vector<int> row_to_col = solve_min_cost_assignment(cost);
  std::vector<int> pair_to_track(np, -1);
  for (size_t i = 0; i < np; ++i) pair_to_track[i] = row_to_col[i];
  return finalize(iou, pair_to_track, threshold);
}

}  // namespace

Assignment associate_matrix(const std::vector<std::vector<double>>& iou,
                            double threshold, AssociationMethod method) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("association threshold must lie in (0, 1]");
  }
  return method == AssociationMethod::Greedy ? associate_greedy(iou, threshold)
                                             : associate_optimal(iou, threshold);
}

Assignment associate(const std::vector<BoxPair>& pairs,
                     const std::vector<OrientedBox3D>& track_boxes,
                     double threshold, AssociationMethod method) {
  if (pairs.empty()) {
    // A 0 x N matrix carries no column count; list the tracks directly.
    Assignment out;
    out.unmatched_tracks.resize(track_boxes.size());
    for (size_t j = 0; j < track_boxes.size(); ++j) out.unmatched_tracks[j] = j;
    return out;
  }
  return associate_matrix(build_cost_matrix(pairs, track_boxes), threshold,
                          method);
}

}  // namespace pairtrack
