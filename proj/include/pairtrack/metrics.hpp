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
#ifndef PAIRTRACK_METRICS_HPP
#define PAIRTRACK_METRICS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pairtrack/detio.hpp"

namespace pairtrack {

/// Evaluation input: rows per sequence id. Hypothesis rows reuse GtBox with
/// gt_id holding the track id and score holding the confidence.
using SequenceSet = std::map<std::string, std::vector<GtBox>>;

/// 3D CLEAR + recall-integrated summary. Percentages in [0, 100] except MOTA,
/// which can go negative when false positives dominate.
struct MetricsReport {
  double samota = 0.0;
  double amota = 0.0;
  double amotp = 0.0;
  double mota = 0.0;
  double motp = 0.0;
  std::int64_t id_switches = 0;
  std::int64_t fragments = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double mt = 0.0;
  double ml = 0.0;
  std::int64_t num_gt = 0;
};

/// Correspondence memory carried across frames of one sequence.
struct CorrespondenceState {
  std::map<std::int64_t, std::int64_t> prev_frame;    // matches made last frame
  std::map<std::int64_t, std::int64_t> last_matched;  // most recent match ever
};

/// Per-frame CLEAR matching: previous-frame correspondences are preserved
/// while they still overlap >= iou_min, the remainder is matched optimally by
/// total IoU. Updates the correspondence state and returns the increments.
struct FrameMatchResult {
  std::vector<std::pair<std::int64_t, std::int64_t>> matches;  // (gt_id, hyp_id)
  std::vector<double> match_ious;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t id_switches = 0;
};

FrameMatchResult match_frame(const std::vector<GtBox>& gt,
                             const std::vector<GtBox>& hyp,
                             CorrespondenceState& state, double iou_min);

/// CLEAR counts plus the derived ratios, aggregated over a sequence set.
struct ClearResult {
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t id_switches = 0;
  std::int64_t fragments = 0;
  std::int64_t num_gt = 0;
  std::int64_t num_matches = 0;
  double matched_iou_sum = 0.0;
  std::int64_t mostly_tracked = 0;
  std::int64_t mostly_lost = 0;
  std::int64_t num_trajectories = 0;
  std::vector<double> tp_scores;  // scores of matched hypothesis rows

  double mota() const;     // fraction, can be negative
  double motp() const;     // mean matched IoU, fraction
  double recall() const;   // matched gt fraction
  double mt_ratio() const;
  double ml_ratio() const;
};

/// Throws MismatchedSequences when the two sets cover different sequence ids,
/// MissingScores when a hypothesis score is unusable.
ClearResult clear_metrics(const SequenceSet& gt, const SequenceSet& hyp,
                          double iou_min);

struct SamotaResult {
  double samota = 0.0;  // percentages
  double amota = 0.0;
  double amotp = 0.0;
};

/// Recall-integrated metrics over L evenly spaced recall targets. For each
/// target the hypothesis set is cut at the score of the matching prefix of
/// ranked true-positive scores; targets beyond the reachable recall
/// contribute zero.
SamotaResult samota_family(const SequenceSet& gt, const SequenceSet& hyp,
                           double iou_min, int recall_points = 40);

/// Full report: CLEAR at iou_min plus the sAMOTA family.
MetricsReport evaluate(const SequenceSet& gt, const SequenceSet& hyp,
                       double iou_min, int recall_points = 40);

/// Aligned text table, column order sAMOTA AMOTA AMOTP MOTA MOTP IDs Frags MT ML.
std::string format_report_table(const MetricsReport& report, double iou_min);

/// Machine-readable JSON object with every report field.
std::string report_to_json(const MetricsReport& report, double iou_min,
                           int recall_points);

/// Group label rows by sequence under a single id (file-per-sequence layout).
SequenceSet sequence_set_from_rows(const std::string& sequence_id,
                                   const std::vector<GtBox>& rows);

}  // namespace pairtrack

#endif  // PAIRTRACK_METRICS_HPP
