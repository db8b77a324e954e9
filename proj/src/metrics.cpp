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
#include "pairtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pairtrack/association.hpp"
#include "pairtrack/errors.hpp"
#include "pairtrack/geometry.hpp"

namespace pairtrack {

namespace {

constexpr double kMostlyTrackedRatio = 0.8;
constexpr double kMostlyLostRatio = 0.2;

void check_scores(const SequenceSet& hyp) {
  for (const auto& [seq, rows] : hyp) {
    for (const GtBox& r : rows) {
      if (!std::isfinite(r.score) || r.score < 0.0) {
        throw MissingScores("sequence '" + seq + "': hypothesis row at frame " +
                            std::to_string(r.frame_index) +
                            " has no usable score");
      }
    }
  }
}

void check_sequences(const SequenceSet& gt, const SequenceSet& hyp) {
  std::string missing;
  for (const auto& [seq, rows] : gt) {
    if (!hyp.count(seq)) missing += " results lack '" + seq + "';";
  }
  for (const auto& [seq, rows] : hyp) {
    if (!gt.count(seq)) missing += " ground truth lacks '" + seq + "';";
  }
  if (!missing.empty()) {
    throw MismatchedSequences("sequence sets differ:" + missing);
  }
}

using FrameMap = std::map<std::int64_t, std::vector<const GtBox*>>;

FrameMap group_by_frame(const std::vector<GtBox>& rows) {
  FrameMap m;
  for (const GtBox& r : rows) m[r.frame_index].push_back(&r);
  for (auto& [f, boxes] : m) {
    std::sort(boxes.begin(), boxes.end(), [](const GtBox* a, const GtBox* b) {
      return a->gt_id < b->gt_id;
    });
  }
  return m;
}

}  // namespace

FrameMatchResult match_frame(const std::vector<GtBox>& gt,
                             const std::vector<GtBox>& hyp,
                             CorrespondenceState& state, double iou_min) {
  std::vector<const GtBox*> gts, hyps;
  gts.reserve(gt.size());
  hyps.reserve(hyp.size());
  for (const GtBox& g : gt) gts.push_back(&g);
  for (const GtBox& h : hyp) hyps.push_back(&h);
  auto by_id = [](const GtBox* a, const GtBox* b) { return a->gt_id < b->gt_id; };
  std::sort(gts.begin(), gts.end(), by_id);
  std::sort(hyps.begin(), hyps.end(), by_id);

  const size_t ng = gts.size();
  const size_t nh = hyps.size();
  std::vector<char> gt_done(ng, 0), hyp_done(nh, 0);

  FrameMatchResult result;

  // Keep last frame's correspondences that still overlap.
  for (size_t gi = 0; gi < ng; ++gi) {
    const auto it = state.prev_frame.find(gts[gi]->gt_id);
    if (it == state.prev_frame.end()) continue;
    for (size_t hi = 0; hi < nh; ++hi) {
      if (hyp_done[hi] || hyps[hi]->gt_id != it->second) continue;
      const double iou = iou_3d(gts[gi]->box, hyps[hi]->box);
      if (iou >= iou_min) {
        gt_done[gi] = 1;
        hyp_done[hi] = 1;
        result.matches.emplace_back(gts[gi]->gt_id, hyps[hi]->gt_id);
        result.match_ious.push_back(iou);
      }
      break;
    }
  }

  // Optimal matching on the remainder, maximizing total IoU at >= iou_min.
  std::vector<size_t> rg, rh;
  for (size_t gi = 0; gi < ng; ++gi)
    if (!gt_done[gi]) rg.push_back(gi);
  for (size_t hi = 0; hi < nh; ++hi)
    if (!hyp_done[hi]) rh.push_back(hi);
  if (!rg.empty() && !rh.empty()) {
    const size_t n = std::max(rg.size(), rh.size());
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> iou(rg.size(),
                                         std::vector<double>(rh.size(), 0.0));
    for (size_t a = 0; a < rg.size(); ++a) {
      for (size_t b = 0; b < rh.size(); ++b) {
        const double v = iou_3d(gts[rg[a]]->box, hyps[rh[b]]->box);
        iou[a][b] = v;
        if (v >= iou_min) cost[a][b] = -v;
      }
    }
    const std::vector<int> row_to_col = solve_min_cost_assignment(cost);
    for (size_t a = 0; a < rg.size(); ++a) {
      const int b = row_to_col[a];
      if (b < 0 || static_cast<size_t>(b) >= rh.size()) continue;
      if (iou[a][b] < iou_min) continue;
      gt_done[rg[a]] = 1;
      hyp_done[rh[b]] = 1;
      result.matches.emplace_back(gts[rg[a]]->gt_id, hyps[rh[b]]->gt_id);
      result.match_ious.push_back(iou[a][b]);
    }
  }

  for (size_t gi = 0; gi < ng; ++gi)
    if (!gt_done[gi]) result.fn += 1;
  for (size_t hi = 0; hi < nh; ++hi)
    if (!hyp_done[hi]) result.fp += 1;

  state.prev_frame.clear();
  for (size_t k = 0; k < result.matches.size(); ++k) {
    const auto [gid, hid] = result.matches[k];
    const auto last = state.last_matched.find(gid);
    if (last != state.last_matched.end() && last->second != hid) {
      result.id_switches += 1;
    }
    state.last_matched[gid] = hid;
    state.prev_frame[gid] = hid;
  }
  return result;
}

double ClearResult::mota() const {
  if (num_gt == 0) return 0.0;
  return 1.0 - static_cast<double>(fp + fn + id_switches) /
                   static_cast<double>(num_gt);
}

double ClearResult::motp() const {
  if (num_matches == 0) return 0.0;
  return matched_iou_sum / static_cast<double>(num_matches);
}

double ClearResult::recall() const {
  if (num_gt == 0) return 0.0;
  return static_cast<double>(num_matches) / static_cast<double>(num_gt);
}

double ClearResult::mt_ratio() const {
  if (num_trajectories == 0) return 0.0;
  return static_cast<double>(mostly_tracked) /
         static_cast<double>(num_trajectories);
}

double ClearResult::ml_ratio() const {
  if (num_trajectories == 0) return 0.0;
  return static_cast<double>(mostly_lost) /
         static_cast<double>(num_trajectories);
}

ClearResult clear_metrics(const SequenceSet& gt, const SequenceSet& hyp,
                          double iou_min) {
  check_sequences(gt, hyp);
  check_scores(hyp);

  ClearResult total;
  for (const auto& [seq, gt_rows] : gt) {
    const auto& hyp_rows = hyp.at(seq);
    const FrameMap gt_frames = group_by_frame(gt_rows);
    const FrameMap hyp_frames = group_by_frame(hyp_rows);

    std::vector<std::int64_t> frames;
    for (const auto& [f, boxes] : gt_frames) frames.push_back(f);
    for (const auto& [f, boxes] : hyp_frames) {
      if (!gt_frames.count(f)) frames.push_back(f);
    }
    std::sort(frames.begin(), frames.end());

    CorrespondenceState state;
    // Per-trajectory tally: frames present, frames matched, fragment runs.
    struct Trajectory {
      std::int64_t present = 0;
      std::int64_t matched = 0;
      std::int64_t runs = 0;
      bool in_run = false;
    };
    std::map<std::int64_t, Trajectory> trajectories;

    for (std::int64_t f : frames) {
      std::vector<GtBox> gt_here, hyp_here;
      if (auto it = gt_frames.find(f); it != gt_frames.end()) {
        for (const GtBox* b : it->second) gt_here.push_back(*b);
      }
      if (auto it = hyp_frames.find(f); it != hyp_frames.end()) {
        for (const GtBox* b : it->second) hyp_here.push_back(*b);
      }
      const FrameMatchResult r = match_frame(gt_here, hyp_here, state, iou_min);
      total.fp += r.fp;
      total.fn += r.fn;
      total.id_switches += r.id_switches;
      total.num_gt += static_cast<std::int64_t>(gt_here.size());
      total.num_matches += static_cast<std::int64_t>(r.matches.size());
      for (double v : r.match_ious) total.matched_iou_sum += v;

      std::map<std::int64_t, std::int64_t> matched_gt;
      for (size_t k = 0; k < r.matches.size(); ++k) {
        matched_gt[r.matches[k].first] = r.matches[k].second;
      }
      for (const GtBox& g : gt_here) {
        Trajectory& t = trajectories[g.gt_id];
        t.present += 1;
        if (matched_gt.count(g.gt_id)) {
          t.matched += 1;
          if (!t.in_run) {
            t.runs += 1;
            t.in_run = true;
          }
        } else {
          t.in_run = false;
        }
      }
      for (size_t k = 0; k < r.matches.size(); ++k) {
        const std::int64_t hid = r.matches[k].second;
        for (const GtBox& h : hyp_here) {
          if (h.gt_id == hid) {
            total.tp_scores.push_back(h.score);
            break;
          }
        }
      }
    }

    for (const auto& [gid, t] : trajectories) {
      total.num_trajectories += 1;
      const double ratio = t.present
                               ? static_cast<double>(t.matched) /
                                     static_cast<double>(t.present)
                               : 0.0;
      if (ratio >= kMostlyTrackedRatio) total.mostly_tracked += 1;
      if (ratio <= kMostlyLostRatio) total.mostly_lost += 1;
      if (t.runs > 0) total.fragments += t.runs - 1;
    }
  }
  return total;
}

namespace {

SequenceSet filter_by_score(const SequenceSet& hyp, double threshold) {
  SequenceSet out;
  for (const auto& [seq, rows] : hyp) {
    auto& kept = out[seq];
    for (const GtBox& r : rows) {
      if (r.score >= threshold) kept.push_back(r);
    }
  }
  return out;
}

}  // namespace

SamotaResult samota_family(const SequenceSet& gt, const SequenceSet& hyp,
                           double iou_min, int recall_points) {
  if (recall_points < 1) {
    throw std::invalid_argument("recall_points must be >= 1");
  }
  const ClearResult full = clear_metrics(gt, hyp, iou_min);
  const std::int64_t num_gt = full.num_gt;

  SamotaResult out;
  if (num_gt == 0) return out;

  std::vector<double> tp_scores = full.tp_scores;
  std::sort(tp_scores.begin(), tp_scores.end(), std::greater<double>());
  const std::int64_t num_tp = static_cast<std::int64_t>(tp_scores.size());

  std::map<double, ClearResult> cache;
  double samota_sum = 0.0, amota_sum = 0.0, amotp_sum = 0.0;
  for (int k = 1; k <= recall_points; ++k) {
    const double r = static_cast<double>(k) / recall_points;
    const std::int64_t idx =
        static_cast<std::int64_t>(std::floor(r * static_cast<double>(num_gt)));
    if (idx > num_tp) continue;  // unreachable recall target contributes 0
    if (idx == 0) continue;      // empty cut contributes 0 as well
    const double threshold = tp_scores[static_cast<size_t>(idx - 1)];
    auto it = cache.find(threshold);
    if (it == cache.end()) {
      it = cache.emplace(threshold,
                         clear_metrics(gt, filter_by_score(hyp, threshold),
                                       iou_min))
               .first;
    }
    const ClearResult& cut = it->second;
    const double errors =
        static_cast<double>(cut.fp + cut.fn + cut.id_switches);
    const double smota =
        std::clamp(1.0 - (errors - (1.0 - r) * static_cast<double>(num_gt)) /
                             (r * static_cast<double>(num_gt)),
                   0.0, 1.0);
    samota_sum += smota;
    amota_sum += std::max(0.0, cut.mota());
    amotp_sum += cut.motp();
  }
  out.samota = 100.0 * samota_sum / recall_points;
  out.amota = 100.0 * amota_sum / recall_points;
  out.amotp = 100.0 * amotp_sum / recall_points;
  return out;
}

MetricsReport evaluate(const SequenceSet& gt, const SequenceSet& hyp,
                       double iou_min, int recall_points) {
  const ClearResult clear = clear_metrics(gt, hyp, iou_min);
  const SamotaResult sam = samota_family(gt, hyp, iou_min, recall_points);
  MetricsReport rep;
  rep.samota = sam.samota;
  rep.amota = sam.amota;
  rep.amotp = sam.amotp;
  rep.mota = 100.0 * clear.mota();
  rep.motp = 100.0 * clear.motp();
  rep.id_switches = clear.id_switches;
  rep.fragments = clear.fragments;
  rep.fp = clear.fp;
  rep.fn = clear.fn;
  rep.mt = 100.0 * clear.mt_ratio();
  rep.ml = 100.0 * clear.ml_ratio();
  rep.num_gt = clear.num_gt;
  return rep;
}

std::string format_report_table(const MetricsReport& report, double iou_min) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "3D IoU = %.2f", iou_min);
  os << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%8s %8s %8s %8s %8s %6s %6s %7s %7s\n",
                "sAMOTA", "AMOTA", "AMOTP", "MOTA", "MOTP", "IDs", "Frags",
                "MT", "ML");
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "%8.2f %8.2f %8.2f %8.2f %8.2f %6lld %6lld %7.2f %7.2f\n",
                report.samota, report.amota, report.amotp, report.mota,
                report.motp, static_cast<long long>(report.id_switches),
                static_cast<long long>(report.fragments), report.mt, report.ml);
  os << buf;
  std::snprintf(buf, sizeof(buf), "FP %lld  FN %lld  GT %lld\n",
                static_cast<long long>(report.fp),
                static_cast<long long>(report.fn),
                static_cast<long long>(report.num_gt));
  os << buf;
  return os.str();
}

std::string report_to_json(const MetricsReport& report, double iou_min,
                           int recall_points) {
  nlohmann::ordered_json j;
  j["iou_min"] = iou_min;
  j["recall_points"] = recall_points;
  j["sAMOTA"] = report.samota;
  j["AMOTA"] = report.amota;
  j["AMOTP"] = report.amotp;
  j["MOTA"] = report.mota;
  j["MOTP"] = report.motp;
  j["IDs"] = report.id_switches;
  j["Frags"] = report.fragments;
  j["FP"] = report.fp;
  j["FN"] = report.fn;
  j["MT"] = report.mt;
  j["ML"] = report.ml;
  j["num_gt"] = report.num_gt;
  return j.dump(2) + "\n";
}

SequenceSet sequence_set_from_rows(const std::string& sequence_id,
                                   const std::vector<GtBox>& rows) {
  SequenceSet s;
  s[sequence_id] = rows;
  return s;
}

}  // namespace pairtrack
