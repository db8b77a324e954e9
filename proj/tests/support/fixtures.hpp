// Scripted metric fixtures shared by the unit and acceptance suites.
#ifndef PAIRTRACK_TESTS_FIXTURES_HPP
#define PAIRTRACK_TESTS_FIXTURES_HPP

#include <vector>

#include "pairtrack/detio.hpp"

namespace pairtrack::testing {

inline GtBox fixture_row(std::int64_t frame, std::int64_t id, double x,
                         double y, double score = 1.0, double l = 4.0) {
  GtBox g;
  g.frame_index = frame;
  g.gt_id = id;
  g.box = OrientedBox3D{{x, y, 0.75}, 1.5, 2.0, l, 0.0};
  g.score = score;
  return g;
}

/// 10-frame, 3-object CLEAR script: two dropped detections (objects 1 and 2,
/// one frame each), one id swap on object 3, and a half-meter offset on
/// object 2's hypotheses for a non-trivial MOTP.
///
/// Hand tally: num_gt 30, FP 0, FN 2, IDs 1, Frags 2, matches 28,
/// MOTA 90%, MOTP 100 * 26/28, MT 100%, ML 0%.
inline void clear_fixture(std::vector<GtBox>& gt, std::vector<GtBox>& hyp) {
  for (int f = 0; f < 10; ++f) {
    gt.push_back(fixture_row(f, 1, 0.0, 0.0));
    gt.push_back(fixture_row(f, 2, 20.0, 0.0));
    gt.push_back(fixture_row(f, 3, 40.0, 0.0));

    if (f != 3) hyp.push_back(fixture_row(f, 101, 0.0, 0.0, 0.9));
    if (f != 5) hyp.push_back(fixture_row(f, 201, 20.5, 0.0, 0.8));  // IoU 7/9
    hyp.push_back(fixture_row(f, f < 5 ? 301 : 302, 40.0, 0.0, 0.7));
  }
}

/// 20-frame, 2-object recall-sweep script: a perfect track at score 0.9, a
/// half-length track at 0.5, and 12 false positives at 0.6.
///
/// Hand tally at L = 5, IoU 0.5: full set has 30 TPs over num_gt 40
/// (max recall 0.75), FP 12, FN 10.
///   r=0.2, 0.4 -> threshold 0.9: MOTA_r 0.5, sMOTA_r clamps to 1, MOTP_r 1.
///   r=0.6     -> threshold 0.5: FP 12, FN 10 -> MOTA_r 0.45, sMOTA_r 0.75.
///   r=0.8, 1.0 -> unreachable, contribute 0.
/// sAMOTA 55, AMOTA 29, AMOTP 60.
inline void samota_fixture(std::vector<GtBox>& gt, std::vector<GtBox>& hyp) {
  for (int f = 0; f < 20; ++f) {
    gt.push_back(fixture_row(f, 1, 0.0, 0.0));
    gt.push_back(fixture_row(f, 2, 30.0, 0.0));
    hyp.push_back(fixture_row(f, 11, 0.0, 0.0, 0.9));
    if (f < 10) hyp.push_back(fixture_row(f, 12, 30.0, 0.0, 0.5));
    if (f < 12) hyp.push_back(fixture_row(f, 13, 80.0, 0.0, 0.6));
  }
}

}  // namespace pairtrack::testing

#endif  // PAIRTRACK_TESTS_FIXTURES_HPP
