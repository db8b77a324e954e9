#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pairtrack/errors.hpp"
#include "pairtrack/tracker.hpp"
#include "support/mc_iou.hpp"
#include "support/temp_dir.hpp"

using namespace pairtrack;
using pairtrack::testing::SplitMix64;
using pairtrack::testing::TempDir;

namespace {

constexpr double kPi = 3.14159265358979323846;

OrientedBox3D car_at(double x, double y, double yaw = 0.0) {
  return OrientedBox3D{{x, y, 0.75}, 1.5, 1.8, 4.2, yaw};
}

BoxPair pair_for(const OrientedBox3D& cur, const OrientedBox3D& prev,
                 double score = 0.9) {
  return BoxPair{cur, prev, score};
}

FrameRecord frame_at(std::int64_t index, double t,
                     std::vector<BoxPair> pairs = {}) {
  FrameRecord f;
  f.sequence_id = "t";
  f.frame_index = index;
  f.timestamp = t;
  f.pairs = std::move(pairs);
  return f;
}

/// Frames for one object moving at constant velocity, optionally skipping
/// detection at the listed frames. dt = 0.1 s.
std::vector<FrameRecord> constant_velocity_frames(
    int n, double vx, const std::set<int>& dropped = {}) {
  std::vector<FrameRecord> frames;
  for (int f = 0; f < n; ++f) {
    const double t = f * 0.1;
    std::vector<BoxPair> pairs;
    if (!dropped.count(f)) {
      pairs.push_back(pair_for(car_at(vx * t, 0.0),
                               car_at(vx * (t - 0.1), 0.0)));
    }
    frames.push_back(frame_at(f, t, std::move(pairs)));
  }
  return frames;
}

}  // namespace

TEST_CASE("velocity_from_pair: stationary and arithmetic cases") {
  const auto box = car_at(0, 0);
  const VelocitySample still = velocity_from_pair(pair_for(box, box), 0.1);
  CHECK(still.velocity.x == 0.0);
  CHECK(still.velocity.y == 0.0);
  CHECK(still.velocity.z == 0.0);
  CHECK(still.yaw_rate == 0.0);

  const VelocitySample v =
      velocity_from_pair(pair_for(car_at(2, 0), car_at(0, 0)), 0.1);
  CHECK(v.velocity.x == doctest::Approx(20.0));
  CHECK(v.velocity.y == doctest::Approx(0.0));
}

TEST_CASE("velocity_from_pair: yaw rate wraps across the seam") {
  const VelocitySample v = velocity_from_pair(
      pair_for(car_at(0, 0, 3.1), car_at(0, 0, -3.1)), 0.1);
  // Wrapped difference oracle through sin/cos.
  const double diff = std::atan2(std::sin(3.1 - (-3.1)), std::cos(3.1 - (-3.1)));
  CHECK(v.yaw_rate == doctest::Approx(diff / 0.1).epsilon(1e-12));
  CHECK(v.yaw_rate == doctest::Approx((6.2 - 2 * kPi) / 0.1).epsilon(1e-9));
}

TEST_CASE("velocity_from_pair rejects non-positive dt") {
  const auto box = car_at(0, 0);
  CHECK_THROWS_AS(velocity_from_pair(pair_for(box, box), 0.0), InvalidDt);
  CHECK_THROWS_AS(velocity_from_pair(pair_for(box, box), -0.1), InvalidDt);
}

TEST_CASE("smoothed_velocity: identity, mean, empty") {
  VelocityWindow w(5);
  CHECK_THROWS_AS(smoothed_velocity(w), EmptyWindow);

  w.push({{1, 0, 0}, 0.2});
  auto s = smoothed_velocity(w);
  CHECK(s.velocity.x == doctest::Approx(1.0));
  CHECK(s.yaw_rate == doctest::Approx(0.2));

  w.push({{3, 0, 0}, 0.4});
  s = smoothed_velocity(w);
  CHECK(s.velocity.x == doctest::Approx(2.0));
  CHECK(s.yaw_rate == doctest::Approx(0.3));
}

TEST_CASE("window evicts oldest beyond capacity") {
  VelocityWindow w(3);
  for (int i = 1; i <= 5; ++i) w.push({{double(i), 0, 0}, 0.0});
  CHECK(w.size() == 3);
  CHECK(smoothed_velocity(w).velocity.x == doctest::Approx(4.0));  // mean(3,4,5)
}

TEST_CASE("mean over N=9 noisy samples shrinks the std threefold") {
  SplitMix64 rng(55);
  auto gauss = [&rng]() {
    const double u1 = 1.0 - rng.u01();
    const double u2 = rng.u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  };
  const double sigma = 0.7;
  const int trials = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    VelocityWindow w(9);
    for (int k = 0; k < 9; ++k) {
      w.push({{5.0 + sigma * gauss(), 0, 0}, 0.0});
    }
    const double err = smoothed_velocity(w).velocity.x - 5.0;
    sum += err;
    sum2 += err * err;
  }
  const double var = sum2 / trials - (sum / trials) * (sum / trials);
  const double std_measured = std::sqrt(var);
  CHECK(std_measured == doctest::Approx(sigma / 3.0).epsilon(0.15));
}

TEST_CASE("predict: zero velocity leaves the box, velocity shifts it") {
  Track track;
  track.state_box = car_at(1, 2, 0.3);
  track.window = VelocityWindow(5);
  track.window.push({{0, 0, 0}, 0.0});
  auto out = predict(track, 0.1);
  CHECK(out.center.x == doctest::Approx(1.0));
  CHECK(out.yaw == doctest::Approx(0.3));

  track.window.push({{20, 0, 0}, 0.0});  // mean becomes (10, 0, 0)
  out = predict(track, 0.1);
  CHECK(out.center.x == doctest::Approx(2.0));
}

TEST_CASE("predict: two steps of dt equal one step of 2dt") {
  Track track;
  track.state_box = car_at(1, -1, 0.4);
  track.window = VelocityWindow(4);
  track.window.push({{3, 2, 0.5}, 0.12});
  track.window.push({{5, -2, 0.1}, -0.02});

  Track twice = track;
  twice.state_box = predict(track, 0.1);
  const auto two_small = predict(twice, 0.1);
  const auto one_big = predict(track, 0.2);
  CHECK(two_small.center.x == doctest::Approx(one_big.center.x).epsilon(1e-9));
  CHECK(two_small.center.y == doctest::Approx(one_big.center.y).epsilon(1e-9));
  CHECK(two_small.center.z == doctest::Approx(one_big.center.z).epsilon(1e-9));
  CHECK(std::abs(wrap_angle(two_small.yaw - one_big.yaw)) < 1e-9);
}

TEST_CASE("predict requires a non-empty window") {
  Track track;
  track.state_box = car_at(0, 0);
  track.window = VelocityWindow(5);
  CHECK_THROWS_AS(predict(track, 0.1), EmptyWindow);
}

TEST_CASE("fuse: boundary weights and midpoint") {
  const auto pred = car_at(0, 0, 0.0);
  const auto det = car_at(2, 0, kPi / 2.0);

  const auto only_det = fuse(pred, det, 1.0);
  CHECK(only_det.center.x == doctest::Approx(2.0));
  CHECK(only_det.yaw == doctest::Approx(kPi / 2.0));

  const auto only_pred = fuse(pred, det, 0.0);
  CHECK(only_pred.center.x == doctest::Approx(0.0));
  CHECK(only_pred.yaw == doctest::Approx(0.0));

  const auto mid = fuse(pred, det, 0.5);
  CHECK(mid.center.x == doctest::Approx(1.0));
  CHECK(mid.yaw == doctest::Approx(kPi / 4.0));
}

TEST_CASE("fuse interpolates yaw through the seam") {
  const auto pred = car_at(0, 0, -3.0);
  const auto det = car_at(0, 0, 3.0);
  const auto mid = fuse(pred, det, 0.5);
  // Halfway from -3.0 towards 3.0 through pi, not through zero.
  const double expected = wrap_angle(-3.0 + 0.5 * wrap_angle(3.0 - (-3.0)));
  CHECK(mid.yaw == doctest::Approx(expected));
  CHECK(std::abs(mid.yaw) > 3.0);
}

TEST_CASE("step: empty frame on empty state yields nothing") {
  Tracker tracker{TrackerConfig{}};
  CHECK(tracker.step(frame_at(0, 0.0)).empty());
  CHECK(tracker.tracks().empty());
}

TEST_CASE("step: single object with min_hits=1 keeps one id from frame 0") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  Tracker tracker{cfg};
  const auto frames = constant_velocity_frames(10, 10.0);
  std::set<std::int64_t> ids;
  int rows = 0;
  for (const auto& f : frames) {
    for (const auto& row : tracker.step(f)) {
      ids.insert(row.track_id);
      ++rows;
      CHECK(row.box.center.x ==
            doctest::Approx(10.0 * f.timestamp).epsilon(1e-6));
    }
  }
  CHECK(rows == 10);
  CHECK(ids == std::set<std::int64_t>{1});
}

TEST_CASE("step: warm-up hides the first min_hits-1 frames") {
  Tracker tracker{TrackerConfig{}};  // min_hits = 3
  const auto frames = constant_velocity_frames(6, 10.0);
  std::vector<size_t> counts;
  for (const auto& f : frames) counts.push_back(tracker.step(f).size());
  CHECK(counts == std::vector<size_t>{0, 0, 1, 1, 1, 1});
}

TEST_CASE("step: miss -> coast -> dead lifecycle and id preservation") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.max_misses = 2;
  Tracker tracker{cfg};

  // Hits at frames 0..2, miss 3, hit 4, misses 5..7 kill it.
  const std::set<int> dropped{3, 5, 6, 7};
  const auto frames = constant_velocity_frames(8, 10.0, dropped);

  std::vector<std::vector<TrackedBox>> out;
  for (const auto& f : frames) out.push_back(tracker.step(f));

  // Coasted output exists at the dropped frame with the predicted center.
  REQUIRE(out[3].size() == 1);
  CHECK(out[3][0].track_id == 1);
  CHECK(out[3][0].box.center.x == doctest::Approx(3.0).epsilon(1e-9));

  // Re-acquired with the same id after the gap.
  REQUIRE(out[4].size() == 1);
  CHECK(out[4][0].track_id == 1);

  // Two more coasts are emitted, then the track dies.
  CHECK(out[5].size() == 1);
  CHECK(out[6].size() == 1);
  CHECK(out[7].empty());
  CHECK(tracker.tracks().empty());
}

TEST_CASE("step: tentative tracks die on their first miss") {
  TrackerConfig cfg;  // min_hits = 3
  Tracker tracker{cfg};
  tracker.step(frame_at(0, 0.0, {pair_for(car_at(0, 0), car_at(-1, 0))}));
  CHECK(tracker.tracks().size() == 1);
  tracker.step(frame_at(1, 0.1));
  CHECK(tracker.tracks().empty());
}

TEST_CASE("step: ids are monotone and never reused") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.max_misses = 1;
  Tracker tracker{cfg};
  std::set<std::int64_t> all_ids;
  std::int64_t max_seen = 0;
  for (int f = 0; f < 8; ++f) {
    // Jump far every frame so each detection births a fresh track.
    const double x = f * 100.0;
    const auto rows = tracker.step(
        frame_at(f, f * 0.1, {pair_for(car_at(x, 0), car_at(x - 1, 0))}));
    for (const auto& row : rows) {
      if (!all_ids.count(row.track_id)) {
        CHECK(row.track_id > max_seen);
        max_seen = row.track_id;
      }
      all_ids.insert(row.track_id);
    }
  }
  CHECK(all_ids.size() >= 8);
}

TEST_CASE("step: alpha=1 without dropout reproduces raw detections") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.fusion_alpha = 1.0;
  Tracker tracker{cfg};
  SplitMix64 rng(8);
  for (int f = 0; f < 20; ++f) {
    const double t = f * 0.1;
    // Noisy detections; alpha=1 must pass them through untouched.
    const auto cur = car_at(3.0 * t + rng.u01() * 0.1, rng.u01() * 0.1,
                            wrap_angle(0.2 + rng.u01() * 0.05));
    const auto prev = car_at(3.0 * (t - 0.1), 0.0, 0.2);
    const auto rows = tracker.step(frame_at(f, t, {pair_for(cur, prev)}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].box.center.x == cur.center.x);
    CHECK(rows[0].box.center.y == cur.center.y);
    CHECK(rows[0].box.yaw == cur.yaw);
    CHECK(rows[0].box.h == cur.h);
  }
}

TEST_CASE("step: coasting never mutates the velocity window") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.max_misses = 3;
  Tracker tracker{cfg};
  const std::set<int> dropped{4, 5};
  const auto frames = constant_velocity_frames(7, 10.0, dropped);
  for (const auto& f : frames) {
    tracker.step(f);
    if (f.frame_index == 3) {
      REQUIRE(tracker.tracks().size() == 1);
      CHECK(tracker.tracks()[0].window.size() == 3);
    }
    if (f.frame_index == 5) {
      REQUIRE(tracker.tracks().size() == 1);
      CHECK(tracker.tracks()[0].window.size() == 3);  // unchanged while coasting
    }
  }
}

TEST_CASE("step: window never exceeds N and misses stay within bounds") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.window_n = 4;
  cfg.max_misses = 2;
  Tracker tracker{cfg};
  SplitMix64 rng(12);
  for (int f = 0; f < 30; ++f) {
    std::vector<BoxPair> pairs;
    if (rng.u01() > 0.3) {
      const double t = f * 0.1;
      pairs.push_back(pair_for(car_at(5.0 * t, 0), car_at(5.0 * (t - 0.1), 0)));
    }
    tracker.step(frame_at(f, f * 0.1, std::move(pairs)));
    for (const Track& t : tracker.tracks()) {
      CHECK(t.window.size() <= 4);
      CHECK(t.consecutive_misses <= cfg.max_misses);
    }
  }
}

TEST_CASE("step: noise-free constant velocity is recovered exactly") {
  // Binary-exact numbers: dt = 0.125 s (8 Hz), v = (16, -8, 0).
  TrackerConfig cfg;
  cfg.min_hits = 1;
  Tracker tracker{cfg};
  for (int f = 0; f < 12; ++f) {
    const double t = f * 0.125;
    const auto cur = car_at(16.0 * t, -8.0 * t);
    const auto prev = car_at(16.0 * (t - 0.125), -8.0 * (t - 0.125));
    tracker.step(frame_at(f, t, {pair_for(cur, prev)}));
    if (f >= 1) {
      REQUIRE(tracker.tracks().size() == 1);
      const VelocitySample v = smoothed_velocity(tracker.tracks()[0].window);
      CHECK(v.velocity.x == 16.0);  // exact
      CHECK(v.velocity.y == -8.0);
      CHECK(v.yaw_rate == 0.0);
    }
  }
}

TEST_CASE("step: non-consecutive frame index raises FrameOrderError") {
  Tracker tracker{TrackerConfig{}};
  tracker.step(frame_at(0, 0.0));
  CHECK_THROWS_AS(tracker.step(frame_at(2, 0.2)), FrameOrderError);
}

TEST_CASE("step: first frame may start at any index") {
  Tracker tracker{TrackerConfig{}};
  CHECK_NOTHROW(tracker.step(frame_at(17, 1.7)));
  CHECK_NOTHROW(tracker.step(frame_at(18, 1.8)));
}

TEST_CASE("step: identical inputs give bit-identical outputs") {
  const auto frames = constant_velocity_frames(20, 7.0, {6, 11});
  auto run = [&frames]() {
    TrackerConfig cfg;
    cfg.min_hits = 2;
    Tracker tracker{cfg};
    std::vector<TrackedBox> rows;
    for (const auto& f : frames)
      for (const auto& r : tracker.step(f)) rows.push_back(r);
    return rows;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].track_id == b[i].track_id);
    CHECK(a[i].frame_index == b[i].frame_index);
    CHECK(a[i].box.center.x == b[i].box.center.x);
    CHECK(a[i].box.center.y == b[i].box.center.y);
    CHECK(a[i].box.yaw == b[i].box.yaw);
    CHECK(a[i].score == b[i].score);
  }
}

TEST_CASE("tracker config file: key = value and JSON forms") {
  TempDir tmp("tracker_cfg");
  {
    std::ofstream out(tmp.file("cfg.txt"));
    out << "# comment\n"
        << "window_n = 7\n"
        << "alpha = 0.25\n"
        << "method = optimal\n";
  }
  TrackerConfig cfg = load_tracker_config(tmp.file("cfg.txt"));
  CHECK(cfg.window_n == 7);
  CHECK(cfg.fusion_alpha == doctest::Approx(0.25));
  CHECK(cfg.method == AssociationMethod::Optimal);
  CHECK(cfg.min_hits == 3);  // untouched default

  {
    std::ofstream out(tmp.file("cfg.json"));
    out << R"({"window_n": 9, "min_hits": 2, "method": "greedy"})";
  }
  cfg = load_tracker_config(tmp.file("cfg.json"));
  CHECK(cfg.window_n == 9);
  CHECK(cfg.min_hits == 2);
  CHECK(cfg.method == AssociationMethod::Greedy);

  {
    std::ofstream out(tmp.file("bad.txt"));
    out << "window_n = 0\n";
  }
  CHECK_THROWS_AS(load_tracker_config(tmp.file("bad.txt")), ConfigError);
}
