#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pairtrack/errors.hpp"
#include "pairtrack/geometry.hpp"
#include "support/mc_iou.hpp"

using namespace pairtrack;
using pairtrack::testing::SplitMix64;
using pairtrack::testing::monte_carlo_iou;

namespace {

constexpr double kPi = 3.14159265358979323846;

OrientedBox3D make_box(double x, double y, double z, double h, double w,
                       double l, double yaw) {
  return OrientedBox3D{{x, y, z}, h, w, l, yaw};
}

OrientedBox3D random_box(SplitMix64& rng) {
  return make_box(rng.u01() * 10.0 - 5.0, rng.u01() * 10.0 - 5.0,
                  rng.u01() * 10.0 - 5.0, 1.0 + rng.u01() * 4.0,
                  1.0 + rng.u01() * 4.0, 1.0 + rng.u01() * 4.0,
                  wrap_angle(rng.u01() * 2.0 * kPi));
}

bool same_vertex_set(const Polygon2D& poly,
                     const std::vector<Vec2>& expected, double tol) {
  if (poly.vertices.size() != expected.size()) return false;
  for (const Vec2& e : expected) {
    bool found = false;
    for (const Vec2& v : poly.vertices) {
      if (std::abs(v.x - e.x) < tol && std::abs(v.y - e.y) < tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(6.2) == doctest::Approx(6.2 - 2.0 * kPi));
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double a = (rng.u01() - 0.5) * 50.0;
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    // Same direction on the circle.
    CHECK(std::abs(std::sin(w) - std::sin(a)) < 1e-9);
    CHECK(std::abs(std::cos(w) - std::cos(a)) < 1e-9);
  }
}

TEST_CASE("transform_box: identity pose is the identity map") {
  const auto box = make_box(1.0, 2.0, 0.5, 1.5, 1.8, 4.0, 0.3);
  const auto out = transform_box(EgoPose::identity(), box);
  CHECK(out.center.x == doctest::Approx(box.center.x));
  CHECK(out.center.y == doctest::Approx(box.center.y));
  CHECK(out.center.z == doctest::Approx(box.center.z));
  CHECK(out.yaw == doctest::Approx(box.yaw));
}

TEST_CASE("transform_box: pure translation shifts the center only") {
  const auto box = make_box(1.0, 2.0, 0.0, 1.5, 1.8, 4.0, 0.3);
  const auto out = transform_box(EgoPose::planar(5.0, 0.0, 0.0, 0.0), box);
  CHECK(out.center.x == doctest::Approx(6.0));
  CHECK(out.center.y == doctest::Approx(2.0));
  CHECK(out.center.z == doctest::Approx(0.0));
  CHECK(out.yaw == doctest::Approx(0.3));
}

TEST_CASE("transform_box: quarter turn about z") {
  const auto box = make_box(1.0, 0.0, 0.0, 1.5, 1.8, 4.0, 0.0);
  const auto out = transform_box(EgoPose::planar(0.0, 0.0, 0.0, kPi / 2.0), box);
  CHECK(out.center.x == doctest::Approx(0.0));
  CHECK(out.center.y == doctest::Approx(1.0));
  CHECK(out.yaw == doctest::Approx(kPi / 2.0));
}

TEST_CASE("transform_box rejects non-planar poses") {
  EgoPose tilted;
  const double a = 0.01;  // rotation about x, well past the 1e-3 tolerance
  tilted.rotation.m = {1, 0, 0, 0, std::cos(a), -std::sin(a),
                       0, std::sin(a), std::cos(a)};
  const auto box = make_box(0, 0, 0, 1, 1, 1, 0);
  CHECK_THROWS_AS(transform_box(tilted, box), NonPlanarPose);
}

TEST_CASE("transform_box rejects non-orthonormal rotations") {
  EgoPose bad;
  bad.rotation.m = {1.1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK_THROWS_AS(transform_box(bad, make_box(0, 0, 0, 1, 1, 1, 0)),
                  InvalidPose);
}

TEST_CASE("transform_box composes") {
  SplitMix64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto box = random_box(rng);
    const auto p1 = EgoPose::planar(rng.u01() * 4 - 2, rng.u01() * 4 - 2,
                                    rng.u01() * 2 - 1, wrap_angle(rng.u01() * 7));
    const auto p2 = EgoPose::planar(rng.u01() * 4 - 2, rng.u01() * 4 - 2,
                                    rng.u01() * 2 - 1, wrap_angle(rng.u01() * 7));
    const auto chained = transform_box(p2, transform_box(p1, box));
    const auto composed = transform_box(p2.compose(p1), box);
    CHECK(chained.center.x == doctest::Approx(composed.center.x).epsilon(1e-9));
    CHECK(chained.center.y == doctest::Approx(composed.center.y).epsilon(1e-9));
    CHECK(chained.center.z == doctest::Approx(composed.center.z).epsilon(1e-9));
    CHECK(std::abs(wrap_angle(chained.yaw - composed.yaw)) < 1e-9);
  }
}

TEST_CASE("box_to_bev_polygon: axis-aligned corners") {
  const auto poly = box_to_bev_polygon(make_box(0, 0, 0, 1.0, 2.0, 4.0, 0.0));
  CHECK(same_vertex_set(poly, {{2, 1}, {-2, 1}, {-2, -1}, {2, -1}}, 1e-12));
  CHECK(poly.area() == doctest::Approx(8.0));
}

TEST_CASE("box_to_bev_polygon: pi rotation maps the rectangle onto itself") {
  const auto poly = box_to_bev_polygon(make_box(0, 0, 0, 1.0, 2.0, 4.0, kPi));
  CHECK(same_vertex_set(poly, {{2, 1}, {-2, 1}, {-2, -1}, {2, -1}}, 1e-9));
}

TEST_CASE("box_to_bev_polygon: rotated area via shoelace") {
  const auto poly =
      box_to_bev_polygon(make_box(1.0, -2.0, 0, 1.0, 2.0, 4.0, kPi / 4.0));
  // Shoelace recomputed here, independent of Polygon2D::area.
  double twice = 0.0;
  for (size_t i = 0; i < poly.vertices.size(); ++i) {
    const auto& p = poly.vertices[i];
    const auto& q = poly.vertices[(i + 1) % poly.vertices.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  CHECK(0.5 * twice == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(poly.area() == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("convex_intersection_area basics") {
  const auto a = box_to_bev_polygon(make_box(0, 0, 0, 1, 2, 4, 0.4));
  CHECK(convex_intersection_area(a, a) == doctest::Approx(a.area()));

  const auto far = box_to_bev_polygon(make_box(100, 0, 0, 1, 2, 4, 0.0));
  CHECK(convex_intersection_area(a, far) == 0.0);

  Polygon2D sq1{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  // Counterclockwise unit squares offset by (0.5, 0).
  Polygon2D sq1_ccw{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  Polygon2D sq2{{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}}};
  CHECK(convex_intersection_area(sq1_ccw, sq2) == doctest::Approx(0.5));
}

TEST_CASE("convex_intersection_area: shared edge counts as zero") {
  Polygon2D sq1{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  Polygon2D sq2{{{1, 0}, {2, 0}, {2, 1}, {1, 1}}};
  CHECK(convex_intersection_area(sq1, sq2) == doctest::Approx(0.0));
}

TEST_CASE("iou_3d: identity, disjoint, axis-aligned analytic") {
  const auto a = make_box(0, 0, 0, 1.5, 2.0, 4.0, 0.0);
  CHECK(iou_3d(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  const auto far = make_box(20, 0, 0, 1.5, 2.0, 4.0, 0.0);
  CHECK(iou_3d(a, far) == 0.0);

  // Offset by half the length: BEV intersection 2x2, union 24 - 6 = 18.
  const auto b = make_box(2, 0, 0, 1.5, 2.0, 4.0, 0.0);
  CHECK(iou_3d(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou_3d: vertical separation") {
  const auto a = make_box(0, 0, 0, 1.0, 2.0, 4.0, 0.0);
  const auto b = make_box(0, 0, 1.0, 1.0, 2.0, 4.0, 0.0);  // touching faces
  CHECK(iou_3d(a, b) == 0.0);
  const auto c = make_box(0, 0, 0.5, 1.0, 2.0, 4.0, 0.0);
  CHECK(iou_3d(a, c) == doctest::Approx((8.0 * 0.5) / (16.0 - 4.0)));
}

TEST_CASE("iou_3d: yaw-offset pair matches the Monte-Carlo oracle") {
  const auto a = make_box(0, 0, 0, 1.5, 2.0, 4.0, 0.0);
  const auto b = make_box(0.8, 0.4, 0.2, 1.6, 2.1, 4.2, kPi / 6.0);
  const double mc = monte_carlo_iou(a, b, 1'000'000, 1234);
  CHECK(std::abs(iou_3d(a, b) - mc) <= 1e-2);
}

TEST_CASE("iou_3d properties over random pairs") {
  SplitMix64 rng(42);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_box(rng);
    auto b = random_box(rng);
    if (i % 3 == 0) {
      // Bias towards overlap; fully random pairs are mostly disjoint.
      b.center = a.center + Vec3{rng.u01() * 2 - 1, rng.u01() * 2 - 1,
                                 rng.u01() * 2 - 1};
    }
    const double ab = iou_3d(a, b);
    const double ba = iou_3d(b, a);
    CHECK(ab == ba);  // exact symmetry
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(iou_3d(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("iou_3d invariant under a shared planar rigid transform") {
  SplitMix64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_box(rng);
    auto b = random_box(rng);
    b.center = a.center + Vec3{rng.u01() * 3 - 1.5, rng.u01() * 3 - 1.5,
                               rng.u01() * 1 - 0.5};
    const auto pose = EgoPose::planar(rng.u01() * 20 - 10, rng.u01() * 20 - 10,
                                      rng.u01() * 4 - 2,
                                      wrap_angle(rng.u01() * 7));
    const double before = iou_3d(a, b);
    const double after = iou_3d(transform_box(pose, a), transform_box(pose, b));
    CHECK(after == doctest::Approx(before).epsilon(1e-6));
  }
}

TEST_CASE("iou_3d tracks the Monte-Carlo oracle on random pairs") {
  SplitMix64 rng(7);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 40; ++i) {
    const auto a = random_box(rng);
    auto b = random_box(rng);
    b.center = a.center + Vec3{rng.u01() * 3 - 1.5, rng.u01() * 3 - 1.5,
                               rng.u01() * 2 - 1};
    const double fast = iou_3d(a, b);
    if (fast == 0.0) continue;
    const double mc = monte_carlo_iou(a, b, 200'000, 1000 + i);
    CHECK(std::abs(fast - mc) <= 2e-2);
    ++checked;
  }
  CHECK(checked >= 30);
}
