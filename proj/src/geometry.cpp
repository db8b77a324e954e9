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
#include "pairtrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pairtrack/errors.hpp"

namespace pairtrack {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Point-on-line epsilon for clipping; shared-edge contacts resolve to zero
// area deterministically.
constexpr double kClipEps = 1e-9;
constexpr double kPoseOrthoTol = 1e-6;
constexpr double kPoseTiltTol = 1e-3;

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

bool Vec3::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::multiply(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Mat3::determinant() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 Mat3::rotation_z(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return r;
}

bool OrientedBox3D::valid() const {
  return h > 0.0 && w > 0.0 && l > 0.0 && center.finite() &&
         std::isfinite(yaw) && yaw > -kPi && yaw <= kPi;
}

void EgoPose::validate() const {
  const Mat3 gram = rotation.transposed().multiply(rotation);
  double frob = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double d = gram(i, j) - (i == j ? 1.0 : 0.0);
      frob += d * d;
    }
  }
  frob = std::sqrt(frob);
  const double det = rotation.determinant();
  if (frob > kPoseOrthoTol || std::abs(det - 1.0) > kPoseOrthoTol) {
    throw InvalidPose("pose rotation is not orthonormal with det +1 (||R^T R - I|| = " +
                      std::to_string(frob) + ", det = " + std::to_string(det) + ")");
  }
  if (!translation.finite()) {
    throw InvalidPose("pose translation is not finite");
  }
}

double EgoPose::yaw() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }

double EgoPose::vertical_tilt() const {
  // Angle between R * e_z and e_z.
  const double cz = std::clamp(rotation(2, 2), -1.0, 1.0);
  return std::acos(cz);
}

EgoPose EgoPose::inverse() const {
  EgoPose inv;
  inv.rotation = rotation.transposed();
  const Vec3 t = inv.rotation.apply(translation);
  inv.translation = {-t.x, -t.y, -t.z};
  return inv;
}

EgoPose EgoPose::compose(const EgoPose& inner) const {
  EgoPose out;
  out.rotation = rotation.multiply(inner.rotation);
  out.translation = rotation.apply(inner.translation) + translation;
  return out;
}

EgoPose EgoPose::planar(double x, double y, double z, double yaw) {
  EgoPose p;
  p.rotation = Mat3::rotation_z(yaw);
  p.translation = {x, y, z};
  return p;
}

double Polygon2D::area() const {
  if (vertices.size() < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % vertices.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

OrientedBox3D transform_box(const EgoPose& pose, const OrientedBox3D& box) {
  pose.validate();
  if (pose.vertical_tilt() > kPoseTiltTol) {
    throw NonPlanarPose("pose rotation tilts the vertical axis by " +
                        std::to_string(pose.vertical_tilt()) +
                        " rad; only rotations about z are supported");
  }
  OrientedBox3D out = box;
  out.center = pose.rotation.apply(box.center) + pose.translation;
  out.yaw = wrap_angle(box.yaw + pose.yaw());
  return out;
}

Polygon2D box_to_bev_polygon(const OrientedBox3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  // Counterclockwise footprint corners in the box frame.
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  Polygon2D poly;
  poly.vertices.reserve(4);
  for (int i = 0; i < 4; ++i) {
    poly.vertices.push_back({box.center.x + c * lx[i] - s * ly[i],
                             box.center.y + s * lx[i] + c * ly[i]});
  }
  return poly;
}

namespace {

// Signed distance surrogate: > 0 when p lies left of edge a->b.
inline double edge_side(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

inline Vec2 edge_intersect(const Vec2& a, const Vec2& b, const Vec2& p,
                           const Vec2& q) {
  // Intersection of segment p->q with the infinite line a->b.
  const double dpx = q.x - p.x;
  const double dpy = q.y - p.y;
  const double dex = b.x - a.x;
  const double dey = b.y - a.y;
  const double denom = dex * dpy - dey * dpx;
  if (denom == 0.0) return p;  // parallel; degenerate sliver, caller tolerates
  const double t = (dex * (a.y - p.y) - dey * (a.x - p.x)) / denom;
  return {p.x + t * dpx, p.y + t * dpy};
}

}  // namespace

double convex_intersection_area(const Polygon2D& a, const Polygon2D& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<Vec2> out = a.vertices;
  std::vector<Vec2> in;
  const size_t nb = b.vertices.size();
  for (size_t e = 0; e < nb && !out.empty(); ++e) {
    const Vec2& ea = b.vertices[e];
    const Vec2& eb = b.vertices[(e + 1) % nb];
    in.swap(out);
    out.clear();
    const size_t n = in.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& cur = in[i];
      const Vec2& nxt = in[(i + 1) % n];
      const bool cur_in = edge_side(ea, eb, cur) >= -kClipEps;
      const bool nxt_in = edge_side(ea, eb, nxt) >= -kClipEps;
      if (cur_in) {
        out.push_back(cur);
        if (!nxt_in) out.push_back(edge_intersect(ea, eb, cur, nxt));
      } else if (nxt_in) {
        out.push_back(edge_intersect(ea, eb, cur, nxt));
      }
    }
  }
  Polygon2D clipped;
  clipped.vertices = std::move(out);
  const double raw = clipped.area();
  return std::clamp(raw, 0.0, std::min(a.area(), b.area()));
}

namespace {

inline std::tuple<double, double, double, double, double, double, double>
box_key(const OrientedBox3D& b) {
  return {b.center.x, b.center.y, b.center.z, b.h, b.w, b.l, b.yaw};
}

}  // namespace

double iou_3d(const OrientedBox3D& a, const OrientedBox3D& b) {
  // Canonical argument order keeps the result exactly symmetric.
  const OrientedBox3D* pa = &a;
  const OrientedBox3D* pb = &b;
  if (box_key(b) < box_key(a)) std::swap(pa, pb);

  const double top = std::min(pa->center.z + 0.5 * pa->h, pb->center.z + 0.5 * pb->h);
  const double bot = std::max(pa->center.z - 0.5 * pa->h, pb->center.z - 0.5 * pb->h);
  const double dz = top - bot;
  if (dz <= 0.0) return 0.0;

  // Circumradius gate: far-apart footprints cannot overlap.
  const double dx = pa->center.x - pb->center.x;
  const double dy = pa->center.y - pb->center.y;
  const double ra = 0.5 * std::hypot(pa->l, pa->w);
  const double rb = 0.5 * std::hypot(pb->l, pb->w);
  if (dx * dx + dy * dy > (ra + rb) * (ra + rb)) return 0.0;

  const double bev = convex_intersection_area(box_to_bev_polygon(*pa),
                                              box_to_bev_polygon(*pb));
  const double inter = bev * dz;
  if (inter <= 0.0) return 0.0;
  const double uni = pa->volume() + pb->volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace pairtrack
