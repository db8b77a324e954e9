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
#ifndef PAIRTRACK_GEOMETRY_HPP
#define PAIRTRACK_GEOMETRY_HPP

#include <array>
#include <vector>

namespace pairtrack {

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  bool finite() const;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Row-major 3x3 matrix, just enough linear algebra for rigid transforms.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  Vec3 apply(const Vec3& v) const;
  Mat3 multiply(const Mat3& o) const;
  Mat3 transposed() const;
  double determinant() const;

  static Mat3 identity() { return Mat3{}; }
  static Mat3 rotation_z(double yaw);
};

/// 7-parameter 3D box: world- or sensor-frame center at the cuboid centroid,
/// dims (h, w, l), heading yaw about +z measured from +x.
struct OrientedBox3D {
  Vec3 center;
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double yaw = 0.0;

  double volume() const { return h * w * l; }
  bool valid() const;
};

/// Rigid transform from sensor frame to world frame at one timestamp.
struct EgoPose {
  Mat3 rotation;
  Vec3 translation;

  /// Throws InvalidPose unless rotation is orthonormal with det +1
  /// (tolerance 1e-6 on ||R^T R - I|| and |det - 1|).
  void validate() const;

  /// Yaw of the rotation about +z (meaningful for planar poses).
  double yaw() const;

  /// Tilt of the rotated vertical axis away from +z, radians.
  double vertical_tilt() const;

  EgoPose inverse() const;
  EgoPose compose(const EgoPose& inner) const;  // this ∘ inner

  static EgoPose identity() { return EgoPose{}; }
  static EgoPose planar(double x, double y, double z, double yaw);
};

/// Convex counterclockwise polygon in the BEV plane.
struct Polygon2D {
  std::vector<Vec2> vertices;

  /// Shoelace area; >= 0 for counterclockwise polygons.
  double area() const;
  bool empty() const { return vertices.size() < 3; }
};

/// Apply a planar rigid transform to a box: center moves by R,t and yaw is
/// advanced by the pose yaw. Throws NonPlanarPose when the pose rotation
/// tilts the vertical axis by more than 1e-3 rad.
OrientedBox3D transform_box(const EgoPose& pose, const OrientedBox3D& box);

/// Footprint of the box in the x-y plane as a counterclockwise rectangle,
/// l along the yaw-rotated x axis, w along the rotated y axis.
Polygon2D box_to_bev_polygon(const OrientedBox3D& box);

/// Area of the intersection of two convex polygons (Sutherland-Hodgman
/// clipping, then shoelace). Empty intersections yield 0.
double convex_intersection_area(const Polygon2D& a, const Polygon2D& b);

/// 3D IoU of two yaw-only boxes in a common frame: BEV polygon intersection
/// times vertical interval overlap over the volume union. Symmetric, in [0,1].
double iou_3d(const OrientedBox3D& a, const OrientedBox3D& b);

}  // namespace pairtrack

#endif  // PAIRTRACK_GEOMETRY_HPP
