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
#ifndef PAIRTRACK_DETIO_HPP
#define PAIRTRACK_DETIO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pairtrack/geometry.hpp"

namespace pairtrack {

/// Detector output unit: the frame-t box, the corresponding frame-(t-1) box,
/// and an objectness score. Both boxes share one reference frame.
struct BoxPair {
  OrientedBox3D current;
  OrientedBox3D previous;
  double score = 1.0;
};

struct FrameRecord {
  std::string sequence_id;
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  EgoPose ego_pose;
  std::vector<BoxPair> pairs;
};

struct SequenceRecords {
  std::string sequence_id;
  std::vector<FrameRecord> frames;
};

enum class ObjectClass { Car };

std::string to_string(ObjectClass c);

/// One row of a KITTI tracking label or result file, with the box already
/// converted to the internal world frame. Rows without a score column carry
/// score 1.0.
struct GtBox {
  std::int64_t frame_index = 0;
  std::int64_t gt_id = 0;
  OrientedBox3D box;
  ObjectClass object_class = ObjectClass::Car;
  double score = 1.0;
};

/// One output row of the tracker: a track snapshot at one frame.
struct TrackedBox {
  std::int64_t frame_index = 0;
  std::int64_t track_id = 0;
  OrientedBox3D box;
  double score = 1.0;
};

// Internal frame convention: right-handed, z-up, x forward, y left, yaw about
// +z from +x (KITTI velodyne style). KITTI labels live in camera coordinates
// (x right, y down, z forward, box origin at the bottom face center, heading
// rotation_y about the camera y axis); the two helpers below convert between
// the conventions, including the bottom-center to centroid shift.
OrientedBox3D kitti_camera_to_internal(double x, double y, double z, double h,
                                       double w, double l, double ry);
void internal_to_kitti_camera(const OrientedBox3D& box, double& x, double& y,
                              double& z, double& h, double& w, double& l,
                              double& ry);

/// Parse a JSONL pair file (one frame object per line). Records come back
/// grouped by sequence and sorted by frame index; poses are validated but not
/// applied. Throws ParseError with the offending line, MonotonicityError when
/// frame indices or timestamps regress within a sequence.
std::vector<SequenceRecords> read_pairs(const std::string& path);

/// Serialize frames as JSONL, one frame per line, in the given order.
void write_pairs(const std::vector<SequenceRecords>& sequences,
                 const std::string& path);

/// Parse KITTI tracking labels (or results; a trailing score column is
/// accepted). Keeps only the requested classes, drops DontCare rows, converts
/// boxes to the internal frame. Throws ParseError with line/column context and
/// MonotonicityError on duplicate (frame, id) rows.
std::vector<GtBox> read_kitti_labels(
    const std::string& path,
    const std::vector<ObjectClass>& classes = {ObjectClass::Car});

/// Write ground-truth boxes in KITTI tracking label format (no score column).
void write_kitti_labels(const std::vector<GtBox>& boxes,
                        const std::string& path);

/// Write tracker output rows in KITTI tracking result format with a trailing
/// score column, ordered by (frame asc, id asc).
void write_results(const std::vector<TrackedBox>& rows,
                   const std::string& path);

/// Standalone pose file: one line per frame, 12 floats row-major [R|t].
std::vector<EgoPose> read_poses(const std::string& path);
void write_poses(const std::vector<EgoPose>& poses, const std::string& path);

}  // namespace pairtrack

#endif  // PAIRTRACK_DETIO_HPP
