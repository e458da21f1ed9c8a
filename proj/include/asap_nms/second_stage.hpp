/* Copyright 2026 The ASAP-NMS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ASAP_NMS_SECOND_STAGE_HPP_
#define ASAP_NMS_SECOND_STAGE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "asap_nms/geometry.hpp"

namespace asap_nms {

// A classified stage-2 detection.
struct Detection {
  Box box;
  double score = 0.0;
  int class_id = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Class-agnostic overlap template per detection: the other detections whose
// box IoU is >= theta. Lists are sorted by index and symmetric.
struct DetectionAdjacency {
  double theta = 0.0;
  std::vector<std::vector<int>> lists;
  // overlaps[i][n] is the IoU of detection i with lists[i][n].
  std::vector<std::vector<double>> overlaps;
  std::uint64_t iou_evaluations = 0;

  std::size_t size() const { return lists.size(); }
  double mean_size() const;
  std::size_t max_size() const;
};

// One exhaustive O(N^2) pass. Throws std::invalid_argument unless
// 0 <= theta < 1.
DetectionAdjacency build_detection_adjacency(
    std::span<const Detection> detections, double theta);

struct ClassKeep {
  // kept[c] lists detection indices of class c in keep order.
  std::vector<std::vector<int>> kept;
  std::uint64_t suppression_checks = 0;
};

// Reference per-class Greedy-NMS (strict IoU > threshold). Class ids must lie
// in [0, num_classes).
ClassKeep per_class_greedy_nms(std::span<const Detection> detections,
                               double nms_threshold, int num_classes);

// Per-class Greedy-NMS restricted to adjacency lists. Identical to
// per_class_greedy_nms when adjacency.theta <= nms_threshold; a larger theta
// is rejected with std::invalid_argument.
ClassKeep templated_greedy_nms(std::span<const Detection> detections,
                               const DetectionAdjacency& adjacency,
                               double nms_threshold, int num_classes);

// Linear Soft-NMS: each selected detection multiplies the score of every
// remaining same-class detection with IoU > overlap_threshold by (1 - IoU).
// Detections that fall below score_floor are dropped.
struct SoftNmsParams {
  double overlap_threshold = 0.3;
  double score_floor = 1e-3;

  void validate() const;
};

struct SoftNmsResult {
  // Final score of every input detection (dropped ones keep the score they
  // were dropped with).
  std::vector<double> scores;
  // Selected detection indices per class, in selection order.
  std::vector<std::vector<int>> selected;
  std::uint64_t suppression_checks = 0;
};

SoftNmsResult soft_nms(std::span<const Detection> detections,
                       const SoftNmsParams& params, int num_classes);

// Soft-NMS that only rescales detections in the selected one's adjacency
// list. Identical to soft_nms when adjacency.theta <= overlap_threshold; a
// larger theta is rejected with std::invalid_argument.
SoftNmsResult templated_soft_nms(std::span<const Detection> detections,
                                 const DetectionAdjacency& adjacency,
                                 const SoftNmsParams& params, int num_classes);

}  // namespace asap_nms

#endif  // ASAP_NMS_SECOND_STAGE_HPP_
